//! The Klein-Gordon model `c⁻²∂_tt z − Δz + c²z = λ|z|^{2p}z` and its
//! first-order reformulation in the variables `(u, v)`.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{KgError, Result};
use crate::spectral::{Bracket, Field, Grid, Laplacian, ScaledInverseBracket};

const I: Complex64 = Complex64 { re: 0.0, im: 1.0 };

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct KgParams {
    pub c: f64,
    pub lambda: f64,
    pub p: u32,
}

impl KgParams {
    pub fn new(c: f64, lambda: f64, p: u32) -> Result<Self> {
        if !(c.is_finite() && c > 0.0) {
            return Err(KgError::Config(format!("c must be positive, got {c}")));
        }
        if !lambda.is_finite() {
            return Err(KgError::Config("lambda must be finite".into()));
        }
        Ok(KgParams { c, lambda, p })
    }
}

/// `z(0) = φ`, `∂_t z(0) = c²γ`, both independent of `c`.
#[derive(Debug, Clone)]
pub struct InitialData {
    pub phi: Field,
    pub gamma: Field,
}

impl InitialData {
    pub fn new(phi: Field, gamma: Field) -> Result<Self> {
        phi.same_grid(&gamma)?;
        Ok(InitialData { phi, gamma })
    }

    pub fn grid(&self) -> &Grid {
        self.phi.grid()
    }

    pub fn is_real(&self, tol: f64) -> bool {
        self.phi.is_real(tol) && self.gamma.is_real(tol)
    }
}

#[derive(Debug, Clone)]
pub struct FirstOrderState {
    pub u: Field,
    pub v: Field,
    pub t: f64,
}

impl FirstOrderState {
    pub fn new(u: Field, v: Field, t: f64) -> Result<Self> {
        u.same_grid(&v)?;
        Ok(FirstOrderState { u, v, t })
    }

    pub fn grid(&self) -> &Grid {
        self.u.grid()
    }
}

/// `u = z − ic⁻¹⟨∇⟩_c⁻¹∂_t z`, `v = z̄ − ic⁻¹⟨∇⟩_c⁻¹∂_t z̄`.
pub fn to_first_order(z: &Field, zt: &Field, c: f64) -> Result<FirstOrderState> {
    z.same_grid(zt)?;
    let smooth = zt.apply(&ScaledInverseBracket { c }) * (-I / (c * c));
    let smooth_conj = zt.conj().apply(&ScaledInverseBracket { c }) * (-I / (c * c));
    FirstOrderState::new(z + &smooth, &z.conj() + &smooth_conj, 0.0)
}

/// `z = ½(u + v̄)`.
pub fn from_first_order(state: &FirstOrderState) -> Field {
    &(&state.u + &state.v.conj()) * 0.5
}

/// `∂_t z = ½ic⟨∇⟩_c(u − v̄)`.
pub fn first_order_velocity(state: &FirstOrderState, c: f64) -> Field {
    (&state.u - &state.v.conj()).apply(&Bracket { c }) * (0.5 * c * I)
}

/// The first-order initial value `ψ = (φ − ic⟨∇⟩_c⁻¹γ, φ̄ − ic⟨∇⟩_c⁻¹γ̄)`.
pub fn initial_state(data: &InitialData, c: f64) -> Result<FirstOrderState> {
    to_first_order(&data.phi, &(&data.gamma * (c * c)), c)
}

pub fn nonlinearity_value(z: Complex64, lambda: f64, p: u32) -> Complex64 {
    z * (lambda * z.norm_sqr().powi(p as i32))
}

/// Pointwise `λ|z|^{2p}z`.
pub fn nonlinearity_f(z: &Field, lambda: f64, p: u32) -> Field {
    let values: Vec<Complex64> = z
        .values()
        .into_iter()
        .map(|w| nonlinearity_value(w, lambda, p))
        .collect();
    Field::from_nonlinear_values(z.grid(), &values).expect("same grid")
}

/// `F(w) = (f(½(u + v̄)), f(½(ū + v)))`.
pub fn f_vector(state: &FirstOrderState, lambda: f64, p: u32) -> (Field, Field) {
    let u = state.u.values();
    let v = state.v.values();
    let mut first = Vec::with_capacity(u.len());
    let mut second = Vec::with_capacity(u.len());
    for (a, b) in u.iter().zip(&v) {
        first.push(nonlinearity_value(0.5 * (a + b.conj()), lambda, p));
        second.push(nonlinearity_value(0.5 * (a.conj() + b), lambda, p));
    }
    let grid = state.grid();
    (
        Field::from_nonlinear_values(grid, &first).expect("same grid"),
        Field::from_nonlinear_values(grid, &second).expect("same grid"),
    )
}

/// Expansion terms of `ψ` in powers of `c⁻²`: `ψ₀ = (φ − iγ, φ̄ − iγ̄)` and
/// `ψ₁ = −(i/2)Δ(γ, γ̄)`.
pub fn psi_expansion_term(n: u32, data: &InitialData) -> Result<(Field, Field)> {
    match n {
        0 => {
            let u = &data.phi - &(&data.gamma * I);
            let v = &data.phi.conj() - &(&data.gamma.conj() * I);
            Ok((u, v))
        }
        1 => {
            let lap = data.gamma.apply(&Laplacian) * (-0.5 * I);
            let lap_conj = data.gamma.conj().apply(&Laplacian) * (-0.5 * I);
            Ok((lap, lap_conj))
        }
        _ => Err(KgError::Unsupported(format!(
            "initial-data expansion term of order {n} (only 0 and 1 are built)"
        ))),
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TaylorKind {
    /// `√(1+x) = Σ α_n xⁿ`, so `c√(k²+c²) = c² + k²/2 + Σ_{n≥2} α_n c^{2−2n} k^{2n}`.
    Alpha,
    /// `(1+x)^{-1/2} = Σ β_n xⁿ`, so `c⟨∇⟩_c⁻¹ = 1 + Σ_{n≥1} β_n c^{−2n}(−Δ)ⁿ`.
    Beta,
}

/// Generalized binomial coefficient `binom(a, n)`.
fn binomial(a: f64, n: u32) -> f64 {
    (0..n).fold(1.0, |acc, j| acc * (a - j as f64) / (j as f64 + 1.0))
}

pub fn taylor_coefficient(kind: TaylorKind, n: u32) -> f64 {
    match kind {
        TaylorKind::Alpha => binomial(0.5, n),
        TaylorKind::Beta => binomial(-0.5, n),
    }
}

fn linear_frequency(a: i64, params: &KgParams) -> Result<f64> {
    let af = a as f64;
    let disc = af * af + params.c * params.c - params.lambda;
    if disc <= 0.0 {
        return Err(KgError::DegenerateFrequency {
            mode: a,
            value: disc,
        });
    }
    Ok(disc.sqrt())
}

fn require_linear(params: &KgParams) -> Result<()> {
    if params.p != 0 {
        return Err(KgError::Unsupported(format!(
            "closed-form solution needs p = 0, got p = {}",
            params.p
        )));
    }
    Ok(())
}

/// Exact `(z(t), ∂_t z(t))` of the linear problem `f(z) = λz`, mode by mode.
pub fn exact_linear_state(data: &InitialData, params: &KgParams, t: f64) -> Result<(Field, Field)> {
    require_linear(params)?;
    let grid = data.grid();
    let c = params.c;
    let mut z = Field::zeros(grid);
    let mut zt = Field::zeros(grid);
    for i in 0..grid.num_points() {
        let a = grid.mode_at(i);
        let phi = data.phi.coeffs()[i];
        let gamma = data.gamma.coeffs()[i];
        if phi == Complex64::default() && gamma == Complex64::default() {
            continue;
        }
        let root = linear_frequency(a, params)?;
        let omega = c * root;
        let (s, co) = (omega * t).sin_cos();
        z.coeffs_mut()[i] = phi * co + gamma * (c / root * s);
        zt.coeffs_mut()[i] = -phi * (omega * s) + gamma * (c * c * co);
    }
    Ok((z, zt))
}

pub fn exact_linear_solution(data: &InitialData, params: &KgParams, t: f64) -> Result<Field> {
    exact_linear_state(data, params, t).map(|(z, _)| z)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::spectral::make_grid;
    use approx::assert_relative_eq;
    use std::f64::consts::PI;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn max_diff(a: &Field, b: &Field) -> f64 {
        (a - b)
            .coeffs()
            .iter()
            .map(|z| z.norm())
            .fold(0.0, f64::max)
    }

    #[test]
    fn first_order_of_initial_data() {
        let g = make_grid(8).unwrap();
        let phi = Field::from_modes(&g, &[(1, c(0.7, 0.2)), (-2, c(0.1, -0.4))]).unwrap();
        let gamma = Field::from_modes(&g, &[(0, c(0.3, 0.0)), (3, c(0.0, 1.0))]).unwrap();
        let cc = 6.0;
        let data = InitialData::new(phi.clone(), gamma.clone()).unwrap();
        let st = initial_state(&data, cc).unwrap();
        let u = &phi - &(gamma.apply(&ScaledInverseBracket { c: cc }) * I);
        let v = &phi.conj() - &(gamma.conj().apply(&ScaledInverseBracket { c: cc }) * I);
        assert!(max_diff(&st.u, &u) < 1e-15);
        assert!(max_diff(&st.v, &v) < 1e-15);
    }

    #[test]
    fn zero_velocity_gives_z_and_conjugate() {
        let g = make_grid(4).unwrap();
        let z = Field::from_modes(&g, &[(1, c(1.0, 2.0)), (-1, c(0.5, 0.0))]).unwrap();
        let st = to_first_order(&z, &Field::zeros(&g), 3.0).unwrap();
        assert!(max_diff(&st.u, &z) < 1e-15);
        assert!(max_diff(&st.v, &z.conj()) < 1e-15);
    }

    #[test]
    fn single_mode_velocity_example() {
        let g = make_grid(4).unwrap();
        let zt = Field::from_modes(&g, &[(1, c(1.0, 0.0))]).unwrap();
        let st = to_first_order(&Field::zeros(&g), &zt, 1.0).unwrap();
        let r = 1.0 / 2f64.sqrt();
        assert!((st.u.coeff(1) - c(0.0, -r)).norm() < 1e-15);
        assert!((st.v.coeff(-1) - c(0.0, -r)).norm() < 1e-15);
        assert!(st.u.coeff(-1).norm() < 1e-15 && st.v.coeff(1).norm() < 1e-15);
    }

    #[test]
    fn from_first_order_examples() {
        let g = make_grid(4).unwrap();
        let phi = Field::from_fn(&g, |x| c(x.cos(), 0.0));
        let st = FirstOrderState::new(phi.clone(), phi.clone(), 0.0).unwrap();
        assert!(max_diff(&from_first_order(&st), &phi) < 1e-15);
        let cplx = Field::from_modes(&g, &[(2, c(0.2, 0.9))]).unwrap();
        let st = FirstOrderState::new(&cplx * 2.0, Field::zeros(&g), 0.0).unwrap();
        assert!(max_diff(&from_first_order(&st), &cplx) < 1e-15);
    }

    #[test]
    fn velocity_inverts_first_order_map() {
        let g = make_grid(8).unwrap();
        let z = Field::from_modes(&g, &[(1, c(0.6, 0.1)), (-3, c(0.2, 0.3))]).unwrap();
        let zt = Field::from_modes(&g, &[(0, c(2.0, -1.0)), (2, c(0.0, 5.0))]).unwrap();
        let st = to_first_order(&z, &zt, 4.0).unwrap();
        assert!(max_diff(&first_order_velocity(&st, 4.0), &zt) < 1e-13);
    }

    #[test]
    fn grid_mismatch_is_reported() {
        let a = Field::zeros(&make_grid(4).unwrap());
        let b = Field::zeros(&make_grid(8).unwrap());
        assert!(matches!(
            to_first_order(&a, &b, 1.0),
            Err(KgError::GridMismatch)
        ));
    }

    #[test]
    fn nonlinearity_examples() {
        let g = make_grid(4).unwrap();
        let z = Field::from_modes(&g, &[(1, c(0.3, 0.4)), (0, c(1.0, 0.0))]).unwrap();
        assert!(max_diff(&nonlinearity_f(&z, 2.5, 0), &(&z * 2.5)) < 1e-15);
        let two = Field::constant(&g, c(2.0, 0.0));
        let out = nonlinearity_f(&two, -1.0, 1);
        for v in out.values() {
            assert!((v - c(-8.0, 0.0)).norm() < 1e-13);
        }
    }

    #[test]
    fn nonlinearity_is_gauge_invariant() {
        for alpha in [0.1, 1.3, -2.2, 3.0] {
            for (z, p) in [(c(0.4, -1.1), 1), (c(2.0, 0.5), 2), (c(-0.3, 0.2), 0)] {
                let rot = Complex64::from_polar(1.0, alpha);
                let lhs = nonlinearity_value(rot * z, -1.5, p);
                let rhs = rot * nonlinearity_value(z, -1.5, p);
                assert!((lhs - rhs).norm() <= 1e-14 * (1.0 + rhs.norm()));
            }
        }
    }

    #[test]
    fn f_vector_real_and_constant_cases() {
        let g = make_grid(4).unwrap();
        let u = Field::from_fn(&g, |x| c(x.sin() + 0.5, 0.0));
        let st = FirstOrderState::new(u.clone(), u.clone(), 0.0).unwrap();
        let (f1, f2) = f_vector(&st, -1.0, 1);
        assert!(max_diff(&f1, &f2) < 1e-14);
        assert!(max_diff(&f1, &nonlinearity_f(&u, -1.0, 1)) < 1e-14);
        assert!(f1.is_real(1e-14));

        let st =
            FirstOrderState::new(Field::constant(&g, c(2.0, 0.0)), Field::zeros(&g), 0.0).unwrap();
        let (f1, f2) = f_vector(&st, 1.0, 1);
        for v in f1.values().into_iter().chain(f2.values()) {
            assert!((v - c(1.0, 0.0)).norm() < 1e-14);
        }
    }

    #[test]
    fn psi_terms() {
        let g = make_grid(4).unwrap();
        let phi = Field::from_modes(&g, &[(1, c(0.5, 0.5))]).unwrap();
        let gamma = Field::from_modes(&g, &[(1, c(1.0, 0.0))]).unwrap();
        let data = InitialData::new(phi.clone(), gamma.clone()).unwrap();
        let (u0, v0) = psi_expansion_term(0, &data).unwrap();
        assert!(max_diff(&u0, &(&phi - &(&gamma * I))) < 1e-15);
        assert!(max_diff(&v0, &(&phi + &(&gamma * I)).conj()) < 1e-15);

        let (u1, v1) = psi_expansion_term(1, &data).unwrap();
        assert!((u1.coeff(1) - c(0.0, 0.5)).norm() < 1e-15);
        assert!((v1.coeff(-1) - c(0.0, 0.5)).norm() < 1e-15);

        let data0 = InitialData::new(phi, Field::zeros(&g)).unwrap();
        let (a, b) = psi_expansion_term(1, &data0).unwrap();
        assert_eq!(a.coeff_norm_sq() + b.coeff_norm_sq(), 0.0);
        assert!(matches!(
            psi_expansion_term(2, &data0),
            Err(KgError::Unsupported(_))
        ));
    }

    #[test]
    fn taylor_coefficient_values() {
        assert_eq!(taylor_coefficient(TaylorKind::Alpha, 1), 0.5);
        assert_eq!(taylor_coefficient(TaylorKind::Alpha, 2), -0.125);
        assert_eq!(taylor_coefficient(TaylorKind::Alpha, 3), 0.0625);
        assert_eq!(taylor_coefficient(TaylorKind::Beta, 1), -0.5);
        assert_eq!(taylor_coefficient(TaylorKind::Beta, 2), 0.375);
    }

    /// Cauchy-integral oracle: `a_n = (1/M) Σ_j g(r ω^j) ω^{-jn} / rⁿ`.
    fn cauchy_coefficients(g: impl Fn(Complex64) -> Complex64, count: usize) -> Vec<f64> {
        let m = 128;
        let r = 0.5;
        (0..count)
            .map(|n| {
                let s: Complex64 = (0..m)
                    .map(|j| {
                        let w = Complex64::from_polar(1.0, 2.0 * PI * j as f64 / m as f64);
                        g(w * r) * w.powi(-(n as i32))
                    })
                    .sum();
                (s / (m as f64 * r.powi(n as i32))).re
            })
            .collect()
    }

    #[test]
    fn taylor_coefficients_match_series_oracle() {
        let alpha = cauchy_coefficients(|x| (x + 1.0).sqrt(), 8);
        let beta = cauchy_coefficients(|x| 1.0 / (x + 1.0).sqrt(), 8);
        for n in 1..8u32 {
            assert!((taylor_coefficient(TaylorKind::Alpha, n) - alpha[n as usize]).abs() < 1e-10);
            assert!((taylor_coefficient(TaylorKind::Beta, n) - beta[n as usize]).abs() < 1e-10);
        }
        // c⁻² term of c√(k²+c²) at k = 1 is −k⁴/(8c²); of c⟨∇⟩⁻¹ is −k²/(2c²) = Δ/(2c²).
        let cc = 1.0e3_f64;
        let direct = cc * (1.0 + cc * cc).sqrt() - cc * cc - 0.5;
        assert_relative_eq!(direct * cc * cc, -0.125, epsilon = 1e-4);
    }

    #[test]
    fn exact_linear_examples() {
        let g = make_grid(4).unwrap();
        let one = Field::constant(&g, c(1.0, 0.0));
        let data = InitialData::new(one, Field::zeros(&g)).unwrap();
        let p = KgParams::new(3.0, 0.0, 0).unwrap();
        let z = exact_linear_solution(&data, &p, 0.7).unwrap();
        assert!((z.coeff(0) - c((9.0f64 * 0.7).cos(), 0.0)).norm() < 1e-14);

        let phi = Field::from_modes(&g, &[(1, c(1.0, 0.0))]).unwrap();
        let gamma = Field::from_modes(&g, &[(1, c(0.5, 0.0))]).unwrap();
        let data = InitialData::new(phi.clone(), gamma).unwrap();
        let p = KgParams::new(10.0, -1.0, 0).unwrap();
        assert!(max_diff(&exact_linear_solution(&data, &p, 0.0).unwrap(), &phi) < 1e-15);
        let root = (1.0f64 + 100.0 + 1.0).sqrt();
        let expected = (10.0 * 0.3 * root).cos() + 10.0 / root * 0.5 * (10.0 * 0.3 * root).sin();
        let z = exact_linear_solution(&data, &p, 0.3).unwrap();
        assert!((z.coeff(1) - c(expected, 0.0)).norm() < 1e-13);
    }

    #[test]
    fn exact_linear_errors() {
        let g = make_grid(4).unwrap();
        let data = InitialData::new(Field::constant(&g, c(1.0, 0.0)), Field::zeros(&g)).unwrap();
        let p = KgParams::new(1.0, 2.0, 0).unwrap();
        assert!(matches!(
            exact_linear_solution(&data, &p, 0.1),
            Err(KgError::DegenerateFrequency { mode: 0, .. })
        ));
        let p = KgParams::new(1.0, 0.0, 1).unwrap();
        assert!(exact_linear_solution(&data, &p, 0.1).is_err());
    }

    #[test]
    fn exact_linear_satisfies_pde_per_mode() {
        // Analytic second derivative: ẑ_tt = −ω² ẑ, so the residual is
        // (−ω²/c² + a² + c² − λ) ẑ per mode.
        let g = make_grid(8).unwrap();
        let phi = Field::from_modes(&g, &[(1, c(0.4, 0.2)), (-5, c(0.1, 0.0))]).unwrap();
        let gamma = Field::from_modes(&g, &[(1, c(0.0, 1.0)), (3, c(0.3, 0.3))]).unwrap();
        let data = InitialData::new(phi, gamma).unwrap();
        for cc in [2.0, 16.0, 100.0] {
            let p = KgParams::new(cc, -1.0, 0).unwrap();
            let z = exact_linear_solution(&data, &p, 0.37).unwrap();
            for a in g.modes() {
                let af = a as f64;
                let omega = cc * (af * af + cc * cc + 1.0).sqrt();
                let coef = z.coeff(a);
                let residual = coef * (-omega * omega / (cc * cc) + af * af + cc * cc + 1.0);
                assert!(residual.norm() <= 1e-10, "mode {a}, c {cc}");
            }
        }
    }
}
