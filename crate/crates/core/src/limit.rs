//! The c-independent limit system `i∂_t w₀ = ½Δw₀ + ⟨F⟩(w₀)` and the
//! correction equations for `ξ₁` (and `η₁` in the linear case), with their
//! splitting integrators.

use std::f64::consts::PI;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{KgError, Result};
use crate::model::{nonlinearity_value, InitialData, KgParams};
use crate::spectral::{Bilaplacian, Field, Laplacian, SchrodingerPhase};
use crate::stepping::{align_steps, should_store, Trajectory};

const I: Complex64 = Complex64 { re: 0.0, im: 1.0 };

/// Limit unknowns `w₀ = (u₀, v₀)`.
#[derive(Debug, Clone)]
pub struct NlsPair {
    pub u0: Field,
    pub v0: Field,
    pub t: f64,
}

impl NlsPair {
    pub fn new(u0: Field, v0: Field, t: f64) -> Result<Self> {
        u0.same_grid(&v0)?;
        Ok(NlsPair { u0, v0, t })
    }

    /// `w₀(0) = ψ₀ = (φ − iγ, φ̄ − iγ̄)`.
    pub fn initial(data: &InitialData) -> Self {
        let u0 = &data.phi - &(&data.gamma * I);
        let v0 = (&data.phi + &(&data.gamma * I)).conj();
        NlsPair { u0, v0, t: 0.0 }
    }
}

/// Correction unknowns. In the cubic real case `η₁ ≡ ξ₁`.
#[derive(Debug, Clone)]
pub struct CorrectionState {
    pub xi1: Field,
    pub eta1: Field,
    pub t: f64,
}

/// Coefficient of `λΔ(|u₀|²u₀)` in the `ξ₁` forcing.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum G0Variant {
    #[default]
    #[serde(rename = "derived_3_16")]
    Derived3_16,
    #[serde(rename = "paper_3_32")]
    Alt3_32,
}

impl G0Variant {
    pub fn coefficient(self) -> f64 {
        match self {
            G0Variant::Derived3_16 => 3.0 / 16.0,
            G0Variant::Alt3_32 => 3.0 / 32.0,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            G0Variant::Derived3_16 => "derived_3_16",
            G0Variant::Alt3_32 => "paper_3_32",
        }
    }

    pub fn other(self) -> Self {
        match self {
            G0Variant::Derived3_16 => G0Variant::Alt3_32,
            G0Variant::Alt3_32 => G0Variant::Derived3_16,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SplittingConfig {
    pub tau: f64,
    pub quadrature_nodes: usize,
    /// Steps between stored snapshots; zero keeps only the endpoints.
    pub snapshot_stride: usize,
    pub g0_variant: G0Variant,
}

impl SplittingConfig {
    pub fn new(tau: f64) -> Self {
        SplittingConfig {
            tau,
            quadrature_nodes: 8,
            snapshot_stride: 0,
            g0_variant: G0Variant::default(),
        }
    }

    pub fn validate(&self, p: u32) -> Result<()> {
        if !(self.tau.is_finite() && self.tau > 0.0) {
            return Err(KgError::Config(format!(
                "tau must be positive, got {}",
                self.tau
            )));
        }
        check_nodes(self.quadrature_nodes, p)
    }
}

fn check_nodes(m: usize, p: u32) -> Result<()> {
    let need = 2 * p as usize + 2;
    if m < need {
        return Err(KgError::Config(format!(
            "averaging needs at least {need} quadrature nodes for p = {p}, got {m}"
        )));
    }
    Ok(())
}

/// `⟨F⟩(w₀)`: the θ-average of `(f(½(u₀ + e^{−2iθ}v̄₀)), f(½(v₀ + e^{−2iθ}ū₀)))`.
///
/// The integrand is a trigonometric polynomial in `2θ` of degree `p + 1`, so
/// `M` equispaced nodes in `2θ ∈ [0, 2π)` integrate it exactly.
pub fn averaged_nonlinearity(w: &NlsPair, lambda: f64, p: u32, m: usize) -> Result<(Field, Field)> {
    check_nodes(m, p)?;
    let u = w.u0.values();
    let v = w.v0.values();
    let nodes: Vec<Complex64> = (0..m)
        .map(|j| Complex64::from_polar(1.0, -2.0 * PI * j as f64 / m as f64))
        .collect();
    let weight = 1.0 / m as f64;
    let mut first = Vec::with_capacity(u.len());
    let mut second = Vec::with_capacity(u.len());
    for (a, b) in u.iter().zip(&v) {
        let (mut s1, mut s2) = (Complex64::default(), Complex64::default());
        for e in &nodes {
            s1 += nonlinearity_value(0.5 * (a + e * b.conj()), lambda, p);
            s2 += nonlinearity_value(0.5 * (b + e * a.conj()), lambda, p);
        }
        first.push(s1 * weight);
        second.push(s2 * weight);
    }
    let grid = w.u0.grid();
    Ok((
        Field::from_nonlinear_values(grid, &first)?,
        Field::from_nonlinear_values(grid, &second)?,
    ))
}

fn binom(n: u32, k: u32) -> f64 {
    (0..k).fold(1.0, |acc, j| acc * (n - j) as f64 / (j + 1) as f64)
}

/// Real multiplier `g` with `⟨F⟩₁ = g(|u₀|, |v₀|)·u₀`, expanded so that it
/// stays regular where `u₀` vanishes. For `p = 1` this is `(λ/8)(r² + 2s²)`.
pub fn averaged_multiplier(r: f64, s: f64, lambda: f64, p: u32) -> f64 {
    let q = r * r + s * s;
    let m = r * s;
    let mut even = 0.0;
    let mut odd = 0.0;
    for j in 0..=p {
        let base = binom(p, j) * q.powi((p - j) as i32);
        if j % 2 == 0 {
            even += base * m.powi(j as i32) * binom(j, j / 2);
        } else {
            odd += base * r.powi(j as i32 - 1) * s.powi(j as i32) * binom(j, j.div_ceil(2));
        }
    }
    lambda * 0.25f64.powi(p as i32) * 0.5 * (even + s * odd)
}

/// Exact potential flow over `tau`: moduli are invariant, so each component
/// is rotated pointwise by its frozen multiplier.
pub fn potential_flow(w: &NlsPair, lambda: f64, p: u32, tau: f64) -> NlsPair {
    let u = w.u0.values();
    let v = w.v0.values();
    let mut nu = Vec::with_capacity(u.len());
    let mut nv = Vec::with_capacity(u.len());
    for (a, b) in u.iter().zip(&v) {
        let (r, s) = (a.norm(), b.norm());
        nu.push(a * Complex64::from_polar(1.0, -tau * averaged_multiplier(r, s, lambda, p)));
        nv.push(b * Complex64::from_polar(1.0, -tau * averaged_multiplier(s, r, lambda, p)));
    }
    let grid = w.u0.grid();
    NlsPair {
        u0: Field::from_values(grid, &nu).expect("same grid"),
        v0: Field::from_values(grid, &nv).expect("same grid"),
        t: w.t + tau,
    }
}

/// Exact flow of `i∂_t w = ½Δw`.
pub fn kinetic_flow(w: &NlsPair, tau: f64) -> NlsPair {
    let phase = SchrodingerPhase { t: tau };
    NlsPair {
        u0: w.u0.apply(&phase),
        v0: w.v0.apply(&phase),
        t: w.t + tau,
    }
}

/// Strang step `Φ_P^{τ/2} ∘ Φ_T^τ ∘ Φ_P^{τ/2}`. Negative `tau` runs backwards.
pub fn strang_step_nls(w: &NlsPair, params: &KgParams, tau: f64) -> NlsPair {
    let half = potential_flow(w, params.lambda, params.p, 0.5 * tau);
    let mid = kinetic_flow(&half, tau);
    let mut out = potential_flow(&mid, params.lambda, params.p, 0.5 * tau);
    out.t = w.t + tau;
    out
}

/// Strang integration of the limit system from `w0` over `[w0.t, w0.t + t_span]`.
pub fn solve_nls(
    w0: &NlsPair,
    params: &KgParams,
    config: &SplittingConfig,
    t_span: f64,
) -> Result<Trajectory<NlsPair>> {
    config.validate(params.p)?;
    let (steps, tau) = align_steps(t_span, config.tau)?;
    let mut snapshots = vec![w0.clone()];
    let mut w = w0.clone();
    for n in 1..=steps {
        w = strang_step_nls(&w, params, tau);
        w.t = w0.t + n as f64 * tau;
        if should_store(n, steps, config.snapshot_stride) {
            snapshots.push(w.clone());
        }
    }
    Ok(Trajectory {
        tau,
        steps,
        stride: config.snapshot_stride,
        snapshots,
    })
}

fn linear_rate(a: i64, lambda: f64) -> f64 {
    0.5 * ((a * a) as f64 - lambda)
}

/// Closed-form limit pair of the linear problem: `û₀,a(t) = û₀,a(0)e^{i(a²−λ)t/2}`.
pub fn linear_u0_exact(data: &InitialData, lambda: f64, t: f64) -> NlsPair {
    let w = NlsPair::initial(data);
    let phase = move |k: i64| Complex64::from_polar(1.0, linear_rate(k, lambda) * t);
    NlsPair {
        u0: w.u0.apply(&phase),
        v0: w.v0.apply(&phase),
        t,
    }
}

/// Closed-form linear correction `z₁` per mode, with `ω = c² + ½(a²−λ)`.
pub fn linear_correction_exact(data: &InitialData, lambda: f64, c: f64, t: f64) -> Field {
    let grid = data.grid();
    let fast = (c * c * t).rem_euclid(2.0 * PI);
    let mut z1 = Field::zeros(grid);
    for i in 0..grid.num_points() {
        let a = grid.mode_at(i);
        let nu = linear_rate(a, lambda);
        let (s, co) = (fast + nu * t).sin_cos();
        let secular = nu * nu * t / 2.0;
        let phi = data.phi.coeffs()[i];
        let gamma = data.gamma.coeffs()[i];
        z1.coeffs_mut()[i] = phi * (secular * s) + gamma * (-nu * s - secular * co);
    }
    z1
}

/// Closed-form `(ξ₁, η₁)` of the linear correction equations. The forcing is
/// resonant with the free flow, hence the secular `t`-term.
pub fn linear_xi1_exact(data: &InitialData, lambda: f64, t: f64) -> CorrectionState {
    let w = NlsPair::initial(data);
    let grid = data.grid();
    let (mut xi, mut eta) = (Field::zeros(grid), Field::zeros(grid));
    let u_bar = w.u0.conj();
    let v_bar = w.v0.conj();
    for i in 0..grid.num_points() {
        let a = grid.mode_at(i);
        let a2 = (a * a) as f64;
        let nu = linear_rate(a, lambda);
        let rot = Complex64::from_polar(1.0, nu * t);
        let drift = -0.5 * I * nu * nu * t;
        let xi0 = 0.25 * (-a2 * w.u0.coeffs()[i] - (lambda - a2) * v_bar.coeffs()[i]);
        let eta0 = 0.25 * (-a2 * w.v0.coeffs()[i] - (lambda - a2) * u_bar.coeffs()[i]);
        xi.coeffs_mut()[i] = (xi0 + drift * w.u0.coeffs()[i]) * rot;
        eta.coeffs_mut()[i] = (eta0 + drift * w.v0.coeffs()[i]) * rot;
    }
    CorrectionState {
        xi1: xi,
        eta1: eta,
        t,
    }
}

fn pointwise(u: &Field, f: impl Fn(Complex64) -> Complex64) -> Field {
    let values: Vec<Complex64> = u.values().into_iter().map(f).collect();
    Field::from_nonlinear_values(u.grid(), &values).expect("same grid")
}

/// Cubic `ξ₁` forcing `g₀ = ⅛Δ²u₀ + λ²(51/256)|u₀|⁴u₀ + κλΔ(|u₀|²u₀)`.
pub fn xi1_forcing_g0(u0: &Field, lambda: f64, variant: G0Variant) -> Field {
    let quintic = pointwise(u0, |z| z * z.norm_sqr().powi(2));
    let cubic = pointwise(u0, |z| z * z.norm_sqr());
    let mut g = &u0.apply(&Bilaplacian) * 0.125;
    g = &g + &(&quintic * (lambda * lambda * 51.0 / 256.0));
    &g + &(&cubic.apply(&Laplacian) * (variant.coefficient() * lambda))
}

/// Cubic initial value
/// `ξ₁(0) = (λ/16)u₀³ − (λ/32)ū₀³ − (3λ/16)|u₀|²ū₀ + ¼Δ(u₀ − ū₀)`.
pub fn xi1_initial_cubic(u0: &Field, lambda: f64) -> Field {
    let poly = pointwise(u0, |z| {
        let zb = z.conj();
        lambda / 16.0 * z * z * z
            - lambda / 32.0 * zb * zb * zb
            - 3.0 * lambda / 16.0 * z.norm_sqr() * zb
    });
    &poly + &(&(u0 - &u0.conj()).apply(&Laplacian) * 0.25)
}

pub type Mat2 = [[f64; 2]; 2];

/// Frozen linear part of the `ξ₁` potential equation in `(Re ξ, Im ξ)`.
pub fn potential_matrix(alpha0: f64, beta0: f64, lambda: f64) -> Mat2 {
    let s = 3.0 * lambda / 8.0;
    [
        [
            s * 2.0 * alpha0 * beta0,
            s * (alpha0 * alpha0 + 3.0 * beta0 * beta0),
        ],
        [
            -s * (3.0 * alpha0 * alpha0 + beta0 * beta0),
            -s * 2.0 * alpha0 * beta0,
        ],
    ]
}

/// `exp(A)` for traceless `A`, using `A² = μ²I` with `μ² = −det A`.
pub fn expm2_traceless(a: &Mat2) -> Mat2 {
    let mu2 = -(a[0][0] * a[1][1] - a[0][1] * a[1][0]);
    let (ch, sh) = if mu2.abs() < 1e-12 {
        // cosh(μ) and sinh(μ)/μ as series in μ².
        (
            1.0 + mu2 / 2.0 + mu2 * mu2 / 24.0,
            1.0 + mu2 / 6.0 + mu2 * mu2 / 120.0,
        )
    } else if mu2 > 0.0 {
        let mu = mu2.sqrt();
        (mu.cosh(), mu.sinh() / mu)
    } else {
        let nu = (-mu2).sqrt();
        (nu.cos(), nu.sin() / nu)
    };
    [
        [ch + sh * a[0][0], sh * a[0][1]],
        [sh * a[1][0], ch + sh * a[1][1]],
    ]
}

fn forcing_vector(g: Complex64) -> [f64; 2] {
    [g.im, -g.re]
}

/// One exponential trapezoidal step of the `ξ₁` potential equation
/// `∂_t(α, β) = A(u₀)(α, β) + (Im g₀, −Re g₀)`.
pub fn exp_trapezoidal_potential_step(
    xi: &Field,
    u0_n: &Field,
    u0_np1: &Field,
    lambda: f64,
    tau: f64,
    variant: G0Variant,
) -> Result<Field> {
    xi.same_grid(u0_n)?;
    xi.same_grid(u0_np1)?;
    let g_n = xi1_forcing_g0(u0_n, lambda, variant).values();
    let g_np1 = xi1_forcing_g0(u0_np1, lambda, variant).values();
    let un = u0_n.values();
    let unp1 = u0_np1.values();
    let x = xi.values();
    let h = 0.5 * tau;
    let mut out = Vec::with_capacity(x.len());
    for j in 0..x.len() {
        let a0 = potential_matrix(un[j].re, un[j].im, lambda);
        let a1 = potential_matrix(unp1[j].re, unp1[j].im, lambda);
        let mut m = [[0.0; 2]; 2];
        for r in 0..2 {
            for s in 0..2 {
                m[r][s] = h * (a0[r][s] + a1[r][s]);
            }
        }
        let e = expm2_traceless(&m);
        let f0 = forcing_vector(g_n[j]);
        let f1 = forcing_vector(g_np1[j]);
        let y = [x[j].re + h * f0[0], x[j].im + h * f0[1]];
        let re = e[0][0] * y[0] + e[0][1] * y[1] + h * f1[0];
        let im = e[1][0] * y[0] + e[1][1] * y[1] + h * f1[1];
        out.push(Complex64::new(re, im));
    }
    Field::from_values(xi.grid(), &out)
}

/// Strang integration of the cubic `ξ₁` equation driven by a limit trajectory
/// that stores every step. Needs real initial data (`u₀ = v₀`).
pub fn solve_xi1_cubic(
    u0_traj: &Trajectory<NlsPair>,
    data: &InitialData,
    lambda: f64,
    config: &SplittingConfig,
    t_span: f64,
) -> Result<Trajectory<CorrectionState>> {
    if !data.is_real(1e-12) {
        return Err(KgError::Unsupported(
            "the cubic correction needs real initial data (u0 = v0)".into(),
        ));
    }
    let (steps, tau) = align_steps(t_span, config.tau)?;
    if u0_traj.steps != steps
        || (u0_traj.tau - tau).abs() > 1e-14 * tau
        || u0_traj.snapshots.len() != steps + 1
    {
        return Err(KgError::Scheduling(format!(
            "limit trajectory must store all {} step endpoints at tau = {tau:e}, got {} snapshots at tau = {:e}",
            steps + 1,
            u0_traj.snapshots.len(),
            u0_traj.tau
        )));
    }
    let t0 = u0_traj.first().t;
    let mut xi = xi1_initial_cubic(&u0_traj.first().u0, lambda);
    let half = SchrodingerPhase { t: 0.5 * tau };
    let mut snapshots = vec![CorrectionState {
        xi1: xi.clone(),
        eta1: xi.clone(),
        t: t0,
    }];
    for n in 1..=steps {
        let pre = xi.apply(&half);
        let mid = exp_trapezoidal_potential_step(
            &pre,
            &u0_traj.snapshots[n - 1].u0,
            &u0_traj.snapshots[n].u0,
            lambda,
            tau,
            config.g0_variant,
        )?;
        xi = mid.apply(&half);
        if should_store(n, steps, config.snapshot_stride) {
            snapshots.push(CorrectionState {
                xi1: xi.clone(),
                eta1: xi.clone(),
                t: t0 + n as f64 * tau,
            });
        }
    }
    Ok(Trajectory {
        tau,
        steps,
        stride: config.snapshot_stride,
        snapshots,
    })
}
