//! One-dimensional Fourier pseudo-spectral foundation on the 2π-torus.
//!
//! A [`SpectralGrid`] with `K` modes carries `2K` equispaced points
//! `x_j = jπ/K` on `[0, 2π)` and the frequency set `{-K, …, K-1}`.
//! A [`Field`] stores Fourier coefficients normalized so that
//! `u(x) = Σ_k û_k e^{ikx}`, i.e. `û_k = (2π)^{-1} ∫ e^{-ikx} u(x) dx`.
//! Grid values are computed on demand.

use std::f64::consts::{PI, TAU};
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};
use std::sync::Arc;

use num_complex::Complex64;
use rustfft::{Fft, FftPlanner};

use crate::error::{KgError, Result};

pub type Grid = Arc<SpectralGrid>;

pub struct SpectralGrid {
    num_modes: usize,
    dealias: bool,
    forward: Arc<dyn Fft<f64>>,
    inverse: Arc<dyn Fft<f64>>,
}

impl fmt::Debug for SpectralGrid {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("SpectralGrid")
            .field("num_modes", &self.num_modes)
            .field("dealias", &self.dealias)
            .finish()
    }
}

impl PartialEq for SpectralGrid {
    fn eq(&self, other: &Self) -> bool {
        self.num_modes == other.num_modes && self.dealias == other.dealias
    }
}

/// Builds a grid with `k` modes (`2k` points). `k` must be a power of two, at least 2.
pub fn make_grid(k: usize) -> Result<Grid> {
    SpectralGrid::new(k, false)
}

impl SpectralGrid {
    /// With `dealias` set, every pointwise nonlinear evaluation is followed by
    /// the 2/3-rule truncation of modes `|k| > 2K/3`.
    pub fn new(num_modes: usize, dealias: bool) -> Result<Grid> {
        if num_modes < 2 || !num_modes.is_power_of_two() {
            return Err(KgError::Config(format!(
                "number of modes must be a power of two >= 2, got {num_modes}"
            )));
        }
        let mut planner = FftPlanner::new();
        let n = 2 * num_modes;
        Ok(Arc::new(SpectralGrid {
            num_modes,
            dealias,
            forward: planner.plan_fft_forward(n),
            inverse: planner.plan_fft_inverse(n),
        }))
    }

    pub fn num_modes(&self) -> usize {
        self.num_modes
    }

    pub fn num_points(&self) -> usize {
        2 * self.num_modes
    }

    pub fn dealias(&self) -> bool {
        self.dealias
    }

    pub fn domain_length(&self) -> f64 {
        TAU
    }

    /// Distance between neighbouring grid points, `π/K`.
    pub fn spacing(&self) -> f64 {
        PI / self.num_modes as f64
    }

    /// Dimensionless mesh size `h = 1/K`.
    pub fn mesh_size(&self) -> f64 {
        1.0 / self.num_modes as f64
    }

    pub fn points(&self) -> Vec<f64> {
        let dx = self.spacing();
        (0..self.num_points()).map(|j| j as f64 * dx).collect()
    }

    /// Modes in ascending order `-K, …, K-1`.
    pub fn modes(&self) -> impl Iterator<Item = i64> {
        let k = self.num_modes as i64;
        -k..k
    }

    /// Mode carried by storage slot `index` (FFT ordering).
    pub fn mode_at(&self, index: usize) -> i64 {
        if index < self.num_modes {
            index as i64
        } else {
            index as i64 - self.num_points() as i64
        }
    }

    /// Storage slot of mode `k`, if `k` is representable.
    pub fn index_of(&self, k: i64) -> Option<usize> {
        let kk = self.num_modes as i64;
        if (-kk..kk).contains(&k) {
            Some(k.rem_euclid(2 * kk) as usize)
        } else {
            None
        }
    }

    fn check_len(&self, len: usize) -> Result<()> {
        if len != self.num_points() {
            return Err(KgError::Shape {
                expected: self.num_points(),
                found: len,
            });
        }
        Ok(())
    }

    /// Grid values to Fourier coefficients (divided by `2K`).
    pub fn forward(&self, values: &[Complex64]) -> Result<Vec<Complex64>> {
        self.check_len(values.len())?;
        let mut buf = values.to_vec();
        self.forward.process(&mut buf);
        let scale = 1.0 / self.num_points() as f64;
        buf.iter_mut().for_each(|c| *c *= scale);
        Ok(buf)
    }

    pub fn inverse(&self, coeffs: &[Complex64]) -> Result<Vec<Complex64>> {
        self.check_len(coeffs.len())?;
        let mut buf = coeffs.to_vec();
        self.inverse.process(&mut buf);
        Ok(buf)
    }

    /// Trapezoidal quadrature `(2π/2K) Σ_j values_j`, exact for trigonometric
    /// polynomials of degree below `2K`.
    pub fn torus_integral(&self, values: &[Complex64]) -> Result<Complex64> {
        self.check_len(values.len())?;
        let sum: Complex64 = values.iter().sum();
        Ok(sum * (TAU / self.num_points() as f64))
    }
}

/// A diagonal Fourier multiplier: mode `k` is scaled by `eval(k)`.
pub trait MultiplierSymbol {
    fn eval(&self, k: i64) -> Complex64;
}

impl<F> MultiplierSymbol for F
where
    F: Fn(i64) -> Complex64,
{
    fn eval(&self, k: i64) -> Complex64 {
        self(k)
    }
}

/// `⟨∇⟩_c = √(-Δ + c²)`.
#[derive(Debug, Clone, Copy)]
pub struct Bracket {
    pub c: f64,
}

impl MultiplierSymbol for Bracket {
    fn eval(&self, k: i64) -> Complex64 {
        let k = k as f64;
        Complex64::new((k * k + self.c * self.c).sqrt(), 0.0)
    }
}

/// `c⟨∇⟩_c⁻¹`, bounded by one in modulus for every mode.
#[derive(Debug, Clone, Copy)]
pub struct ScaledInverseBracket {
    pub c: f64,
}

impl MultiplierSymbol for ScaledInverseBracket {
    fn eval(&self, k: i64) -> Complex64 {
        let k = k as f64;
        Complex64::new(self.c / (k * k + self.c * self.c).sqrt(), 0.0)
    }
}

#[derive(Debug, Clone, Copy)]
pub struct Derivative;

impl MultiplierSymbol for Derivative {
    fn eval(&self, k: i64) -> Complex64 {
        Complex64::new(0.0, k as f64)
    }
}

#[derive(Debug, Clone, Copy)]
pub struct Laplacian;

impl MultiplierSymbol for Laplacian {
    fn eval(&self, k: i64) -> Complex64 {
        Complex64::new(-((k * k) as f64), 0.0)
    }
}

#[derive(Debug, Clone, Copy)]
pub struct Bilaplacian;

impl MultiplierSymbol for Bilaplacian {
    fn eval(&self, k: i64) -> Complex64 {
        let k2 = (k * k) as f64;
        Complex64::new(k2 * k2, 0.0)
    }
}

/// Linear Klein-Gordon flow `e^{itc⟨∇⟩_c}`.
#[derive(Debug, Clone, Copy)]
pub struct KgPhase {
    pub c: f64,
    pub t: f64,
}

impl MultiplierSymbol for KgPhase {
    fn eval(&self, k: i64) -> Complex64 {
        kg_phase_symbol(k, self.c, self.t)
    }
}

/// Exact flow of the free Schrödinger equation `i∂_t w = ½Δw`, i.e. `e^{ik²t/2}`.
#[derive(Debug, Clone, Copy)]
pub struct SchrodingerPhase {
    pub t: f64,
}

impl MultiplierSymbol for SchrodingerPhase {
    fn eval(&self, k: i64) -> Complex64 {
        Complex64::from_polar(1.0, 0.5 * (k * k) as f64 * self.t)
    }
}

pub fn kg_phase_symbol(k: i64, c: f64, t: f64) -> Complex64 {
    let k = k as f64;
    Complex64::from_polar(1.0, t * c * (k * k + c * c).sqrt())
}

/// Complex periodic function stored by its Fourier coefficients.
#[derive(Clone)]
pub struct Field {
    grid: Grid,
    coeffs: Vec<Complex64>,
}

impl fmt::Debug for Field {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Field")
            .field("num_modes", &self.grid.num_modes)
            .field("coeffs", &self.coeffs)
            .finish()
    }
}

impl Field {
    pub fn zeros(grid: &Grid) -> Self {
        Field {
            grid: Arc::clone(grid),
            coeffs: vec![Complex64::new(0.0, 0.0); grid.num_points()],
        }
    }

    pub fn constant(grid: &Grid, value: Complex64) -> Self {
        let mut f = Field::zeros(grid);
        f.coeffs[0] = value;
        f
    }

    /// Coefficients in FFT storage order (see [`SpectralGrid::mode_at`]).
    pub fn from_coeffs(grid: &Grid, coeffs: Vec<Complex64>) -> Result<Self> {
        grid.check_len(coeffs.len())?;
        Ok(Field {
            grid: Arc::clone(grid),
            coeffs,
        })
    }

    pub fn from_values(grid: &Grid, values: &[Complex64]) -> Result<Self> {
        let coeffs = grid.forward(values)?;
        Ok(Field {
            grid: Arc::clone(grid),
            coeffs,
        })
    }

    /// Samples `f` at the grid points.
    pub fn from_fn(grid: &Grid, f: impl Fn(f64) -> Complex64) -> Self {
        let values: Vec<Complex64> = grid.points().into_iter().map(f).collect();
        Field::from_values(grid, &values).expect("sampled on the grid")
    }

    /// Builds a trigonometric polynomial from `(mode, coefficient)` pairs.
    /// Repeated modes accumulate.
    pub fn from_modes(grid: &Grid, modes: &[(i64, Complex64)]) -> Result<Self> {
        let mut f = Field::zeros(grid);
        for &(k, c) in modes {
            let idx = grid.index_of(k).ok_or_else(|| {
                KgError::Config(format!(
                    "mode {k} outside the representable range [-{n}, {n})",
                    n = grid.num_modes
                ))
            })?;
            f.coeffs[idx] += c;
        }
        Ok(f)
    }

    pub fn grid(&self) -> &Grid {
        &self.grid
    }

    pub fn coeffs(&self) -> &[Complex64] {
        &self.coeffs
    }

    pub fn coeffs_mut(&mut self) -> &mut [Complex64] {
        &mut self.coeffs
    }

    /// Coefficient of mode `k`; zero if `k` is not representable.
    pub fn coeff(&self, k: i64) -> Complex64 {
        self.grid
            .index_of(k)
            .map(|i| self.coeffs[i])
            .unwrap_or_default()
    }

    pub fn values(&self) -> Vec<Complex64> {
        self.grid
            .inverse(&self.coeffs)
            .expect("coefficients sized by grid")
    }

    pub fn same_grid(&self, other: &Field) -> Result<()> {
        if Arc::ptr_eq(&self.grid, &other.grid) || *self.grid == *other.grid {
            Ok(())
        } else {
            Err(KgError::GridMismatch)
        }
    }

    pub fn apply(&self, symbol: &impl MultiplierSymbol) -> Field {
        let coeffs = self
            .coeffs
            .iter()
            .enumerate()
            .map(|(i, &c)| symbol.eval(self.grid.mode_at(i)) * c)
            .collect();
        Field {
            grid: Arc::clone(&self.grid),
            coeffs,
        }
    }

    /// Complex conjugate in physical space: `conj(u)_k = conj(û_{-k})`,
    /// with the Nyquist mode `-K` mapped onto itself.
    pub fn conj(&self) -> Field {
        let n = self.grid.num_points();
        let coeffs = (0..n).map(|i| self.coeffs[(n - i) % n].conj()).collect();
        Field {
            grid: Arc::clone(&self.grid),
            coeffs,
        }
    }

    pub fn scale(&self, a: Complex64) -> Field {
        Field {
            grid: Arc::clone(&self.grid),
            coeffs: self.coeffs.iter().map(|&c| c * a).collect(),
        }
    }

    /// `a·self + b·other`.
    pub fn lincomb(&self, a: Complex64, other: &Field, b: Complex64) -> Field {
        debug_assert!(self.same_grid(other).is_ok());
        Field {
            grid: Arc::clone(&self.grid),
            coeffs: self
                .coeffs
                .iter()
                .zip(&other.coeffs)
                .map(|(&x, &y)| a * x + b * y)
                .collect(),
        }
    }

    /// Pointwise linear map in physical space; no truncation is applied.
    pub fn map_values(&self, f: impl Fn(Complex64) -> Complex64) -> Field {
        let values: Vec<Complex64> = self.values().into_iter().map(f).collect();
        Field::from_values(&self.grid, &values).expect("same grid")
    }

    /// Builds a field from values produced by a nonlinear pointwise
    /// evaluation, applying the grid's dealiasing rule.
    pub fn from_nonlinear_values(grid: &Grid, values: &[Complex64]) -> Result<Field> {
        let mut f = Field::from_values(grid, values)?;
        if grid.dealias {
            let cutoff = (2 * grid.num_modes) as i64 / 3;
            for i in 0..f.coeffs.len() {
                if grid.mode_at(i).abs() > cutoff {
                    f.coeffs[i] = Complex64::new(0.0, 0.0);
                }
            }
        }
        Ok(f)
    }

    /// Squared coefficient norm `Σ_k |û_k|²`.
    pub fn coeff_norm_sq(&self) -> f64 {
        self.coeffs.iter().map(|c| c.norm_sqr()).sum()
    }

    /// `‖u‖²_{L²} = ∫|u|² dx = 2π Σ_k |û_k|²`.
    pub fn l2_norm_sq(&self) -> f64 {
        TAU * self.coeff_norm_sq()
    }

    pub fn l2_norm(&self) -> f64 {
        self.l2_norm_sq().sqrt()
    }

    /// `∫ u v̄ dx`.
    pub fn inner(&self, other: &Field) -> Complex64 {
        let s: Complex64 = self
            .coeffs
            .iter()
            .zip(&other.coeffs)
            .map(|(a, b)| a * b.conj())
            .sum();
        s * TAU
    }

    pub fn max_abs_value(&self) -> f64 {
        self.values().iter().map(|v| v.norm()).fold(0.0, f64::max)
    }

    /// True when every grid value has imaginary part below `tol · max(1, ‖u‖_∞)`.
    pub fn is_real(&self, tol: f64) -> bool {
        let values = self.values();
        let scale = values.iter().map(|v| v.norm()).fold(1.0, f64::max);
        values.iter().all(|v| v.im.abs() <= tol * scale)
    }
}

impl Add for &Field {
    type Output = Field;
    fn add(self, rhs: &Field) -> Field {
        self.lincomb(Complex64::new(1.0, 0.0), rhs, Complex64::new(1.0, 0.0))
    }
}

impl Sub for &Field {
    type Output = Field;
    fn sub(self, rhs: &Field) -> Field {
        self.lincomb(Complex64::new(1.0, 0.0), rhs, Complex64::new(-1.0, 0.0))
    }
}

impl Neg for &Field {
    type Output = Field;
    fn neg(self) -> Field {
        self.scale(Complex64::new(-1.0, 0.0))
    }
}

impl Mul<Complex64> for &Field {
    type Output = Field;
    fn mul(self, rhs: Complex64) -> Field {
        self.scale(rhs)
    }
}

impl Mul<f64> for &Field {
    type Output = Field;
    fn mul(self, rhs: f64) -> Field {
        self.scale(Complex64::new(rhs, 0.0))
    }
}

impl Mul<Complex64> for Field {
    type Output = Field;
    fn mul(self, rhs: Complex64) -> Field {
        self.scale(rhs)
    }
}

impl Mul<f64> for Field {
    type Output = Field;
    fn mul(self, rhs: f64) -> Field {
        self.scale(Complex64::new(rhs, 0.0))
    }
}

/// `√(Σ_k (1+|k|)^{2s} |û_k|²)`.
pub fn sobolev_norm(field: &Field, s: f64) -> f64 {
    field
        .coeffs
        .iter()
        .enumerate()
        .map(|(i, c)| {
            let k = field.grid.mode_at(i).unsigned_abs() as f64;
            (1.0 + k).powf(2.0 * s) * c.norm_sqr()
        })
        .sum::<f64>()
        .sqrt()
}

pub fn torus_integral(grid: &SpectralGrid, values: &[Complex64]) -> Result<Complex64> {
    grid.torus_integral(values)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn grid_k2_points_and_modes() {
        let g = make_grid(2).unwrap();
        let pts = g.points();
        let expected = [0.0, PI / 2.0, PI, 3.0 * PI / 2.0];
        for (p, e) in pts.iter().zip(expected) {
            assert_relative_eq!(*p, e, epsilon = 1e-15);
        }
        assert_eq!(g.modes().collect::<Vec<_>>(), vec![-2, -1, 0, 1]);
    }

    #[test]
    fn grid_k16_spacing() {
        let g = make_grid(16).unwrap();
        assert_eq!(g.num_points(), 32);
        assert_relative_eq!(g.spacing(), PI / 16.0);
        assert_relative_eq!(g.mesh_size(), 1.0 / 16.0);
    }

    #[test]
    fn grid_rejects_bad_sizes() {
        assert!(matches!(make_grid(3), Err(KgError::Config(_))));
        assert!(matches!(make_grid(1), Err(KgError::Config(_))));
        assert!(matches!(make_grid(0), Err(KgError::Config(_))));
    }

    #[test]
    fn index_of_roundtrips_mode_at() {
        let g = make_grid(8).unwrap();
        for i in 0..g.num_points() {
            assert_eq!(g.index_of(g.mode_at(i)), Some(i));
        }
        assert_eq!(g.index_of(8), None);
        assert_eq!(g.index_of(-9), None);
    }

    #[test]
    fn forward_of_constant_is_zero_mode() {
        let g = make_grid(4).unwrap();
        let coeffs = g.forward(&[c(1.0, 0.0); 8]).unwrap();
        assert_relative_eq!(coeffs[0].re, 1.0, epsilon = 1e-15);
        for z in &coeffs[1..] {
            assert!(z.norm() < 1e-15);
        }
    }

    #[test]
    fn forward_of_single_exponential() {
        let g = make_grid(4).unwrap();
        let f = Field::from_fn(&g, |x| Complex64::from_polar(1.0, x));
        assert!((f.coeff(1) - c(1.0, 0.0)).norm() < 1e-14);
        for k in g.modes().filter(|&k| k != 1) {
            assert!(f.coeff(k).norm() < 1e-14);
        }
    }

    #[test]
    fn transform_length_mismatch() {
        let g = make_grid(4).unwrap();
        assert!(matches!(
            g.forward(&[c(0.0, 0.0); 7]),
            Err(KgError::Shape {
                expected: 8,
                found: 7
            })
        ));
        assert!(g.inverse(&[c(0.0, 0.0); 9]).is_err());
    }

    #[test]
    fn single_mode_values() {
        let g = make_grid(8).unwrap();
        let a = c(0.3, -1.2);
        let f = Field::from_modes(&g, &[(-3, a)]).unwrap();
        for (v, x) in f.values().iter().zip(g.points()) {
            assert!((v - a * Complex64::from_polar(1.0, -3.0 * x)).norm() < 1e-14);
        }
    }

    #[test]
    fn from_modes_out_of_range() {
        let g = make_grid(4).unwrap();
        assert!(Field::from_modes(&g, &[(4, c(1.0, 0.0))]).is_err());
        assert!(Field::from_modes(&g, &[(-4, c(1.0, 0.0))]).is_ok());
    }

    #[test]
    fn scaled_inverse_bracket_values() {
        let s = ScaledInverseBracket { c: 7.5 };
        assert_eq!(s.eval(0), c(1.0, 0.0));
        for k in -50..50 {
            for cc in [0.1, 1.0, 3.0, 100.0] {
                assert!(ScaledInverseBracket { c: cc }.eval(k).norm() <= 1.0);
            }
        }
    }

    #[test]
    fn bracket_value() {
        let b = Bracket { c: 10.0 };
        assert_relative_eq!(b.eval(3).re, 109f64.sqrt(), epsilon = 1e-14);
        assert_relative_eq!(b.eval(3).re, 10.44031, epsilon = 1e-5);
    }

    #[test]
    fn apply_symbol_is_diagonal() {
        let g = make_grid(4).unwrap();
        let f = Field::from_modes(&g, &[(1, c(1.0, 1.0)), (-2, c(2.0, 0.0))]).unwrap();
        let out = f.apply(&|k: i64| c(k as f64, 0.0));
        assert_eq!(out.coeff(1), c(1.0, 1.0));
        assert_eq!(out.coeff(-2), c(-4.0, 0.0));
        assert_eq!(out.coeff(0), c(0.0, 0.0));
    }

    #[test]
    fn kg_phase_examples() {
        assert_eq!(kg_phase_symbol(3, 4.0, 0.0), c(1.0, 0.0));
        let z = kg_phase_symbol(0, 3.0, 0.2);
        assert!((z - Complex64::from_polar(1.0, 0.2 * 9.0)).norm() < 1e-15);
        let z = kg_phase_symbol(2, 5.0, 0.1);
        assert!((z - Complex64::from_polar(1.0, 0.5 * 29f64.sqrt())).norm() < 1e-15);
        assert_relative_eq!(kg_phase_symbol(7, 13.0, 0.37).norm(), 1.0, epsilon = 1e-15);
    }

    #[test]
    fn sobolev_norm_examples() {
        let g = make_grid(8).unwrap();
        let f = Field::from_modes(&g, &[(-3, c(1.0, 0.0))]).unwrap();
        assert_relative_eq!(sobolev_norm(&f, 1.5), 4f64.powf(1.5), epsilon = 1e-14);
        assert_eq!(sobolev_norm(&Field::zeros(&g), 2.0), 0.0);
        let f = Field::from_modes(&g, &[(0, c(1.0, 0.0)), (2, c(1.0, 0.0))]).unwrap();
        assert_relative_eq!(sobolev_norm(&f, 1.0), 10f64.sqrt(), epsilon = 1e-14);
    }

    #[test]
    fn torus_integral_examples() {
        let g = make_grid(8).unwrap();
        let ones = vec![c(1.0, 0.0); g.num_points()];
        assert_relative_eq!(g.torus_integral(&ones).unwrap().re, TAU, epsilon = 1e-14);
        let e: Vec<_> = g
            .points()
            .iter()
            .map(|&x| Complex64::from_polar(1.0, x))
            .collect();
        assert!(g.torus_integral(&e).unwrap().norm() < 1e-12);
        let cos2: Vec<_> = g
            .points()
            .iter()
            .map(|&x| c(x.cos().powi(2), 0.0))
            .collect();
        assert_relative_eq!(torus_integral(&g, &cos2).unwrap().re, PI, epsilon = 1e-13);
    }

    #[test]
    fn conj_matches_physical_conjugation() {
        let g = make_grid(4).unwrap();
        let f = Field::from_modes(
            &g,
            &[(-4, c(0.5, 0.25)), (1, c(1.0, 2.0)), (3, c(-0.5, 0.1))],
        )
        .unwrap();
        let direct: Vec<_> = f.values().iter().map(|v| v.conj()).collect();
        for (a, b) in f.conj().values().iter().zip(direct) {
            assert!((a - b).norm() < 1e-14);
        }
    }

    #[test]
    fn dealias_truncates_high_modes_only_when_enabled() {
        let g = SpectralGrid::new(8, true).unwrap();
        let vals: Vec<_> = g
            .points()
            .iter()
            .map(|&x| Complex64::from_polar(1.0, 7.0 * x))
            .collect();
        let f = Field::from_nonlinear_values(&g, &vals).unwrap();
        assert!(f.coeff(7).norm() < 1e-15);
        let g = make_grid(8).unwrap();
        let f = Field::from_nonlinear_values(&g, &vals).unwrap();
        assert!((f.coeff(7).norm() - 1.0).abs() < 1e-14);
    }
}
