//! Charge, energy and their limit-system leaders.

use num_complex::Complex64;
use serde::Serialize;

use crate::error::{KgError, Result};
use crate::limit::NlsPair;
use crate::model::{FirstOrderState, KgParams};
use crate::reconstruction::fast_phase;
use crate::spectral::{Bracket, Derivative, Field, Grid};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Quantity {
    Q,
    E,
    Q0,
    E0,
    Erest,
}

impl Quantity {
    pub fn name(self) -> &'static str {
        match self {
            Quantity::Q => "Q",
            Quantity::E => "E",
            Quantity::Q0 => "Q0",
            Quantity::E0 => "E0",
            Quantity::Erest => "Erest",
        }
    }
}

#[derive(Debug, Clone, Copy, Serialize)]
pub struct QuantityReport {
    pub quantity: Quantity,
    pub value: f64,
    pub t: f64,
    pub params: KgParams,
}

/// Imaginary residue tolerated when a quantity is reported as real.
pub const IMAGINARY_TOLERANCE: f64 = 1e-11;

impl QuantityReport {
    pub fn new(quantity: Quantity, value: Complex64, t: f64, params: KgParams) -> Result<Self> {
        if value.im.abs() > IMAGINARY_TOLERANCE * value.re.abs().max(1.0) {
            return Err(KgError::Unsupported(format!(
                "{} has imaginary part {:e}",
                quantity.name(),
                value.im
            )));
        }
        Ok(QuantityReport {
            quantity,
            value: value.re,
            t,
            params,
        })
    }
}

fn power_integral(grid: &Grid, values: impl Iterator<Item = Complex64>, p: u32) -> f64 {
    let samples: Vec<Complex64> = values
        .map(|z| Complex64::new(z.norm_sqr().powi(p as i32 + 1), 0.0))
        .collect();
    grid.torus_integral(&samples)
        .expect("grid-sized samples")
        .re
}

/// `Q = ∫ Re(−(i/c²)∂_t z·z̄)`.
pub fn charge_z(z: &Field, zt: &Field, c: f64) -> Result<f64> {
    z.same_grid(zt)?;
    Ok(zt.inner(z).im / (c * c))
}

/// `E = ∫ |c⁻¹∂_t z|² + |∇z|² + c²|z|² − (λ/(p+1))|z|^{2p+2}`.
pub fn energy_z(z: &Field, zt: &Field, params: &KgParams) -> Result<f64> {
    z.same_grid(zt)?;
    let c = params.c;
    let kinetic = zt.l2_norm_sq() / (c * c);
    let gradient = z.apply(&Derivative).l2_norm_sq();
    let mass = c * c * z.l2_norm_sq();
    let potential = power_integral(z.grid(), z.values().into_iter(), params.p);
    Ok(kinetic + gradient + mass - params.lambda / (params.p as f64 + 1.0) * potential)
}

/// `Q = ¼∫ Re((⟨∇⟩_c/c)(u − v̄)·(ū + v))`.
pub fn charge_uv(state: &FirstOrderState, c: f64) -> f64 {
    let vb = state.v.conj();
    let diff = (&state.u - &vb).apply(&Bracket { c });
    0.25 * diff.inner(&(&state.u + &vb)).re / c
}

/// `E = ½(‖⟨∇⟩_c u‖² + ‖⟨∇⟩_c v‖²) − (λ/(p+1))∫|½(u + v̄)|^{2p+2}`.
pub fn energy_uv(state: &FirstOrderState, params: &KgParams) -> f64 {
    let b = Bracket { c: params.c };
    let quad = 0.5 * (state.u.apply(&b).l2_norm_sq() + state.v.apply(&b).l2_norm_sq());
    let u = state.u.values();
    let v = state.v.values();
    let z = u.iter().zip(&v).map(|(a, b)| 0.5 * (a + b.conj()));
    let potential = power_integral(state.grid(), z, params.p);
    quad - params.lambda / (params.p as f64 + 1.0) * potential
}

/// `Q₀ = ¼(‖u₀‖² − ‖v₀‖²)`.
pub fn charge0(w: &NlsPair) -> f64 {
    0.25 * (w.u0.l2_norm_sq() - w.v0.l2_norm_sq())
}

/// `ℰ₀ = ∫ ¼(|∇u₀|² + |∇v₀|²) − (λ/(p+1))|½(u₀ + v̄₀e^{−2ic²t})|^{2p+2}`.
pub fn energy0(w: &NlsPair, t: f64, params: &KgParams) -> f64 {
    let grad = 0.25 * (w.u0.apply(&Derivative).l2_norm_sq() + w.v0.apply(&Derivative).l2_norm_sq());
    let rot = Complex64::from_polar(1.0, -2.0 * fast_phase(params.c, t));
    let u = w.u0.values();
    let v = w.v0.values();
    let z = u.iter().zip(&v).map(|(a, b)| 0.5 * (a + b.conj() * rot));
    let potential = power_integral(w.u0.grid(), z, params.p);
    grad - params.lambda / (params.p as f64 + 1.0) * potential
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct RestEnergySplit {
    pub q_u: f64,
    pub q_v: f64,
    /// `2c²(Q^u − Q^v)`.
    pub rest_energy: f64,
}

/// Particle part `Q^u(u) = ¼∫|u|² + (1/(8c²))|∇u|² + …`, truncated after order `n`.
fn particle_charge(u: &Field, c: f64, n: u32) -> f64 {
    let mut q = 0.25 * u.l2_norm_sq();
    if n >= 1 {
        q += u.apply(&Derivative).l2_norm_sq() / (8.0 * c * c);
    }
    q
}

/// Truncated split `Q ≈ Q^u + Q^v` and the rest energy. The antiparticle part
/// enters with the opposite sign, `Q^v(v) = −Q^u(v)`, so that `Q = Q^u + Q^v`.
pub fn rest_energy_split(state: &FirstOrderState, c: f64, n: u32) -> Result<RestEnergySplit> {
    if n > 1 {
        return Err(KgError::Unsupported(format!(
            "rest-energy truncation order {n} (only 0 and 1 are built)"
        )));
    }
    let q_u = particle_charge(&state.u, c, n);
    let q_v = -particle_charge(&state.v, c, n);
    Ok(RestEnergySplit {
        q_u,
        q_v,
        rest_energy: 2.0 * c * c * (q_u - q_v),
    })
}

/// The first-order state `(u₀e^{ic²t}, v₀e^{ic²t})` through which charge and
/// energy of `z₀` are evaluated.
pub fn lifted_state(w: &NlsPair, c: f64) -> FirstOrderState {
    let e = Complex64::from_polar(1.0, fast_phase(c, w.t));
    FirstOrderState {
        u: &w.u0 * e,
        v: &w.v0 * e,
        t: w.t,
    }
}
