//! Assembly of approximations to `z(t)` from limit-system states by
//! superposing the fast phases `e^{±ic²t}`.

use std::f64::consts::TAU;

use num_complex::Complex64;

use crate::error::{KgError, Result};
use crate::limit::{CorrectionState, NlsPair};
use crate::spectral::Field;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Order {
    /// Error `O(c⁻²)`.
    First,
    /// Error `O(c⁻⁴)`.
    Second,
}

#[derive(Debug, Clone)]
pub struct Approximation {
    pub z: Field,
    pub order: Order,
    pub t: f64,
    pub c: f64,
}

/// `c²t` reduced to `[0, 2π)`.
pub fn fast_phase(c: f64, t: f64) -> f64 {
    (c * c * t).rem_euclid(TAU)
}

fn unit(theta: f64) -> Complex64 {
    Complex64::from_polar(1.0, theta)
}

/// `z₀ = ½u₀e^{ic²t} + ½v̄₀e^{−ic²t}`, at the pair's own time.
pub fn reconstruct_z0(w: &NlsPair, c: f64) -> Approximation {
    let e = unit(fast_phase(c, w.t));
    let z = w.u0.lincomb(0.5 * e, &w.v0.conj(), 0.5 * e.conj());
    Approximation {
        z,
        order: Order::First,
        t: w.t,
        c,
    }
}

/// Linear `z₁ = (λ/8)(u₀e^{ic²t} + v̄₀e^{−ic²t}) + ½(ξ₁e^{ic²t} + η̄₁e^{−ic²t})`.
pub fn reconstruct_z1_linear(w: &NlsPair, corr: &CorrectionState, c: f64, lambda: f64) -> Field {
    let e = unit(fast_phase(c, w.t));
    let slow =
        w.u0.lincomb(e * (lambda / 8.0), &w.v0.conj(), e.conj() * (lambda / 8.0));
    let fast = corr.xi1.lincomb(0.5 * e, &corr.eta1.conj(), 0.5 * e.conj());
    &slow + &fast
}

/// `z₀ + c⁻²z₁` in the linear case.
pub fn reconstruct_second_order_linear(
    w: &NlsPair,
    corr: &CorrectionState,
    c: f64,
    lambda: f64,
) -> Approximation {
    let z0 = reconstruct_z0(w, c).z;
    let z1 = reconstruct_z1_linear(w, corr, c, lambda);
    Approximation {
        z: &z0 + &(&z1 * (1.0 / (c * c))),
        order: Order::Second,
        t: w.t,
        c,
    }
}

/// Cubic second-order approximation for real data (`u₀ = v₀`):
/// `½(1 + c⁻²(3λ/16)|u₀|²)(u₀e^{iθ} + c.c.) − (λ/(64c²))(u₀³e^{3iθ} + c.c.)
/// + (1/(2c²))(ξ₁e^{iθ} + c.c.)` with `θ = c²t`.
pub fn reconstruct_second_order_cubic(
    u0: &Field,
    xi1: &Field,
    t: f64,
    c: f64,
    lambda: f64,
) -> Result<Approximation> {
    u0.same_grid(xi1)?;
    let theta = fast_phase(c, t);
    let (e1, e3) = (unit(theta), unit(3.0 * theta));
    let inv_c2 = 1.0 / (c * c);
    let values: Vec<Complex64> = u0
        .values()
        .iter()
        .zip(xi1.values())
        .map(|(&u, x)| {
            let first = u * e1;
            let cubic = u * u * u * e3;
            let corr = x * e1;
            (1.0 + inv_c2 * 3.0 * lambda / 16.0 * u.norm_sqr()) * first.re
                - inv_c2 * lambda / 32.0 * cubic.re
                + inv_c2 * corr.re
        })
        .map(|re| Complex64::new(re, 0.0))
        .collect();
    Ok(Approximation {
        z: Field::from_values(u0.grid(), &values)?,
        order: Order::Second,
        t,
        c,
    })
}

/// Cubic second-order approximation from solver states, checking `u₀ = v₀`.
pub fn reconstruct_second_order_cubic_pair(
    w: &NlsPair,
    corr: &CorrectionState,
    c: f64,
    lambda: f64,
) -> Result<Approximation> {
    let scale = w.u0.max_abs_value().max(1.0);
    if (&w.u0 - &w.v0).max_abs_value() > 1e-10 * scale {
        return Err(KgError::Unsupported(
            "cubic second-order reconstruction needs u0 = v0 (real initial data)".into(),
        ));
    }
    reconstruct_second_order_cubic(&w.u0, &corr.xi1, w.t, c, lambda)
}
