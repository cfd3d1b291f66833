//! Resolved reference integrator for the full relativistic system
//! `i∂_t w = −c⟨∇⟩_c w + c⟨∇⟩_c⁻¹F(w)`.
//!
//! Lawson fourth-order scheme: the diagonal flow `e^{itc⟨∇⟩_c}` is
//! propagated exactly and the classical RK4 tableau is applied in the
//! interaction picture. The step is guarded by `τ·c² ≤ 0.1`, which keeps
//! the `O(c²)` phase oscillation of the nonlinear forcing resolved.

use num_complex::Complex64;

use crate::error::{KgError, Result};
use crate::model::{f_vector, FirstOrderState, KgParams};
use crate::spectral::{Field, KgPhase, ScaledInverseBracket};
use crate::stepping::{align_steps, should_store, Trajectory};

/// Upper bound on `τ_ref·c²`.
pub const REFERENCE_STEP_LIMIT: f64 = 0.1;

const MINUS_I: Complex64 = Complex64 { re: 0.0, im: -1.0 };

pub fn check_reference_step(tau: f64, c: f64) -> Result<()> {
    let product = tau * c * c;
    if product.is_nan() || product > REFERENCE_STEP_LIMIT {
        return Err(KgError::StepRestriction {
            product,
            limit: REFERENCE_STEP_LIMIT,
        });
    }
    Ok(())
}

struct LawsonRk4 {
    params: KgParams,
    tau: f64,
    half: KgPhase,
    full: KgPhase,
}

impl LawsonRk4 {
    fn new(params: KgParams, tau: f64) -> Self {
        LawsonRk4 {
            params,
            tau,
            half: KgPhase {
                c: params.c,
                t: 0.5 * tau,
            },
            full: KgPhase {
                c: params.c,
                t: tau,
            },
        }
    }

    /// Nonlinear part `−ic⟨∇⟩_c⁻¹F(w)`.
    fn forcing(&self, u: &Field, v: &Field) -> (Field, Field) {
        let st = FirstOrderState {
            u: u.clone(),
            v: v.clone(),
            t: 0.0,
        };
        let (f1, f2) = f_vector(&st, self.params.lambda, self.params.p);
        let s = ScaledInverseBracket { c: self.params.c };
        (f1.apply(&s) * MINUS_I, f2.apply(&s) * MINUS_I)
    }

    fn step(&self, u: &Field, v: &Field) -> (Field, Field) {
        let h = self.tau;
        let one = Complex64::new(1.0, 0.0);
        let h2 = Complex64::new(0.5 * h, 0.0);
        let (k1u, k1v) = self.forcing(u, v);

        let a_u = u.lincomb(one, &k1u, h2).apply(&self.half);
        let a_v = v.lincomb(one, &k1v, h2).apply(&self.half);
        let (k2u, k2v) = self.forcing(&a_u, &a_v);

        let eu = u.apply(&self.half);
        let ev = v.apply(&self.half);
        let b_u = eu.lincomb(one, &k2u, h2);
        let b_v = ev.lincomb(one, &k2v, h2);
        let (k3u, k3v) = self.forcing(&b_u, &b_v);

        let fu = u.apply(&self.full);
        let fv = v.apply(&self.full);
        let hh = Complex64::new(h, 0.0);
        let c_u = fu.lincomb(one, &k3u.apply(&self.half), hh);
        let c_v = fv.lincomb(one, &k3v.apply(&self.half), hh);
        let (k4u, k4v) = self.forcing(&c_u, &c_v);

        let combine = |base: &Field, k1: &Field, k2: &Field, k3: &Field, k4: &Field| {
            let mid = (k2 + k3).apply(&self.half);
            let mut acc = k1.apply(&self.full);
            acc = acc.lincomb(one, &mid, Complex64::new(2.0, 0.0));
            acc = &acc + k4;
            base.lincomb(one, &acc, Complex64::new(h / 6.0, 0.0))
        };
        (
            combine(&fu, &k1u, &k2u, &k3u, &k4u),
            combine(&fv, &k1v, &k2v, &k3v, &k4v),
        )
    }
}

/// Integrates from `psi` (taken at `psi.t`) over `[psi.t, psi.t + t_span]`.
/// Snapshots are stored every `stride` steps plus the final one; a stride of
/// zero stores only the endpoints.
pub fn reference_integrate(
    psi: &FirstOrderState,
    params: &KgParams,
    tau_ref: f64,
    t_span: f64,
    stride: usize,
) -> Result<Trajectory<FirstOrderState>> {
    check_reference_step(tau_ref, params.c)?;
    let (steps, tau) = align_steps(t_span, tau_ref)?;
    check_reference_step(tau, params.c)?;
    let scheme = LawsonRk4::new(*params, tau);

    let mut snapshots = vec![psi.clone()];
    let (mut u, mut v) = (psi.u.clone(), psi.v.clone());
    for n in 1..=steps {
        (u, v) = scheme.step(&u, &v);
        if should_store(n, steps, stride) {
            snapshots.push(FirstOrderState {
                u: u.clone(),
                v: v.clone(),
                t: psi.t + n as f64 * tau,
            });
        }
    }
    Ok(Trajectory {
        tau,
        steps,
        stride,
        snapshots,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{exact_linear_solution, from_first_order, initial_state, InitialData};
    use crate::spectral::make_grid;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn data() -> InitialData {
        let g = make_grid(16).unwrap();
        let phi = Field::from_fn(&g, |x| c(2.0, 1.0) / 5f64.sqrt() * x.cos());
        let gamma = Field::from_fn(&g, |x| {
            c(1.0, 1.0) / 2f64.sqrt() * x.sin() + c(0.5 * x.cos(), 0.0)
        });
        InitialData::new(phi, gamma).unwrap()
    }

    #[test]
    fn guard_refuses_coarse_steps() {
        let d = data();
        let p = KgParams::new(16.0, -1.0, 1).unwrap();
        let psi = initial_state(&d, p.c).unwrap();
        let err = reference_integrate(&psi, &p, 1e-3, 0.1, 1).unwrap_err();
        assert!(matches!(err, KgError::StepRestriction { .. }));
        assert!(check_reference_step(0.1 / 256.0, 16.0).is_ok());
    }

    #[test]
    fn free_flow_is_exact_diagonal_propagation() {
        let d = data();
        let p = KgParams::new(4.0, 0.0, 1).unwrap();
        let psi = initial_state(&d, p.c).unwrap();
        let traj = reference_integrate(&psi, &p, 1e-3, 0.2, 0).unwrap();
        let exact_u = psi.u.apply(&KgPhase { c: 4.0, t: 0.2 });
        let exact_v = psi.v.apply(&KgPhase { c: 4.0, t: 0.2 });
        let last = traj.last();
        assert!((&last.u - &exact_u).l2_norm() < 1e-12);
        assert!((&last.v - &exact_v).l2_norm() < 1e-12);
        assert_eq!(traj.snapshots.len(), 2);
    }

    #[test]
    fn linear_reference_matches_exact_solution() {
        let d = data();
        let p = KgParams::new(8.0, -1.0, 0).unwrap();
        let psi = initial_state(&d, p.c).unwrap();
        let traj = reference_integrate(&psi, &p, 1e-5, 0.1, 0).unwrap();
        let z = from_first_order(traj.last());
        let exact = exact_linear_solution(&d, &p, 0.1).unwrap();
        let err = (&z - &exact).l2_norm();
        assert!(err <= 1e-8, "error {err}");
    }

    #[test]
    fn self_convergence_is_fourth_order() {
        let d = data();
        let p = KgParams::new(1.0, -1.0, 1).unwrap();
        let psi = initial_state(&d, p.c).unwrap();
        let t = 0.5;
        let fine = reference_integrate(&psi, &p, 1e-3, t, 0).unwrap();
        let taus = [0.04, 0.02, 0.01];
        let errs: Vec<f64> = taus
            .iter()
            .map(|&tau| {
                let coarse = reference_integrate(&psi, &p, tau, t, 0).unwrap();
                let a = coarse.last();
                let b = fine.last();
                ((&a.u - &b.u).l2_norm_sq() + (&a.v - &b.v).l2_norm_sq()).sqrt()
            })
            .collect();
        for w in errs.windows(2) {
            let order = (w[0] / w[1]).log2();
            assert!(
                (3.6..=4.4).contains(&order),
                "order {order}, errors {errs:?}"
            );
        }
    }
}
