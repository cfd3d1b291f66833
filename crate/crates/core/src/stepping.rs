//! Step-count alignment and trajectory containers shared by the integrators.

use serde::Serialize;

use crate::error::{KgError, Result};

/// Rounds `t_final / tau` to the nearest positive integer and returns it along
/// with the effective step `t_final / n`.
pub fn align_steps(t_final: f64, tau: f64) -> Result<(usize, f64)> {
    if !(t_final.is_finite() && t_final > 0.0) {
        return Err(KgError::Config(format!(
            "final time must be positive, got {t_final}"
        )));
    }
    if !(tau.is_finite() && tau > 0.0) {
        return Err(KgError::Config(format!(
            "time step must be positive, got {tau}"
        )));
    }
    let n = ((t_final / tau).round() as usize).max(1);
    Ok((n, t_final / n as f64))
}

/// Time-ordered snapshots of a one-step integration.
#[derive(Debug, Clone, Serialize)]
pub struct Trajectory<S> {
    /// Effective step after alignment with the final time.
    pub tau: f64,
    pub steps: usize,
    /// Steps between consecutive stored snapshots (the final state is always stored).
    pub stride: usize,
    pub snapshots: Vec<S>,
}

impl<S> Trajectory<S> {
    pub fn last(&self) -> &S {
        self.snapshots
            .last()
            .expect("trajectory stores the initial state")
    }

    pub fn first(&self) -> &S {
        &self.snapshots[0]
    }
}

pub(crate) fn should_store(step: usize, total: usize, stride: usize) -> bool {
    step == total || (stride > 0 && step.is_multiple_of(stride))
}
