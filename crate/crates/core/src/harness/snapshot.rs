//! Trajectory snapshot format: one row per (time, mode) holding the Fourier
//! coefficients of both components, as CSV or JSON.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::output::num;
use crate::error::{KgError, Result};
use crate::limit::{CorrectionState, NlsPair};
use crate::model::FirstOrderState;
use crate::spectral::{Field, Grid, SpectralGrid};
use crate::stepping::Trajectory;

/// A state made of two fields on one grid at a time `t`.
pub trait PairState: Sized {
    const LABELS: [&'static str; 2];
    fn parts(&self) -> (&Field, &Field);
    fn time(&self) -> f64;
    fn rebuild(a: Field, b: Field, t: f64) -> Result<Self>;
}

impl PairState for FirstOrderState {
    const LABELS: [&'static str; 2] = ["u", "v"];
    fn parts(&self) -> (&Field, &Field) {
        (&self.u, &self.v)
    }
    fn time(&self) -> f64 {
        self.t
    }
    fn rebuild(a: Field, b: Field, t: f64) -> Result<Self> {
        FirstOrderState::new(a, b, t)
    }
}

impl PairState for NlsPair {
    const LABELS: [&'static str; 2] = ["u0", "v0"];
    fn parts(&self) -> (&Field, &Field) {
        (&self.u0, &self.v0)
    }
    fn time(&self) -> f64 {
        self.t
    }
    fn rebuild(a: Field, b: Field, t: f64) -> Result<Self> {
        NlsPair::new(a, b, t)
    }
}

impl PairState for CorrectionState {
    const LABELS: [&'static str; 2] = ["xi1", "eta1"];
    fn parts(&self) -> (&Field, &Field) {
        (&self.xi1, &self.eta1)
    }
    fn time(&self) -> f64 {
        self.t
    }
    fn rebuild(a: Field, b: Field, t: f64) -> Result<Self> {
        a.same_grid(&b)?;
        Ok(CorrectionState { xi1: a, eta1: b, t })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SnapshotRow {
    pub t: f64,
    pub k: i64,
    pub first_re: f64,
    pub first_im: f64,
    pub second_re: f64,
    pub second_im: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SnapshotSet {
    pub labels: [String; 2],
    #[serde(rename = "K")]
    pub num_modes: usize,
    pub dealias: bool,
    pub tau: f64,
    pub steps: usize,
    pub stride: usize,
    pub rows: Vec<SnapshotRow>,
}

pub fn snapshot_set<S: PairState>(traj: &Trajectory<S>) -> SnapshotSet {
    let grid = traj.first().parts().0.grid().clone();
    let mut rows = Vec::with_capacity(traj.snapshots.len() * grid.num_points());
    for s in &traj.snapshots {
        let (a, b) = s.parts();
        for k in grid.modes() {
            let (x, y) = (a.coeff(k), b.coeff(k));
            rows.push(SnapshotRow {
                t: s.time(),
                k,
                first_re: x.re,
                first_im: x.im,
                second_re: y.re,
                second_im: y.im,
            });
        }
    }
    SnapshotSet {
        labels: S::LABELS.map(String::from),
        num_modes: grid.num_modes(),
        dealias: grid.dealias(),
        tau: traj.tau,
        steps: traj.steps,
        stride: traj.stride,
        rows,
    }
}

/// Rebuilds the trajectory; rows of one snapshot must be contiguous.
pub fn restore<S: PairState>(set: &SnapshotSet) -> Result<Trajectory<S>> {
    if set.labels != S::LABELS.map(String::from) {
        return Err(KgError::Config(format!(
            "snapshot labels {:?} do not match {:?}",
            set.labels,
            S::LABELS
        )));
    }
    let grid: Grid = SpectralGrid::new(set.num_modes, set.dealias)?;
    let n = grid.num_points();
    if set.rows.is_empty() || !set.rows.len().is_multiple_of(n) {
        return Err(KgError::Shape {
            expected: n * set.rows.len().div_ceil(n).max(1),
            found: set.rows.len(),
        });
    }
    let snapshots = set
        .rows
        .chunks(n)
        .map(|chunk| {
            let t = chunk[0].t;
            if chunk.iter().any(|r| r.t != t) {
                return Err(KgError::Config(format!(
                    "snapshot at t = {t} is not contiguous"
                )));
            }
            let a: Vec<(i64, Complex64)> = chunk
                .iter()
                .map(|r| (r.k, Complex64::new(r.first_re, r.first_im)))
                .collect();
            let b: Vec<(i64, Complex64)> = chunk
                .iter()
                .map(|r| (r.k, Complex64::new(r.second_re, r.second_im)))
                .collect();
            S::rebuild(
                Field::from_modes(&grid, &a)?,
                Field::from_modes(&grid, &b)?,
                t,
            )
        })
        .collect::<Result<Vec<S>>>()?;
    Ok(Trajectory {
        tau: set.tau,
        steps: set.steps,
        stride: set.stride,
        snapshots,
    })
}

pub fn snapshots_csv(set: &SnapshotSet) -> Result<String> {
    let [a, b] = &set.labels;
    let mut w = csv::Writer::from_writer(Vec::new());
    let header = [
        "t".to_string(),
        "k".into(),
        format!("{a}_re"),
        format!("{a}_im"),
        format!("{b}_re"),
        format!("{b}_im"),
    ];
    let err = |e: csv::Error| KgError::Config(format!("csv: {e}"));
    w.write_record(&header).map_err(err)?;
    for r in &set.rows {
        w.write_record([
            num(Some(r.t)),
            r.k.to_string(),
            num(Some(r.first_re)),
            num(Some(r.first_im)),
            num(Some(r.second_re)),
            num(Some(r.second_im)),
        ])
        .map_err(err)?;
    }
    let bytes = w.into_inner().map_err(|e| KgError::Config(e.to_string()))?;
    Ok(String::from_utf8(bytes).expect("ascii output"))
}

pub fn snapshots_json(set: &SnapshotSet) -> Result<String> {
    Ok(serde_json::to_string_pretty(set)?)
}

pub fn snapshots_from_json(text: &str) -> Result<SnapshotSet> {
    Ok(serde_json::from_str(text)?)
}
