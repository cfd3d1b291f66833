//! Declarative experiment configuration (JSON).

use std::f64::consts::SQRT_2;
use std::path::{Path, PathBuf};

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{KgError, Result};
use crate::limit::{G0Variant, SplittingConfig};
use crate::model::{InitialData, KgParams};
use crate::reference::check_reference_step;
use crate::spectral::{sobolev_norm, Field, SpectralGrid};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ExperimentKind {
    LinearConvergenceInC,
    CubicFirstOrderInC,
    CubicSecondOrderInC,
    TauConvergence,
    ConservationStudy,
}

impl ExperimentKind {
    pub const ALL: [ExperimentKind; 5] = [
        ExperimentKind::LinearConvergenceInC,
        ExperimentKind::CubicFirstOrderInC,
        ExperimentKind::CubicSecondOrderInC,
        ExperimentKind::TauConvergence,
        ExperimentKind::ConservationStudy,
    ];

    pub fn name(self) -> &'static str {
        match self {
            ExperimentKind::LinearConvergenceInC => "linear_convergence_in_c",
            ExperimentKind::CubicFirstOrderInC => "cubic_first_order_in_c",
            ExperimentKind::CubicSecondOrderInC => "cubic_second_order_in_c",
            ExperimentKind::TauConvergence => "tau_convergence",
            ExperimentKind::ConservationStudy => "conservation_study",
        }
    }

    pub fn description(self) -> &'static str {
        match self {
            ExperimentKind::LinearConvergenceInC => {
                "linear problem: z0 and z0 + c^-2 z1 against the exact solution over a c-sweep"
            }
            ExperimentKind::CubicFirstOrderInC => {
                "cubic problem: Strang-split z0 against the Lawson reference over a c-sweep"
            }
            ExperimentKind::CubicSecondOrderInC => {
                "cubic problem, real data: z0 and the second-order approximation against the reference"
            }
            ExperimentKind::TauConvergence => {
                "cubic limit system: Strang error against a tau/64 self-reference over a tau-sweep"
            }
            ExperimentKind::ConservationStudy => {
                "limit-system invariants, charge and energy deviations of z0, optional reference drift"
            }
        }
    }

    /// Whether the experiment compares against the nonlinear reference integrator.
    pub fn needs_reference(self) -> bool {
        matches!(
            self,
            ExperimentKind::CubicFirstOrderInC | ExperimentKind::CubicSecondOrderInC
        )
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Preset {
    /// `φ = ((2+i)/√5)cos x`, `γ = ((1+i)/√2)sin x + ½cos x`.
    ComplexCosine,
    /// `φ = cos x`, `γ = ¼sin x + ½cos x`.
    RealCosine,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ModeEntry {
    pub k: i64,
    pub re: f64,
    #[serde(default)]
    pub im: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum InitialDataSpec {
    Preset(Preset),
    Table {
        phi: Vec<ModeEntry>,
        gamma: Vec<ModeEntry>,
    },
}

fn default_output_dir() -> PathBuf {
    PathBuf::from("results")
}

fn default_nodes() -> usize {
    8
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub experiment: ExperimentKind,
    #[serde(rename = "K")]
    pub num_modes: usize,
    #[serde(rename = "T")]
    pub t_final: f64,
    pub tau: f64,
    pub tau_ref: f64,
    pub c_list: Vec<f64>,
    pub lambda: f64,
    pub p: u32,
    pub initial_data: InitialDataSpec,
    #[serde(default)]
    pub g0_variant: G0Variant,
    #[serde(default = "default_output_dir")]
    pub output_dir: PathBuf,
    /// Step sizes of a `tau_convergence` sweep.
    #[serde(default)]
    pub tau_list: Vec<f64>,
    #[serde(default)]
    pub normalize_h1: bool,
    #[serde(default)]
    pub dealias: bool,
    #[serde(default = "default_nodes")]
    pub quadrature_nodes: usize,
    /// Writes wall-clock seconds per row; off by default so output is reproducible.
    #[serde(default)]
    pub record_runtime: bool,
    /// Horizon of the reference run in a conservation study; none skips it.
    #[serde(default)]
    pub reference_horizon: Option<f64>,
}

impl ExperimentConfig {
    pub fn from_json(text: &str) -> Result<Self> {
        let cfg: ExperimentConfig =
            serde_json::from_str(text).map_err(|e| KgError::Config(e.to_string()))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| KgError::Config(format!("cannot read {}: {e}", path.display())))?;
        Self::from_json(&text)
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }

    /// Checks consistency and the reference guard before any computation.
    pub fn validate(&self) -> Result<()> {
        let bad = |msg: String| Err(KgError::Config(msg));
        if self.num_modes < 2 || !self.num_modes.is_power_of_two() {
            return bad(format!(
                "K must be a power of two >= 2, got {}",
                self.num_modes
            ));
        }
        for (name, v) in [
            ("T", self.t_final),
            ("tau", self.tau),
            ("tau_ref", self.tau_ref),
        ] {
            if !(v.is_finite() && v > 0.0) {
                return bad(format!("{name} must be positive, got {v}"));
            }
        }
        if !self.lambda.is_finite() {
            return bad("lambda must be finite".into());
        }
        if self.c_list.is_empty() {
            return bad("c_list must not be empty".into());
        }
        if self.c_list.iter().any(|&c| !(c.is_finite() && c > 0.0)) {
            return bad("c_list entries must be positive".into());
        }
        if self.c_list.windows(2).any(|w| w[1] <= w[0]) {
            return bad("c_list must be strictly increasing".into());
        }
        SplittingConfig {
            tau: self.tau,
            quadrature_nodes: self.quadrature_nodes,
            snapshot_stride: 1,
            g0_variant: self.g0_variant,
        }
        .validate(self.p)?;
        if let InitialDataSpec::Table { phi, gamma } = &self.initial_data {
            let k = self.num_modes as i64;
            if let Some(m) = phi.iter().chain(gamma).find(|m| m.k < -k || m.k >= k) {
                return bad(format!("mode {} outside the grid range [-{k}, {k})", m.k));
            }
        }
        match self.experiment {
            ExperimentKind::LinearConvergenceInC if self.p != 0 => {
                return bad("linear_convergence_in_c needs p = 0".into())
            }
            ExperimentKind::CubicFirstOrderInC
            | ExperimentKind::CubicSecondOrderInC
            | ExperimentKind::TauConvergence
            | ExperimentKind::ConservationStudy
                if self.p != 1 =>
            {
                return Err(KgError::Unsupported(format!(
                    "{} is built for the cubic case p = 1, got p = {}",
                    self.experiment.name(),
                    self.p
                )))
            }
            ExperimentKind::TauConvergence if self.tau_list.len() < 3 => {
                return bad("tau_convergence needs at least three entries in tau_list".into())
            }
            _ => {}
        }
        if self.tau_list.iter().any(|&t| !(t.is_finite() && t > 0.0)) {
            return bad("tau_list entries must be positive".into());
        }
        if self.experiment == ExperimentKind::CubicSecondOrderInC
            && !self.initial_data()?.is_real(1e-12)
        {
            return Err(KgError::Unsupported(
                "cubic_second_order_in_c needs real initial data".into(),
            ));
        }
        let c_max = *self.c_list.last().expect("nonempty");
        let wants_reference = self.experiment.needs_reference()
            || (self.experiment == ExperimentKind::ConservationStudy
                && self.reference_horizon.is_some());
        if wants_reference {
            check_reference_step(self.tau_ref, c_max)?;
        }
        if let Some(h) = self.reference_horizon {
            if !(h.is_finite() && h > 0.0) {
                return bad(format!("reference_horizon must be positive, got {h}"));
            }
        }
        Ok(())
    }

    pub fn params(&self, c: f64) -> Result<KgParams> {
        KgParams::new(c, self.lambda, self.p)
    }

    pub fn splitting(&self) -> SplittingConfig {
        SplittingConfig {
            tau: self.tau,
            quadrature_nodes: self.quadrature_nodes,
            snapshot_stride: 1,
            g0_variant: self.g0_variant,
        }
    }

    pub fn initial_data(&self) -> Result<InitialData> {
        let grid = SpectralGrid::new(self.num_modes, self.dealias)?;
        let (phi, gamma) = match &self.initial_data {
            InitialDataSpec::Preset(Preset::ComplexCosine) => {
                let a = Complex64::new(2.0, 1.0) / 5f64.sqrt();
                let b = Complex64::new(1.0, 1.0) / SQRT_2;
                (
                    Field::from_fn(&grid, |x| a * x.cos()),
                    Field::from_fn(&grid, |x| b * x.sin() + 0.5 * x.cos()),
                )
            }
            InitialDataSpec::Preset(Preset::RealCosine) => (
                Field::from_fn(&grid, |x| Complex64::new(x.cos(), 0.0)),
                Field::from_fn(&grid, |x| {
                    Complex64::new(0.25 * x.sin() + 0.5 * x.cos(), 0.0)
                }),
            ),
            InitialDataSpec::Table { phi, gamma } => {
                let modes = |t: &[ModeEntry]| -> Vec<(i64, Complex64)> {
                    t.iter()
                        .map(|m| (m.k, Complex64::new(m.re, m.im)))
                        .collect()
                };
                (
                    Field::from_modes(&grid, &modes(phi))?,
                    Field::from_modes(&grid, &modes(gamma))?,
                )
            }
        };
        let (phi, gamma) = if self.normalize_h1 {
            (normalized(&phi), normalized(&gamma))
        } else {
            (phi, gamma)
        };
        InitialData::new(phi, gamma)
    }
}

fn normalized(f: &Field) -> Field {
    let n = sobolev_norm(f, 1.0);
    if n > 0.0 {
        f * (1.0 / n)
    } else {
        f.clone()
    }
}
