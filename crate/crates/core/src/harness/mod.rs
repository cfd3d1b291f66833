//! Experiment orchestration: configuration, sweeps, slope fits, output files
//! and the acceptance checks.

pub mod config;
pub mod experiment;
pub mod fit;
pub mod output;
pub mod snapshot;

pub use config::{ExperimentConfig, ExperimentKind, InitialDataSpec, ModeEntry, Preset};
pub use experiment::{run_experiment, ResultRow, ResultTable};
pub use fit::fit_slope;
pub use output::{emit_outputs, OutputFiles};
