//! Spectral simulation of the Klein-Gordon equation in the non-relativistic
//! limit regime: the relativistic model, its c-independent limit systems,
//! reconstruction of the oscillatory solution, diagnostics and a sweep harness.

pub mod diagnostics;
pub mod error;
pub mod harness;
pub mod limit;
pub mod model;
pub mod reconstruction;
pub mod reference;
pub mod spectral;
pub mod stepping;

pub use error::{KgError, Result};
pub use model::{FirstOrderState, InitialData, KgParams};
pub use spectral::{make_grid, Field, Grid, SpectralGrid};
