use thiserror::Error;

#[derive(Debug, Error)]
pub enum KgError {
    #[error("configuration error: {0}")]
    Config(String),

    #[error("shape mismatch: expected {expected} samples, got {found}")]
    Shape { expected: usize, found: usize },

    #[error("fields live on different grids")]
    GridMismatch,

    #[error("degenerate frequency at mode {mode}: k^2 + c^2 - lambda = {value}")]
    DegenerateFrequency { mode: i64, value: f64 },

    #[error("reference step too coarse: tau_ref * c^2 = {product:.3e} exceeds {limit}")]
    StepRestriction { product: f64, limit: f64 },

    #[error("unsupported regime: {0}")]
    Unsupported(String),

    #[error("scheduling error: {0}")]
    Scheduling(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, KgError>;
