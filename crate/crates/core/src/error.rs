use std::path::PathBuf;

use thiserror::Error;

pub type Result<T> = std::result::Result<T, AcnsError>;

#[derive(Debug, Error)]
pub enum AcnsError {
    #[error("invalid grid: {0}")]
    InvalidGrid(String),

    #[error("grid mismatch: expected dim={expected_dim} n={expected_n}, found dim={found_dim} n={found_n}")]
    GridMismatch {
        expected_dim: usize,
        expected_n: usize,
        found_dim: usize,
        found_n: usize,
    },

    #[error("unsupported Lebesgue exponent p={0}")]
    UnsupportedExponent(f64),

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("need at least {needed} samples, got {got}")]
    InsufficientSamples { needed: usize, got: usize },

    #[error("non-uniform sample spacing: {0}")]
    NonuniformSpacing(String),

    #[error("time step {dt} exceeds the advective stability bound {bound}")]
    CflViolation { dt: f64, bound: f64 },

    #[error("non-finite value at t={t}: {location}")]
    NonFinite { t: f64, location: String },

    #[error("support violation: {0}")]
    SupportViolation(String),

    #[error("rate fit: {0}")]
    Fit(String),

    #[error("config: {0}")]
    Config(String),

    #[error("no runs found in {0}")]
    NoRuns(PathBuf),

    #[error("missing oracle trajectory: {0}")]
    MissingOracle(String),

    #[error("malformed file {path}: {reason}")]
    Format { path: PathBuf, reason: String },

    #[error("i/o error on {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl AcnsError {
    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        AcnsError::Io {
            path: path.into(),
            source,
        }
    }

    pub(crate) fn param(msg: impl Into<String>) -> Self {
        AcnsError::InvalidParameter(msg.into())
    }
}
