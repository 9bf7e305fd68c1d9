use std::path::PathBuf;

use thiserror::Error;

/// Errors raised anywhere in the solver and harness.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid grid: {0}")]
    Grid(String),

    #[error("grid mismatch: n = {left} vs n = {right}")]
    GridMismatch { left: usize, right: usize },

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    /// Non-finite coefficients or a CFL violation. `trace` holds the most
    /// recent (t, ‖u‖ + ‖E‖ + ‖B‖) samples.
    #[error("numerical blow-up at t = {t}: {reason}")]
    BlowUp {
        t: f64,
        reason: String,
        trace: Vec<(f64, f64)>,
    },

    #[error("energy audit: {0}")]
    Audit(String),

    #[error("rate fit: {0}")]
    Fit(String),

    #[error("config key `{key}`: {message}")]
    Config { key: String, message: String },

    #[error("checkpoint version mismatch: found `{found}`, expected `{expected}`")]
    CheckpointVersion { found: String, expected: String },

    #[error("checkpoint truncated: expected {expected} payload bytes, found {found}")]
    CheckpointTruncated { expected: usize, found: usize },

    #[error("malformed checkpoint: {0}")]
    CheckpointFormat(String),

    #[error("I/O error at {}: {source}", path.display())]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}

impl Error {
    pub(crate) fn config(key: impl Into<String>, message: impl Into<String>) -> Self {
        Error::Config {
            key: key.into(),
            message: message.into(),
        }
    }

    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
