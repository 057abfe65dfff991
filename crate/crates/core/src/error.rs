use std::path::PathBuf;

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid configuration: {0}")]
    Config(String),

    /// A configuration value rejected by validation, named by its key.
    #[error("invalid `{key}`: {reason}")]
    Invalid { key: &'static str, reason: String },

    #[error("dimension mismatch in {context}: expected {expected}, got {actual}")]
    Dimension {
        context: &'static str,
        expected: usize,
        actual: usize,
    },

    #[error("backward pass requested on an empty tape")]
    EmptyTape,

    #[error("non-finite gradient at epoch {epoch}, parameter {index}")]
    NonFiniteGradient { epoch: usize, index: usize },

    #[error("non-finite loss at epoch {epoch}")]
    NonFiniteLoss { epoch: usize },

    #[error("reference field has zero norm")]
    ZeroReference,

    #[error("grids differ at row {row}: x = {left} vs x = {right}")]
    GridMismatch { row: usize, left: f64, right: f64 },

    #[error("quadrature did not converge at t = {t}, x = {x} (last relative change {change:e})")]
    Quadrature { t: f64, x: f64, change: f64 },

    #[error("Newton iteration diverged at step {step} (residual norm {residual:e})")]
    Newton { step: usize, residual: f64 },

    #[error("malformed {what}: {detail}")]
    Format { what: &'static str, detail: String },

    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}

impl Error {
    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }
}
