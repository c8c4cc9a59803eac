//! Crate-wide error type.

use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    /// Invalid configuration or argument value.
    #[error("invalid configuration: {0}")]
    Config(String),

    /// Array dimensions do not line up.
    #[error("shape mismatch: {0}")]
    Shape(String),

    /// An operation received no data.
    #[error("empty input: {0}")]
    Empty(String),

    /// Fewer samples than the operation can work with.
    #[error("need at least {needed} samples, got {got}")]
    InsufficientSamples { needed: usize, got: usize },

    /// Training produced a non-finite loss or gradient.
    #[error("training diverged at epoch {epoch}: {detail}")]
    Divergence { epoch: usize, detail: String },

    /// A gradient contained NaN or infinity.
    #[error("non-finite gradient")]
    NonFiniteGradient,

    /// A named CSV column was not found in the header.
    #[error("column '{0}' not found in header")]
    MissingColumn(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
