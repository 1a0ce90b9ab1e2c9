//! Error type shared by all modules of the crate.

use thiserror::Error;

#[derive(Debug, Error)]
pub enum GcError {
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    #[error("invalid geometry: {0}")]
    InvalidGeometry(String),

    #[error("incompatible valences: {0}")]
    IncompatibleValence(String),

    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("precondition violated: {0}")]
    PreconditionViolation(String),

    #[error("iteration failed to converge: {0}")]
    NonConvergence(String),

    #[error("i/o failure: {0}")]
    Io(#[from] std::io::Error),

    #[error("parse failure: {0}")]
    Parse(String),
}

pub type Result<T> = std::result::Result<T, GcError>;
