use thiserror::Error;

/// Errors raised by the analytic and Monte Carlo layers.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("unsupported regime: {0}")]
    UnsupportedRegime(String),

    #[error("missing moment: {0}")]
    MissingMoment(String),

    #[error("no root on the small branch: {0}")]
    NoRoot(String),

    #[error("quadrature did not converge: {0}")]
    NonConvergence(String),

    #[error("sampling failure: {0}")]
    Sampling(String),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn invalid<T>(msg: impl Into<String>) -> Result<T> {
    Err(Error::InvalidInput(msg.into()))
}
