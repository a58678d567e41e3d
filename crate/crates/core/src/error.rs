use thiserror::Error;

/// Errors produced by the library.
///
/// The variants split into two families that callers (notably the CLI) map to
/// different exit codes: bad input (`InvalidArgument`, `DimensionMismatch`,
/// `Parse`) and numerical or generation failures (`NonConvergence`,
/// `Generation`).
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("dimension mismatch: expected {expected}, got {actual}")]
    DimensionMismatch { expected: usize, actual: usize },

    #[error("{what} did not converge within {limit} iterations")]
    NonConvergence { what: &'static str, limit: u64 },

    #[error("chain generation failed: {0}")]
    Generation(String),

    #[error("parse error: {0}")]
    Parse(String),
}

impl Error {
    pub(crate) fn invalid(msg: impl Into<String>) -> Self {
        Error::InvalidArgument(msg.into())
    }

    /// True for failures caused by the caller's input rather than by the
    /// numerics.
    pub fn is_argument_error(&self) -> bool {
        matches!(
            self,
            Error::InvalidArgument(_) | Error::DimensionMismatch { .. } | Error::Parse(_)
        )
    }
}

pub type Result<T> = std::result::Result<T, Error>;
