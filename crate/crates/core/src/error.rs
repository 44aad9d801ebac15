use thiserror::Error;

/// Errors produced by the estimation pipeline.
#[derive(Debug, Error)]
pub enum Error {
    #[error("parse error on line {line}: {message}")]
    Parse { line: usize, message: String },

    #[error("invariant violated: {0}")]
    InvariantViolation(String),

    #[error("no connected sensor graph after {attempts} attempts")]
    FailedToConnect { attempts: u32 },

    #[error("symmetric eigensolver did not converge")]
    ConvergenceFailure,

    #[error("support set for reduced-order least squares is invalid: {0}")]
    InvalidSupport(String),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("non-finite value in {0}")]
    NonFinite(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    /// True for failures of the numerics rather than of the inputs.
    pub fn is_numerical(&self) -> bool {
        matches!(
            self,
            Error::ConvergenceFailure | Error::NonFinite(_) | Error::FailedToConnect { .. }
        )
    }
}
