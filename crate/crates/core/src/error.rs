use thiserror::Error;

/// Errors raised anywhere in the toolkit.
///
/// The variants are grouped into the categories the command-line front end
/// reports as distinct exit codes: domain violations, numerical failures
/// (non-convergence, singular systems, failed internal consistency checks)
/// and I/O.
#[derive(Debug, Error)]
pub enum Error {
    #[error("domain error: {0}")]
    Domain(String),

    #[error("convergence error: {0}")]
    Convergence(String),

    #[error("consistency check failed: {0}")]
    Consistency(String),

    #[error("singular linear system: {0}")]
    Singular(String),

    #[error("grid mismatch: {0}")]
    GridMismatch(String),

    #[error("zero denominator: {0}")]
    ZeroDenominator(String),

    #[error("covariance embedding failed: {0}")]
    Embedding(String),

    #[error("I/O error: {0}")]
    Io(#[from] std::io::Error),

    #[error("CSV error: {0}")]
    Csv(#[from] csv::Error),

    #[error("JSON error: {0}")]
    Json(#[from] serde_json::Error),
}

/// Coarse error category, used for process exit codes.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ErrorCategory {
    Domain,
    Numerical,
    Io,
}

impl Error {
    pub fn category(&self) -> ErrorCategory {
        match self {
            Error::Domain(_) | Error::GridMismatch(_) => ErrorCategory::Domain,
            Error::Convergence(_)
            | Error::Consistency(_)
            | Error::Singular(_)
            | Error::ZeroDenominator(_)
            | Error::Embedding(_) => ErrorCategory::Numerical,
            Error::Io(_) | Error::Csv(_) | Error::Json(_) => ErrorCategory::Io,
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn domain<T>(msg: impl Into<String>) -> Result<T> {
    Err(Error::Domain(msg.into()))
}
