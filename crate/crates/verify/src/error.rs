use thiserror::Error;

/// Failures of the harness itself, as opposed to failed verdicts.
#[derive(Debug, Error)]
pub enum HarnessError {
    #[error(transparent)]
    Core(#[from] dyadic_core::Error),

    #[error("invalid parameter: {0}")]
    Parameter(String),

    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),

    #[error("json error: {0}")]
    Json(#[from] serde_json::Error),

    #[error("csv error: {0}")]
    Csv(#[from] csv::Error),
}

pub type HarnessResult<T> = Result<T, HarnessError>;

pub(crate) fn invalid(msg: impl Into<String>) -> HarnessError {
    HarnessError::Parameter(msg.into())
}
