use thiserror::Error;

/// Errors produced by estimation, generation and diagnostics.
#[derive(Debug, Error)]
pub enum Error {
    /// A tunable or argument is outside its valid range.
    #[error("parameter error: {0}")]
    Parameter(String),
    /// Input data is malformed, non-finite or has the wrong shape.
    #[error("input error: {0}")]
    Input(String),
    /// A brute-force oracle refused because the instance is too large.
    #[error("capacity exceeded: {0}")]
    Capacity(String),
    /// The estimator could not produce an estimate.
    #[error("estimation failure: {0}")]
    Estimation(String),
    /// A generator or experiment configuration is invalid.
    #[error("config error: {0}")]
    Config(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
