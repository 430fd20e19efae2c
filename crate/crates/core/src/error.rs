use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("shape mismatch: {0}")]
    Shape(String),

    #[error("layout error: {0}")]
    Layout(String),

    #[error("operator is not positive semidefinite (min eigenvalue {0})")]
    NotPsd(f64),

    #[error("invalid quantum state: {0}")]
    InvalidState(String),

    #[error("invalid protocol: {0}")]
    Spec(String),

    #[error("protocol is not complete: {0}")]
    Completeness(String),

    #[error("value out of range: {0}")]
    Range(String),

    #[error("malformed protocol file: {0}")]
    Format(String),

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
