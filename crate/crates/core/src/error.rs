use thiserror::Error;

use crate::gates::VerificationReport;

pub type Result<T, E = PbitError> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum PbitError {
    /// A caller broke a documented precondition (e.g. an input voltage
    /// outside the rails reached the p-bit).
    #[error("contract violation: {0}")]
    Contract(String),

    #[error("configuration error: {0}")]
    Config(String),

    #[error("invalid argument: {0}")]
    Argument(String),

    #[error("value out of representable range: {0}")]
    Range(String),

    #[error("capacity exceeded: {0}")]
    Capacity(String),

    #[error("unsupported configuration: {0}")]
    Unsupported(String),

    #[error("search exhausted: {0}")]
    NotFound(String),

    #[error("ground-state verification failed for `{}`: {}", .0.gate, .0.summary())]
    Verification(Box<VerificationReport>),

    #[error("I/O error: {0}")]
    Io(#[from] std::io::Error),

    #[error("JSON error: {0}")]
    Json(#[from] serde_json::Error),
}

impl PbitError {
    pub fn config(msg: impl Into<String>) -> Self {
        Self::Config(msg.into())
    }

    pub fn argument(msg: impl Into<String>) -> Self {
        Self::Argument(msg.into())
    }
}
