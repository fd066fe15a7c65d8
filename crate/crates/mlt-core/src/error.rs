use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum MltError {
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("parse error at line {line}, column {column}: {message}")]
    Parse {
        line: usize,
        column: usize,
        message: String,
    },
}

impl MltError {
    pub(crate) fn invalid(msg: impl Into<String>) -> Self {
        MltError::InvalidParameter(msg.into())
    }
}
