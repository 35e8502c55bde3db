use std::io;

use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },

    #[error("invalid configuration: {0}")]
    InvalidConfig(String),

    #[error("training diverged: {0}")]
    Divergence(String),

    #[error("dimension mismatch: expected at most {expected} features, got {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("alignment mismatch: {0}")]
    Alignment(String),

    #[error(
        "no held-out positives to estimate the label frequency; \
         raise the holdout fraction or supply c explicitly"
    )]
    NoHeldOutPositives,

    #[error("model file: {0}")]
    ModelFormat(String),

    #[error(transparent)]
    Io(#[from] io::Error),
}

impl Error {
    pub(crate) fn parse(line: usize, message: impl Into<String>) -> Self {
        Error::Parse {
            line,
            message: message.into(),
        }
    }
}
