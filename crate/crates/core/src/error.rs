use thiserror::Error;

use crate::model::{ParseError, ValidationReport};

pub type Result<T, E = CoreError> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum CoreError {
    #[error("empty input")]
    EmptyInput,
    #[error("length mismatch: {left} vs {right}")]
    LengthMismatch { left: usize, right: usize },
    #[error("need at least {needed} items, got {got}")]
    TooFew { needed: usize, got: usize },
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
    #[error("unknown task '{0}'")]
    UnknownTask(String),
    #[error("unknown model '{0}'")]
    UnknownModel(String),
    #[error("unknown metric '{0}'")]
    UnknownMetric(String),
    #[error("unknown metadata key '{0}'")]
    UnknownMetadataKey(String),
    #[error("failed to parse experiment file ({} error(s))", .0.len())]
    Parse(Vec<ParseError>),
    #[error("experiment file has {} validation error(s)", .0.errors.len())]
    Invalid(ValidationReport),
}
