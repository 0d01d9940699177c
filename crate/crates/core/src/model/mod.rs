//! Experiment results file: data model, parsing and validation.

mod parse;
mod resolve;
mod types;
mod validate;

pub use parse::{parse_experiment, to_document, ParseError, ROOT_PATH};
pub use resolve::{resolve_task, ModelResponse, ResolvedTask};
pub use types::*;
pub use validate::{validate, ErrorCode, Issue, ValidationReport};
