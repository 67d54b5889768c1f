//! Text formats: `.crn` network files and s-expression specifications.

mod crn_text;
mod spec_text;

use thiserror::Error;

pub use crn_text::{parse_crn, print_crn, CrnDocument};
pub use spec_text::{parse_spec, print_function, print_predicate, SpecDocument};

/// A syntax or validation error with a 1-based source position.
#[derive(Debug, Error, Clone, PartialEq, Eq)]
#[error("line {line}, column {col}: {message}")]
pub struct ParseError {
    pub line: usize,
    pub col: usize,
    pub message: String,
}

impl ParseError {
    pub(crate) fn new(line: usize, col: usize, message: impl Into<String>) -> Self {
        ParseError {
            line,
            col,
            message: message.into(),
        }
    }
}
