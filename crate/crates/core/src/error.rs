use thiserror::Error;

use crate::linalg::Field;

#[derive(Debug, Error)]
pub enum Error {
    #[error("field mismatch: {0} vs {1}")]
    FieldMismatch(Field, Field),

    #[error("invalid field: {0}")]
    InvalidField(String),

    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    #[error("context mismatch: {0}")]
    ContextMismatch(String),

    #[error("invalid module: {0}")]
    InvalidModule(String),

    #[error("invalid complex: {0}")]
    InvalidComplex(String),

    #[error("precondition violated: {0}")]
    Precondition(String),

    #[error("window exceeds certified precision: {0}")]
    Precision(String),

    #[error("not a chain map: {0}")]
    NotAChainMap(String),

    #[error("parameter out of range: {0}")]
    OutOfRange(String),

    #[error("not applicable: {0}")]
    NotApplicable(String),

    #[error("parse error: {0}")]
    Parse(String),

    #[error("syntax error at line {line}, column {column}: {message}")]
    Syntax {
        line: usize,
        column: usize,
        message: String,
    },

    #[error("schema error: {0}")]
    Schema(String),

    #[error("internal error: {0}")]
    Internal(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
