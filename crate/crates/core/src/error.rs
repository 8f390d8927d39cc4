use thiserror::Error;

use crate::grammar::Violation;

#[derive(Debug, Error)]
pub enum Error {
    #[error("line {line}, column {column}: {message}")]
    Syntax {
        line: usize,
        column: usize,
        message: String,
    },
    #[error("line {line}: fan-out mismatch for `{symbol}`: {message}")]
    FanOutMismatch {
        line: usize,
        symbol: String,
        message: String,
    },
    #[error("line {line}: unknown symbol `{symbol}`")]
    UnknownSymbol { line: usize, symbol: String },
    #[error("invalid grammar: {}", format_violations(.0))]
    Invalid(Vec<Violation>),
    #[error("rule {0} is not binary")]
    NotBinary(usize),
    #[error("grammar cannot be made single-initial: {0}")]
    Conversion(String),
    #[error("grammar is not single-initial; convert it first")]
    NotSingleInitial,
    #[error("precondition violated: {0}")]
    Precondition(String),
    #[error("address error: {0}")]
    Address(String),
    #[error("limit exceeded: {0}")]
    Limit(String),
    #[error("internal error: {0}")]
    Internal(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

fn format_violations(v: &[Violation]) -> String {
    v.iter()
        .map(|x| x.to_string())
        .collect::<Vec<_>>()
        .join("; ")
}

pub type Result<T> = std::result::Result<T, Error>;
