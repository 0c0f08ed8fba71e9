use std::path::PathBuf;

use thiserror::Error;

use crate::morse::Violation;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid presentation: {}", join_violations(.0))]
    Invalid(Vec<Violation>),

    #[error("parse error at line {line}, token {token:?}: {message}")]
    Parse {
        line: usize,
        token: String,
        message: String,
    },

    #[error("index {index} out of range for {len} events")]
    IndexOutOfRange { index: usize, len: usize },

    #[error("move would create a negative strand count at level {level}")]
    NegativeCount { level: usize },

    #[error("events of {0} are not contiguous")]
    NonContiguous(String),

    #[error("blocks {0} and {1} are interleaved or not adjacent")]
    Interleaved(String, String),

    #[error("puncture mismatch: {0}")]
    PunctureMismatch(String),

    #[error("unsupported: {0}")]
    Unsupported(String),

    #[error("box {0} has no maximum to extract")]
    NoMaximum(String),

    #[error("hypothesis violated: {0}")]
    Hypothesis(String),

    #[error("template error: {0}")]
    Template(String),

    #[error("certification failed: {0}")]
    Certification(String),

    #[error("event budget exceeded: {events} events > budget {budget}")]
    BudgetExceeded { events: usize, budget: usize },

    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("{path}: {message}")]
    Config { path: PathBuf, message: String },
}

fn join_violations(v: &[Violation]) -> String {
    v.iter()
        .map(|x| x.to_string())
        .collect::<Vec<_>>()
        .join("; ")
}
