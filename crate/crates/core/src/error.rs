use std::fmt;

/// Errors raised by list construction, scoring, parsing and the oracle.
#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("hypothesis does not match reference: {0}")]
    HypothesisMismatch(Mismatch),

    #[error("instance too large for exhaustive enumeration: n = {n} (limit {limit})")]
    InstanceTooLarge { n: usize, limit: usize },

    #[error("parse error{}: {message}", line.map(|l| format!(" at line {l}")).unwrap_or_default())]
    Parse { line: Option<usize>, message: String },
}

/// What went wrong when pairing a hypothesis with a reference list.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Mismatch {
    MissingId(String),
    UnknownId(String),
    DuplicateId(String),
    Length { expected: usize, got: usize },
}

impl fmt::Display for Mismatch {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Mismatch::MissingId(id) => write!(f, "missing id `{id}`"),
            Mismatch::UnknownId(id) => write!(f, "unknown id `{id}`"),
            Mismatch::DuplicateId(id) => write!(f, "duplicate id `{id}`"),
            Mismatch::Length { expected, got } => {
                write!(f, "expected {expected} items, got {got}")
            }
        }
    }
}

impl Error {
    pub(crate) fn invalid(msg: impl Into<String>) -> Self {
        Error::InvalidInput(msg.into())
    }

    pub(crate) fn parse(line: impl Into<Option<usize>>, msg: impl Into<String>) -> Self {
        Error::Parse {
            line: line.into(),
            message: msg.into(),
        }
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
