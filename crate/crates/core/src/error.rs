use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Error {
    #[error("cap exceeded: {what} ({limit})")]
    CapExceeded { what: String, limit: usize },
    #[error("invalid permutation: {0}")]
    InvalidPermutation(String),
    #[error("parse error at line {line}: {msg}")]
    Parse { line: usize, msg: String },
    #[error("not a subgroup: {0}")]
    NotSubgroup(String),
    #[error("not normal: {0}")]
    NotNormal(String),
    #[error("not abelian: {0}")]
    NotAbelian(String),
    #[error("action is not faithful")]
    NotFaithful,
    #[error("precondition failed: {0}")]
    Precondition(String),
    #[error("hypothesis failed: {0}")]
    Hypothesis(String),
    #[error("internal consistency violation: {0}")]
    Internal(String),
}

impl Error {
    pub fn cap(what: impl Into<String>, limit: usize) -> Self {
        Error::CapExceeded { what: what.into(), limit }
    }

    pub fn precondition(msg: impl Into<String>) -> Self {
        Error::Precondition(msg.into())
    }

    pub fn internal(msg: impl Into<String>) -> Self {
        Error::Internal(msg.into())
    }

    /// Process exit code: 1 validation, 2 resource cap, 3 internal.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::CapExceeded { .. } => 2,
            Error::Internal(_) => 3,
            _ => 1,
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
