//! Error type shared by the whole crate, with the stable process exit codes
//! the command-line tool maps each class to.

use thiserror::Error;

/// Errors produced by form ingestion and the analysis operations.
#[derive(Debug, Error)]
pub enum Error {
    /// Malformed input: bad JSON, schema violation, bad argument.
    #[error("parse error: {0}")]
    Parse(String),
    /// Shape disagreement between operands.
    #[error("dimension mismatch: {0}")]
    Dimension(String),
    /// A mathematical hypothesis of the requested operation fails.
    #[error("hypothesis violation: {0}")]
    Hypothesis(String),
    /// The computation cannot certify a verdict at the working tolerance.
    #[error("numerically indeterminate: {0}")]
    Indeterminate(String),
    /// Configured resource cap exceeded.
    #[error("resource limit: {0}")]
    Limit(String),
    #[error("linear algebra backend: {0}")]
    Backend(#[from] ndarray_linalg::error::LinalgError),
    #[error("io: {0}")]
    Io(#[from] std::io::Error),
}

impl Error {
    /// Stable exit code: 2 = parse/usage, 3 = hypothesis violation,
    /// 4 = numerical indeterminacy.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Parse(_) | Error::Dimension(_) | Error::Limit(_) | Error::Io(_) => 2,
            Error::Hypothesis(_) => 3,
            Error::Indeterminate(_) | Error::Backend(_) => 4,
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
