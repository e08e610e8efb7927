//! Error type shared across the toolkit.
//!
//! Variants are grouped by how the CLI reports them: configuration problems
//! exit with code 2, data problems with 3, numeric failures with 4.

use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    /// Bad configuration value (qubit count out of range, C <= 0, ...).
    #[error("configuration error: {0}")]
    Config(String),

    /// An argument violates an operation's precondition (empty input, ...).
    #[error("invalid argument: {0}")]
    Argument(String),

    /// Dimension mismatch between two inputs that must agree.
    #[error("shape mismatch: {0}")]
    Shape(String),

    /// Qubit or element index out of range.
    #[error("index out of range: {0}")]
    Index(String),

    /// Malformed input data (CSV parse failures, unknown labels, ...).
    #[error("data error: {0}")]
    Data(String),

    /// Numerical failure (singular system, solver non-convergence, ...).
    #[error("numeric failure: {0}")]
    Numeric(String),

    #[error("io error: {0}")]
    Io(#[from] std::io::Error),
}

impl Error {
    /// Process exit code the CLI uses for this error class.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Config(_) | Error::Argument(_) | Error::Shape(_) | Error::Index(_) => 2,
            Error::Data(_) | Error::Io(_) => 3,
            Error::Numeric(_) => 4,
        }
    }
}
