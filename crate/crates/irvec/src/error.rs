//! Crate-wide error type.

use std::fmt;

/// Errors produced by parsing, training, encoding and the evaluation harness.
#[derive(Debug)]
pub enum Error {
    /// Unparseable input text, with 1-based line and column.
    Syntax { line: usize, col: usize, msg: String },
    /// A construct outside the supported IR subset.
    UnsupportedConstruct { line: usize, token: String },
    /// Vectors of different lengths where equal lengths are required.
    DimensionMismatch { expected: usize, got: usize },
    /// An entity or relation name missing from the vocabulary.
    UnknownEntity(String),
    /// A config value outside its allowed range.
    InvalidConfig(String),
    /// Cycle solver failed to converge within the retry budget.
    NoConvergence { retries: usize },
    /// Cycle system stayed singular through every perturbation attempt.
    SingularAfterPerturbation { retries: usize },
    /// Requested function is not defined in the module.
    UnknownFunction(String),
    /// Dataset with a single class (nothing to fit).
    DegenerateDataset,
    /// Too few points or dimensions for the requested projection.
    DegenerateData(String),
    /// Fewer rows than the fold layout requires.
    InsufficientData(String),
    /// Malformed vocabulary, vector, triplet or dataset file.
    Format(String),
    Io(std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

impl fmt::Display for Error {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Error::Syntax { line, col, msg } => {
                write!(f, "syntax error at {}:{}: {}", line, col, msg)
            }
            Error::UnsupportedConstruct { line, token } => {
                write!(f, "unsupported construct at line {}: `{}`", line, token)
            }
            Error::DimensionMismatch { expected, got } => {
                write!(f, "dimension mismatch: expected {}, got {}", expected, got)
            }
            Error::UnknownEntity(name) => write!(f, "unknown entity `{}`", name),
            Error::InvalidConfig(msg) => write!(f, "invalid config: {}", msg),
            Error::NoConvergence { retries } => {
                write!(f, "cycle solver did not converge after {} perturbation retries", retries)
            }
            Error::SingularAfterPerturbation { retries } => {
                write!(f, "cycle system singular after {} perturbation retries", retries)
            }
            Error::UnknownFunction(name) => write!(f, "unknown function `{}`", name),
            Error::DegenerateDataset => write!(f, "dataset has a single class"),
            Error::DegenerateData(msg) => write!(f, "degenerate data: {}", msg),
            Error::InsufficientData(msg) => write!(f, "insufficient data: {}", msg),
            Error::Format(msg) => write!(f, "format error: {}", msg),
            Error::Io(e) => write!(f, "io error: {}", e),
        }
    }
}

impl std::error::Error for Error {
    fn source(&self) -> Option<&(dyn std::error::Error + 'static)> {
        match self {
            Error::Io(e) => Some(e),
            _ => None,
        }
    }
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e)
    }
}
