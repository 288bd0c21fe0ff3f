use std::path::PathBuf;

use thiserror::Error;

/// Errors produced anywhere in the toolkit.
#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension error: {0}")]
    Dimension(String),

    #[error("invalid parameter: {0}")]
    Parameter(String),

    #[error("unknown function `{0}`")]
    UnknownFunction(String),

    #[error("unknown algorithm `{0}`")]
    UnknownAlgorithm(String),

    #[error("operator error: {0}")]
    Operator(String),

    #[error("non-finite value or gradient at iterate {iterate:?}")]
    NonFinite { iterate: Vec<f64> },

    #[error("pool initialization failed: {0}")]
    Initialization(String),

    #[error("no target value known for `{0}`; enumerate its minima first or pass a catalog")]
    MissingTarget(String),

    #[error("enumeration grid of {starts} starts exceeds the limit of {limit}")]
    GridTooLarge { starts: f64, limit: f64 },

    #[error("parse error at line {line}: {message}")]
    Parse { line: usize, message: String },

    #[error("unsupported format version {found} (expected {expected})")]
    Version { found: String, expected: u32 },

    #[error("validation failed: {0}")]
    Validation(String),

    #[error("cannot fit scaling exponent: {0}")]
    NoFit(String),

    #[error("{path}: {source}")]
    File {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

impl Error {
    pub(crate) fn parse(line: usize, message: impl Into<String>) -> Self {
        Error::Parse {
            line,
            message: message.into(),
        }
    }

    pub(crate) fn file(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::File {
            path: path.into(),
            source,
        }
    }
}
