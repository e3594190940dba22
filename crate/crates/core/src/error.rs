//! Error type shared by every module, with a mapping onto CLI exit codes.

use std::path::PathBuf;

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    /// Malformed input file: ragged rows, missing sections, empty files.
    #[error("structural error: {0}")]
    Structural(String),

    /// A value that is well-formed but not allowed by the declared schema.
    #[error("validation error: row {row}, attribute `{attribute}`: {detail}")]
    Validation {
        row: usize,
        attribute: String,
        detail: String,
    },

    #[error("configuration error: {0}")]
    Config(String),

    #[error("manifest error at `{path}`: {detail}")]
    Manifest { path: String, detail: String },

    #[error("discretization error: {0}")]
    Discretization(String),

    #[error("usage error: {0}")]
    Usage(String),

    #[error("formula error: {0}")]
    Formula(String),

    #[error("timeliness indeterminate: {0}")]
    Timeliness(String),

    /// Too few records for the requested cross-validation.
    #[error("insufficient data: {0}")]
    InsufficientData(String),

    #[error("I/O error on {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    /// An internal invariant did not hold. Always a bug.
    #[error("internal invariant violated: {0}")]
    Invariant(String),
}

impl Error {
    pub fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }

    pub fn manifest(path: impl Into<String>, detail: impl Into<String>) -> Self {
        Error::Manifest {
            path: path.into(),
            detail: detail.into(),
        }
    }

    /// Process exit code: 1 usage/config, 2 I/O, 3 internal invariant.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Io { .. } => 2,
            Error::Invariant(_) => 3,
            _ => 1,
        }
    }
}
