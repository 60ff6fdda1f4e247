use std::path::PathBuf;

use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

/// Broad failure category, used by the command-line front end to pick an
/// exit code.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ErrorCategory {
    Config,
    Data,
    Numeric,
    Io,
}

#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension mismatch in {op}: {left:?} vs {right:?}")]
    Shape {
        op: &'static str,
        left: Vec<usize>,
        right: Vec<usize>,
    },

    #[error("invalid input length: expected {expected} features, got {actual}")]
    FeatureLength { expected: usize, actual: usize },

    #[error("invalid configuration: {0}")]
    Config(String),

    #[error("invalid data: {0}")]
    Data(String),

    #[error("missing column(s) in {path}: {}", missing.join(", "))]
    MissingColumns { path: String, missing: Vec<String> },

    #[error("unmapped label pair ({category:?}, {subcategory:?})")]
    UnmappedLabel {
        category: String,
        subcategory: String,
    },

    #[error("row {row}: {message}")]
    Row { row: u64, message: String },

    #[error("weight manifest parse error at byte {offset}: {message}")]
    Manifest { offset: usize, message: String },

    #[error("numeric failure: {0}")]
    Numeric(String),

    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error(transparent)]
    Csv(#[from] csv::Error),
}

impl Error {
    pub fn shape(op: &'static str, left: &[usize], right: &[usize]) -> Self {
        Error::Shape {
            op,
            left: left.to_vec(),
            right: right.to_vec(),
        }
    }

    pub fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }

    pub fn category(&self) -> ErrorCategory {
        match self {
            Error::Config(_) => ErrorCategory::Config,
            Error::Numeric(_) => ErrorCategory::Numeric,
            Error::Io { .. } => ErrorCategory::Io,
            Error::Shape { .. }
            | Error::FeatureLength { .. }
            | Error::Data(_)
            | Error::MissingColumns { .. }
            | Error::UnmappedLabel { .. }
            | Error::Row { .. }
            | Error::Manifest { .. }
            | Error::Csv(_) => ErrorCategory::Data,
        }
    }
}
