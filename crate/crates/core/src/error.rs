use std::path::PathBuf;

use thiserror::Error;

/// Errors produced anywhere in the pipeline.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("config key `{key}`: {msg}")]
    Config { key: String, msg: String },

    #[error("parse error in {path}: {msg}")]
    Parse { path: PathBuf, msg: String },

    #[error("schema mismatch in {path}: {msg}")]
    Schema { path: PathBuf, msg: String },

    #[error("model mismatch: {0}")]
    ModelMismatch(String),

    #[error("database mismatch: {0}")]
    DatabaseMismatch(String),

    #[error("missing artifact: {0}")]
    MissingArtifact(String),

    #[error("at COP {cop}: {source}")]
    AtCop {
        cop: String,
        #[source]
        source: Box<Error>,
    },

    #[error("io error on {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}

impl Error {
    pub(crate) fn invalid(msg: impl Into<String>) -> Self {
        Error::InvalidArgument(msg.into())
    }

    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }

    /// Short machine-readable tag for the error variant.
    pub fn kind(&self) -> &'static str {
        match self {
            Error::InvalidArgument(_) => "invalid_argument",
            Error::Config { .. } => "config",
            Error::Parse { .. } => "parse",
            Error::Schema { .. } => "schema",
            Error::ModelMismatch(_) => "model_mismatch",
            Error::DatabaseMismatch(_) => "database_mismatch",
            Error::MissingArtifact(_) => "missing_artifact",
            Error::AtCop { .. } => "simulation",
            Error::Io { .. } => "io",
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
