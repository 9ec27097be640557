use std::path::PathBuf;

use thiserror::Error;

#[derive(Debug, Error)]
pub enum LabError {
    #[error("cannot read {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("cannot write {path}: {source}")]
    Write {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("config syntax error: {0}")]
    Syntax(String),

    #[error("missing section [{0}]")]
    MissingSection(String),

    #[error("missing key {key} in [{section}]")]
    MissingKey { key: String, section: String },

    #[error("invalid value {value:?} for key {key} in [{section}]: {reason}")]
    InvalidValue {
        section: String,
        key: String,
        value: String,
        reason: String,
    },

    #[error("unknown parameter {0}; expected section.key")]
    UnknownParameter(String),

    #[error("unknown check suite {0}")]
    UnknownSuite(String),

    #[error("shared simulation failed: {0}")]
    SharedRun(String),

    #[error(transparent)]
    Model(#[from] gevrey_core::Error),
}

pub type LabResult<T> = std::result::Result<T, LabError>;
