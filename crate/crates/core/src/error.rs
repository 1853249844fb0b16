//! Pipeline-wide error type and exit-code mapping.

use std::path::PathBuf;

/// Errors produced anywhere in the pipeline.
///
/// Variants are grouped by the class of failure so that callers (most
/// importantly the CLI) can map them onto stable exit codes: validation
/// failures exit 2, backend and protocol failures exit 3, I/O failures
/// exit 4.
#[derive(Debug, thiserror::Error)]
pub enum Error {
    /// Input data violates a documented precondition or invariant.
    #[error("validation: {0}")]
    Validation(String),

    /// A structured document did not match its schema. `path` is the file,
    /// `field` the offending location inside it.
    #[error("schema violation in {path}: {field}: {message}")]
    Schema {
        path: String,
        field: String,
        message: String,
    },

    /// A segmenter backend failed or misbehaved.
    #[error("backend: {0}")]
    Backend(String),

    /// A backend subprocess broke the line-delimited protocol.
    #[error("protocol: {0}")]
    Protocol(String),

    /// Filesystem or encoding failure, with the path involved.
    #[error("io: {path}: {message}")]
    Io { path: PathBuf, message: String },
}

impl Error {
    pub fn validation(msg: impl Into<String>) -> Self {
        Error::Validation(msg.into())
    }

    pub fn backend(msg: impl Into<String>) -> Self {
        Error::Backend(msg.into())
    }

    pub fn io(path: impl Into<PathBuf>, err: impl std::fmt::Display) -> Self {
        Error::Io {
            path: path.into(),
            message: err.to_string(),
        }
    }

    /// Exit code the CLI reports for this error: 2 validation, 3 backend,
    /// 4 io.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Validation(_) | Error::Schema { .. } => 2,
            Error::Backend(_) | Error::Protocol(_) => 3,
            Error::Io { .. } => 4,
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
