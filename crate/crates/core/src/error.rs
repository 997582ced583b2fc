use std::path::PathBuf;

use thiserror::Error;

/// Errors produced anywhere in the library.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    /// A Cholesky factorization failed even after the largest allowed jitter.
    #[error("numerical failure in {context}: factorization failed at jitter {jitter:e} (dimension {dim}, min diagonal {min_diag:e}, max diagonal {max_diag:e})")]
    NumericalFailure {
        context: String,
        jitter: f64,
        dim: usize,
        min_diag: f64,
        max_diag: f64,
    },

    #[error("degenerate posterior: every candidate has zero conditional standard deviation")]
    DegeneratePosterior,

    #[error("io error at {}: {source}", path.display())]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("parse error in {}: {message}", path.display())]
    Parse { path: PathBuf, message: String },

    #[error("internal error: {0}")]
    Internal(String),
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

    /// Adds context to a numerical failure; other variants pass through.
    pub fn with_context(self, ctx: &str) -> Self {
        match self {
            Error::NumericalFailure {
                context,
                jitter,
                dim,
                min_diag,
                max_diag,
            } => Error::NumericalFailure {
                context: format!("{ctx}: {context}"),
                jitter,
                dim,
                min_diag,
                max_diag,
            },
            other => other,
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
