use std::path::PathBuf;

use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    /// A value lies outside the domain where an operation is defined.
    #[error("domain error: {0}")]
    Domain(String),

    /// A caller broke an operation's contract (e.g. lossy bounding medium).
    #[error("contract violation: {0}")]
    Contract(String),

    /// A type invariant is violated; `field` names the offending entry.
    #[error("invalid {field}: {reason}")]
    Invariant { field: String, reason: String },

    #[error("parse error in {source_name}: {message}")]
    Parse { source_name: String, message: String },

    #[error("numeric failure: {0}")]
    Numeric(String),

    #[error("insufficient data: {0}")]
    InsufficientData(String),

    /// The Hopfield matrix produced complex eigenvalues.
    #[error("model instability: {0}")]
    ModelInstability(String),

    #[error("bracketing error: {0}")]
    Bracket(String),

    #[error("data error: {0}")]
    Data(String),

    #[error("config error: {0}")]
    Config(String),

    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}

impl Error {
    pub(crate) fn invariant(field: impl Into<String>, reason: impl Into<String>) -> Self {
        Error::Invariant {
            field: field.into(),
            reason: reason.into(),
        }
    }

    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }

    /// Prefixes the message with context, keeping the variant.
    pub fn context(self, ctx: impl std::fmt::Display) -> Self {
        match self {
            Error::Domain(m) => Error::Domain(format!("{ctx}: {m}")),
            Error::Contract(m) => Error::Contract(format!("{ctx}: {m}")),
            Error::Numeric(m) => Error::Numeric(format!("{ctx}: {m}")),
            Error::InsufficientData(m) => Error::InsufficientData(format!("{ctx}: {m}")),
            Error::ModelInstability(m) => Error::ModelInstability(format!("{ctx}: {m}")),
            Error::Bracket(m) => Error::Bracket(format!("{ctx}: {m}")),
            Error::Data(m) => Error::Data(format!("{ctx}: {m}")),
            Error::Config(m) => Error::Config(format!("{ctx}: {m}")),
            Error::Invariant { field, reason } => Error::Invariant {
                field: format!("{ctx}: {field}"),
                reason,
            },
            other => other,
        }
    }
}
