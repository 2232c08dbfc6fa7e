use thiserror::Error;

/// Errors raised anywhere in the workbench.
#[derive(Debug, Error)]
pub enum Error {
    /// Malformed input that was syntactically fine but semantically invalid.
    #[error("validation error: {0}")]
    Validation(String),

    /// Monomial or word text that failed to parse.
    #[error("parse error at byte {offset}: {message}")]
    Parse { offset: usize, message: String },

    /// An exhaustive computation would exceed its enumeration budget.
    #[error("budget exceeded: {what} (limit {limit})")]
    Budget { what: String, limit: String },

    /// An operation was applied outside of its mathematical domain.
    #[error("domain error: {0}")]
    Domain(String),

    /// A combination of factors or shapes that no formula covers.
    #[error("unsupported: {0}")]
    Unsupported(String),

    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),

    #[error("report error: {0}")]
    Report(String),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

impl Error {
    pub(crate) fn validation(msg: impl Into<String>) -> Self {
        Error::Validation(msg.into())
    }

    pub(crate) fn budget(what: impl Into<String>, limit: impl ToString) -> Self {
        Error::Budget {
            what: what.into(),
            limit: limit.to_string(),
        }
    }

    /// Process exit code used by the command-line front end.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Validation(_) | Error::Parse { .. } | Error::Domain(_) | Error::Unsupported(_) => 2,
            Error::Budget { .. } => 3,
            Error::Io(_) | Error::Report(_) => 4,
        }
    }
}

impl From<csv::Error> for Error {
    fn from(e: csv::Error) -> Self {
        match e.into_kind() {
            csv::ErrorKind::Io(io) => Error::Io(io),
            other => Error::Report(format!("{other:?}")),
        }
    }
}

impl From<serde_json::Error> for Error {
    fn from(e: serde_json::Error) -> Self {
        if e.is_io() {
            Error::Io(e.into())
        } else {
            Error::Report(e.to_string())
        }
    }
}
