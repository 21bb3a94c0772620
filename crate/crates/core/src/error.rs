use thiserror::Error;

/// Errors surfaced by the library.
#[derive(Debug, Error)]
pub enum Error {
    #[error("parse error{}: {message}", line.map(|l| format!(" at line {l}")).unwrap_or_default())]
    Parse { line: Option<usize>, message: String },

    #[error("invalid `{field}`: {reason}")]
    Invalid { field: String, reason: String },

    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("unknown scene kind `{0}`")]
    UnknownScene(String),

    #[error("unknown solver kind `{0}`")]
    UnknownSolver(String),

    #[error("protocol error ({code}): {message}")]
    Protocol { code: String, message: String },

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl Error {
    pub(crate) fn invalid(field: impl Into<String>, reason: impl Into<String>) -> Self {
        Error::Invalid {
            field: field.into(),
            reason: reason.into(),
        }
    }

    pub(crate) fn toml(document: &str, e: toml::de::Error) -> Self {
        Error::Parse {
            line: e.span().map(|s| document[..s.start.min(document.len())].matches('\n').count() + 1),
            message: e.message().to_string(),
        }
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
