use std::path::PathBuf;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, thiserror::Error)]
pub enum Error {
    /// Rule and data disagree on shape (bad predicate index, missing column).
    #[error("structural error: {0}")]
    Structural(String),

    #[error("syntax error at position {position}: {message}")]
    Syntax { position: usize, message: String },

    /// A well-formed value that violates an invariant (k > arity, bad threshold, ...).
    #[error("validation error: {0}")]
    Validation(String),

    #[error("data error: {0}")]
    Data(String),

    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    /// Model output that could not be turned into the expected structure.
    #[error("format error: {message}")]
    Format { message: String, raw: String },

    #[error("provider error (status {status:?}): {message}")]
    Provider { status: Option<u16>, message: String },

    #[error("configuration error: {0}")]
    Config(String),
}

impl Error {
    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io { path: path.into(), source }
    }

    pub(crate) fn format(message: impl Into<String>, raw: impl Into<String>) -> Self {
        Error::Format { message: message.into(), raw: raw.into() }
    }
}
