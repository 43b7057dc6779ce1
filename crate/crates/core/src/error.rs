use std::path::PathBuf;

/// Errors raised by the core library.
#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("{path}: line {line}: malformed JSON: {message}")]
    MalformedLine {
        path: PathBuf,
        line: usize,
        message: String,
    },

    #[error("{path}: line {line}: missing field `{field}`")]
    MissingField {
        path: PathBuf,
        line: usize,
        field: String,
    },

    #[error("duplicate document id `{0}`")]
    DuplicateId(String),

    #[error("document `{0}`: empty source")]
    EmptySource(String),

    #[error("document `{0}`: empty reference")]
    EmptyReference(String),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("metric {0} needs a reference summary")]
    MissingReference(String),

    #[error("document `{0}` is missing")]
    MissingDocument(String),

    #[error("non-finite value: {0}")]
    NonFinite(String),

    #[error("I/O error on {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl Error {
    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }

    pub(crate) fn invalid(msg: impl Into<String>) -> Self {
        Error::InvalidArgument(msg.into())
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
