use thiserror::Error;

/// Errors raised across the workbench.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("parse error at line {line}: {message}")]
    Parse { line: usize, message: String },

    #[error("invalid globular set: {0}")]
    Globular(#[from] crate::globular::GlobularViolation),

    #[error("invalid map: {0}")]
    InvalidMap(String),

    #[error("codomain mismatch: {0}")]
    CodomainMismatch(String),

    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("ill-typed term: {0}")]
    IllTyped(String),

    #[error("non-parallel attachment for generator `{generator}`: {reason}")]
    NonParallelAttachment { generator: String, reason: String },

    #[error("invalid algebra: {0}")]
    InvalidAlgebra(String),

    #[error("invalid collection: {0}")]
    InvalidCollection(String),

    #[error("internal soundness failure: {0}")]
    Soundness(String),

    #[error("unknown catalog entry `{0}`")]
    UnknownCatalogEntry(String),

    #[error("usage error: {0}")]
    Usage(String),
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    pub(crate) fn parse(line: usize, message: impl Into<String>) -> Self {
        Error::Parse {
            line,
            message: message.into(),
        }
    }
}
