use std::fmt;

use crate::corpus::{ConspiracyKind, StanceLabel};

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("I/O error: {0}")]
    Io(#[from] std::io::Error),

    #[error("corpus header: missing column `{0}`")]
    MissingColumn(String),

    #[error("corpus header: unknown column `{0}`")]
    UnknownColumn(String),

    #[error("row {row}, column {column}: invalid stance value `{value}` (expected 0, 1 or 2)")]
    InvalidLabel {
        row: usize,
        column: String,
        value: String,
    },

    #[error("row {row}: empty tweet id")]
    EmptyId { row: usize },

    #[error("duplicate tweet id `{id}` at rows {first} and {second}")]
    DuplicateId {
        id: String,
        first: usize,
        second: usize,
    },

    #[error("malformed CSV: {0}")]
    Csv(String),

    #[error("empty input: {0}")]
    EmptyInput(&'static str),

    #[error("cannot split a corpus of {0} tweet(s); need at least 2")]
    SplitTooSmall(usize),

    #[error("invalid configuration: {0}")]
    InvalidConfig(String),

    #[error("embedding file: {message} at byte offset {offset}")]
    EmbeddingFormat { offset: u64, message: String },

    #[error("non-finite value in row {row}, component {component}")]
    NonFinite { row: usize, component: usize },

    #[error("dimension mismatch: {expected} vs {found}")]
    DimMismatch { expected: usize, found: usize },

    #[error("embedding id sets differ; missing ids: {}", .0.join(", "))]
    Alignment(Vec<String>),

    #[error("duplicate embedding id `{0}`")]
    DuplicateEmbeddingId(String),

    #[error("corpus ids missing from {variant} embeddings: {}", .missing.join(", "))]
    MissingEmbeddings {
        variant: String,
        missing: Vec<String>,
    },

    #[error("need more than {k} points for {k} neighbours, got {n}")]
    InsufficientNeighbors { k: usize, n: usize },

    #[error("class {label} has {count} example(s); cannot synthesise neighbours")]
    DegenerateClass { label: StanceLabel, count: usize },

    #[error("degenerate training set: {0}")]
    DegenerateTraining(String),

    #[error("model file: {message} at `{path}`")]
    ModelFormat { path: String, message: String },

    #[error("unsupported model version {0}")]
    UnsupportedVersion(u64),

    #[error("{context}: {source}")]
    Context {
        context: String,
        #[source]
        source: Box<Error>,
    },
}

impl Error {
    pub(crate) fn model_format(path: impl Into<String>, message: impl fmt::Display) -> Self {
        Error::ModelFormat {
            path: path.into(),
            message: message.to_string(),
        }
    }

    pub(crate) fn embedding_format(offset: u64, message: impl Into<String>) -> Self {
        Error::EmbeddingFormat {
            offset,
            message: message.into(),
        }
    }

    pub fn context(self, context: impl Into<String>) -> Self {
        Error::Context {
            context: context.into(),
            source: Box::new(self),
        }
    }

    pub fn at_path(self, path: &std::path::Path) -> Self {
        self.context(path.display().to_string())
    }

    pub fn in_conspiracy(self, kind: ConspiracyKind, variant: &str) -> Self {
        Error::Context {
            context: format!("{variant}/{}", kind.slug()),
            source: Box::new(self),
        }
    }

    /// True when the root cause is an operating-system I/O failure.
    pub fn is_io(&self) -> bool {
        match self {
            Error::Io(_) => true,
            Error::Context { source, .. } => source.is_io(),
            _ => false,
        }
    }

    pub fn root(&self) -> &Error {
        match self {
            Error::Context { source, .. } => source.root(),
            other => other,
        }
    }
}

impl From<csv::Error> for Error {
    fn from(e: csv::Error) -> Self {
        if e.is_io_error() {
            match e.into_kind() {
                csv::ErrorKind::Io(io) => Error::Io(io),
                _ => unreachable!(),
            }
        } else {
            Error::Csv(e.to_string())
        }
    }
}
