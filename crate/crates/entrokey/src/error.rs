//! Crate-wide error type.

use std::path::PathBuf;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("cannot access {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("{path}:{line}: malformed record: {message}")]
    MalformedRecord {
        path: PathBuf,
        line: usize,
        message: String,
    },

    #[error("duplicate document id {id:?}")]
    DuplicateId { id: String },

    #[error("invalid document {id:?}: {message}")]
    InvalidDocument { id: String, message: String },

    #[error("max_match segmentation requires a dictionary")]
    DictionaryRequired,

    #[error("empty dictionary: {path}")]
    EmptyDictionary { path: PathBuf },

    #[error("word {word:?} is not in the vocabulary")]
    UnknownWord { word: String },

    #[error("document {id:?} has no tokens; segment the corpus first")]
    Untokenized { id: String },

    #[error("corpus has no {class} labeled documents")]
    MissingClass { class: &'static str },

    #[error("invalid probability vector: {message}")]
    InvalidProbabilities { message: String },

    #[error("invalid alpha grid: {message}")]
    InvalidGrid { message: String },

    #[error("keyword list polarity mismatch: {message}")]
    PolarityMismatch { message: String },

    #[error("invalid keyword list: {message}")]
    InvalidKeywordList { message: String },

    #[error("training set is empty")]
    EmptyTrainingSet,

    #[error("training set contains a single class")]
    SingleClassTrainingSet,

    #[error("keyword vocabulary is empty")]
    EmptyVocabulary,

    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("length mismatch: {left} vs {right}")]
    LengthMismatch { left: usize, right: usize },

    #[error("non-finite value in {what}")]
    NonFinite { what: &'static str },

    #[error("unrecognized model file: {message}")]
    ModelFormat { message: String },

    #[error("model file integrity error: {message}")]
    ModelIntegrity { message: String },

    #[error("invalid fold plan: {message}")]
    InvalidFolds { message: String },

    #[error("empty input: {what}")]
    EmptyInput { what: &'static str },

    #[error("label must be +1 or -1, found {value}")]
    InvalidLabel { value: i64 },

    #[error("invalid configuration: {message}")]
    InvalidConfig { message: String },

    #[error("invalid synthetic spec: {message}")]
    InvalidSpec { message: String },

    #[error("stage {stage} failed: {source}")]
    Stage {
        stage: &'static str,
        #[source]
        source: Box<Error>,
    },

    #[error("output directory is locked by another run: {path}")]
    OutputLocked { path: PathBuf },
}

impl Error {
    /// An [`Error::Io`] tagged with the file it concerns.
    pub fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }

    /// Stage name if this error was raised while running a pipeline stage.
    pub fn stage(&self) -> Option<&'static str> {
        match self {
            Error::Stage { stage, .. } => Some(stage),
            _ => None,
        }
    }
}
