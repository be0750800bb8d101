use std::path::PathBuf;

use thiserror::Error;

use crate::annotation::Method;

pub type Result<T, E = TamError> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum TamError {
    #[error("unknown TAM label {0:?}")]
    UnknownLabel(String),

    #[error("line {line}: unknown or missing TAM label {label:?}")]
    UnknownLabelAt { line: usize, label: String },

    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("line {line}: {reason}")]
    Format { line: usize, reason: String },

    #[error("empty sentence")]
    EmptySentence,

    #[error("method mismatch: expected {expected}, got {found}")]
    MethodMismatch { expected: Method, found: Method },

    #[error("corpus is empty")]
    EmptyCorpus,

    #[error("index has no retrievable entries")]
    EmptyIndex,

    #[error("no neighbors to vote on")]
    EmptyNeighborList,

    #[error("training set is empty")]
    EmptyTrainingSet,

    #[error("no recognizable verb in {0:?}")]
    Unlabelable(String),

    #[error("a lexicon is required for the annotated method")]
    MissingLexicon,

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("snapshot: {0}")]
    Snapshot(String),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl TamError {
    pub fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        TamError::Io {
            path: path.into(),
            source,
        }
    }

    pub(crate) fn format(line: usize, reason: impl Into<String>) -> Self {
        TamError::Format {
            line,
            reason: reason.into(),
        }
    }
}
