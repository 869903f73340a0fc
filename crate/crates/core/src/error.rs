use std::path::PathBuf;

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("empty corpus")]
    EmptyCorpus,

    #[error("empty embedding")]
    EmptyEmbedding,

    /// A word2vec text file could not be parsed. `line` is 1-based.
    #[error("{message} at line {line}")]
    Parse { line: usize, message: String },

    #[error("no vocabulary overlap")]
    NoVocabularyOverlap,

    #[error("empty distribution")]
    EmptyDistribution,

    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("target dimension {requested} exceeds effective rank {rank}")]
    RankDeficient { requested: usize, rank: usize },

    #[error("diverged at epoch {epoch}")]
    Diverged { epoch: usize },

    #[error("degenerate split: a class is absent from the training set after {attempts} attempts")]
    DegenerateSplit { attempts: usize },

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("invalid manifest: {0}")]
    Manifest(String),

    #[error("invalid dataset: {0}")]
    Dataset(String),

    #[error("{}: {source}", path.display())]
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
        Error::InvalidParameter(msg.into())
    }
}
