use std::path::PathBuf;

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("{}", path.display())]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("row {row}: {message}")]
    Parse { row: usize, message: String },

    #[error("duplicate item id {0:?}")]
    DuplicateId(String),

    #[error("documents empty after preprocessing: {}", .0.join(", "))]
    EmptyDocuments(Vec<String>),

    #[error("invalid hyperparameters: {0}")]
    InvalidHyperparams(String),

    #[error("topic {topic} out of range (model has {topics} topics)")]
    TopicOutOfRange { topic: usize, topics: usize },

    #[error("no in-vocabulary tokens")]
    NoKnownTokens,

    #[error("unknown item {0:?}")]
    UnknownItem(String),

    #[error("rating {0} outside the 1..=5 Likert range")]
    RatingOutOfRange(i64),

    #[error("profile has no ratings")]
    EmptyProfile,

    #[error("nothing to recommend: every item has been rated")]
    NothingToRecommend,

    #[error("feature table is missing items: {}", .0.join(", "))]
    MissingFeatures(Vec<String>),

    #[error("feature table has items outside the collection: {}", .0.join(", "))]
    UnexpectedFeatures(Vec<String>),

    #[error("model file: {0}")]
    Format(String),

    #[error("{0}")]
    Invalid(String),
}

impl Error {
    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }
}
