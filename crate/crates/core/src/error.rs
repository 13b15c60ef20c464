use std::path::PathBuf;

use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("cannot read {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("csv error: {0}")]
    Csv(#[from] csv::Error),

    #[error("row {row}, column {column:?}: cannot parse {value:?} as a number")]
    UnparseableCell {
        row: usize,
        column: String,
        value: String,
    },

    #[error("label column {0:?} not found")]
    MissingLabelColumn(String),

    #[error("invalid dataset: {0}")]
    InvalidDataset(String),

    #[error("dimension mismatch: expected {expected}, got {actual}")]
    DimensionMismatch { expected: usize, actual: usize },

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("instance {instance} has no {kind} (class {class} needs at least two members)")]
    EmptyNeighborSet {
        instance: usize,
        class: usize,
        kind: &'static str,
    },

    #[error("degenerate result: {0}")]
    Degenerate(String),

    #[error("no weak learner retained after {rounds} boosting rounds")]
    NoLearnerRetained { rounds: usize },

    #[error("cross-validation failed at repeat {repeat}, fold {fold}: {source}")]
    Fold {
        repeat: usize,
        fold: usize,
        #[source]
        source: Box<Error>,
    },

    #[error("model file: {0}")]
    Format(String),

    #[error("json: {0}")]
    Json(#[from] serde_json::Error),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
