use std::path::PathBuf;

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("dataset is empty")]
    EmptyDataset,

    #[error("duplicate record id {0:?}")]
    DuplicateId(String),

    #[error("record {id:?}: score {score} is outside [0, 1]")]
    ScoreOutOfRange { id: String, score: f64 },

    #[error("record {id:?}: {reason}")]
    InvalidProbabilities { id: String, reason: String },

    #[error("label {label:?} is not in the label space {space:?}")]
    UnknownLabel { label: String, space: Vec<String> },

    #[error("mixed label spaces: {0}")]
    MixedLabelSpaces(String),

    #[error("label space needs at least two distinct labels, found {0:?}")]
    DegenerateLabelSpace(Vec<String>),

    #[error("attribute {attribute:?} is missing on record {id:?}")]
    UnknownAttribute { attribute: String, id: String },

    #[error("subgroup absent: no records with {attribute} in {values:?}")]
    EmptySubgroup {
        attribute: String,
        values: Vec<String>,
    },

    #[error("record {id:?} has no score, but {needed_for} requires scores")]
    MissingScores { id: String, needed_for: String },

    #[error("dimension mismatch: {left} vs {right}")]
    DimensionMismatch { left: usize, right: usize },

    #[error("invalid distribution: {0}")]
    InvalidDistribution(String),

    #[error("metric {metric} is undefined (zero denominator)")]
    UndefinedMetric { metric: String },

    #[error("metric mismatch: {left} vs {right}")]
    MetricMismatch { left: String, right: String },

    #[error("unknown metric {0:?}")]
    UnknownMetric(String),

    #[error("view has no actual positives")]
    NoPositives,

    #[error("view has no actual negatives")]
    NoNegatives,

    #[error("invalid curve: {0}")]
    InvalidCurve(String),

    #[error("all {replicates} bootstrap replicates produced an undefined statistic")]
    AllReplicatesUndefined { replicates: usize },

    #[error("transportability not assessable: {0}")]
    NotAssessable(String),

    #[error("record {id:?} belongs to the {found} domain, expected {expected}")]
    DomainMismatch {
        id: String,
        expected: String,
        found: String,
    },

    #[error("synthetic group {group:?}: {reason}")]
    Unachievable { group: String, reason: String },

    #[error("unknown group {0:?}")]
    UnknownGroup(String),

    #[error("invalid configuration: {0}")]
    Config(String),

    #[error("{path}: missing required column {column:?}")]
    MissingColumn { path: PathBuf, column: String },

    #[error("{path}: row {row}: {reason}")]
    Row {
        path: PathBuf,
        row: usize,
        reason: String,
    },

    #[error("{path}: file contains no records")]
    EmptyFile { path: PathBuf },

    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("{path}: {reason}")]
    Parse { path: PathBuf, reason: String },

    #[error("{context}: {source}")]
    Context {
        context: String,
        #[source]
        source: Box<Error>,
    },
}

impl Error {
    pub(crate) fn context(self, context: impl Into<String>) -> Self {
        Error::Context {
            context: context.into(),
            source: Box::new(self),
        }
    }

    /// Strips any context wrappers.
    pub fn root(&self) -> &Error {
        match self {
            Error::Context { source, .. } => source.root(),
            other => other,
        }
    }
}
