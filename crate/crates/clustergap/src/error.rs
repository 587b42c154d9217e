//! Crate-wide error type.
//!
//! Every fallible operation in the crate returns [`Result`]; validation
//! failures carry enough context (indices, expected/found values) to point
//! at the offending input directly.

use thiserror::Error;

/// Convenience alias used throughout the crate.
pub type Result<T> = std::result::Result<T, Error>;

/// All error conditions produced by this crate.
#[derive(Debug, Error)]
pub enum Error {
    /// A dataset must contain at least one point.
    #[error("dataset is empty")]
    EmptyDataset,

    /// A point's coordinate count disagrees with the dataset dimension.
    #[error("point {index} has {found} coordinates, expected {expected}")]
    DimensionMismatch {
        expected: usize,
        found: usize,
        index: usize,
    },

    /// A coordinate is NaN or infinite.
    #[error("point {index} has a non-finite coordinate")]
    NonFiniteCoordinate { index: usize },

    /// A partition's label vector does not line up with the dataset.
    #[error("partition has {labels} labels but the dataset has {points} points")]
    LabelCountMismatch { labels: usize, points: usize },

    /// A label lies outside `[0, k)`.
    #[error("label {label} at row {index} is out of range for k = {k}")]
    LabelOutOfRange {
        index: usize,
        label: usize,
        k: usize,
    },

    /// Every cluster index in `[0, k)` must have at least one member.
    #[error("cluster {cluster} has no members")]
    EmptyCluster { cluster: usize },

    /// A cluster index argument exceeds the partition's `k`.
    #[error("cluster index {index} is out of range for k = {k}")]
    ClusterIndexOutOfRange { index: usize, k: usize },

    /// `k` is zero or exceeds the number of points.
    #[error("k = {k} is invalid for a dataset of {n} points")]
    InvalidK { k: usize, n: usize },

    /// An operation requires at least two clusters.
    #[error("operation requires k >= 2, got k = {k}")]
    TooFewClusters { k: usize },

    /// A per-cluster argument list has the wrong length.
    #[error("{what} has length {found}, expected {expected}")]
    LengthMismatch {
        what: &'static str,
        expected: usize,
        found: usize,
    },

    /// A scalar parameter failed validation.
    #[error("invalid {name}: {reason}")]
    InvalidParameter { name: &'static str, reason: String },

    /// A probability or fraction argument lies outside its admissible range.
    #[error("invalid {name} = {value}: outside admissible range")]
    InvalidProbability { name: &'static str, value: f64 },

    /// A success-probability target cannot be met (single-run probability is zero).
    #[error("success target is unsatisfiable: single-run probability is zero")]
    UnsatisfiableTarget,

    /// The brute-force oracle refuses instances beyond its guard size.
    #[error("oracle refuses n = {n} points (guard limit {max_n}); enumeration would be astronomical")]
    OracleTooLarge { n: usize, max_n: usize },

    /// A theorem-hypothesis precondition does not hold for the supplied data.
    #[error("precondition violated: {what}")]
    PreconditionViolated { what: String },

    /// A CSV cell could not be interpreted.
    #[error("malformed CSV at row {row}: {message}")]
    CsvFormat { row: usize, message: String },

    /// Underlying I/O failure.
    #[error(transparent)]
    Io(#[from] std::io::Error),

    /// CSV reader/writer failure.
    #[error(transparent)]
    Csv(#[from] csv::Error),

    /// JSON serialization/deserialization failure.
    #[error(transparent)]
    Json(#[from] serde_json::Error),
}
