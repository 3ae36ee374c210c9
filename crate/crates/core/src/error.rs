use crate::UserId;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("line {line}: {message}")]
    Parse { line: u64, message: String },

    #[error("input contains no data rows")]
    EmptyInput,

    #[error("book catalog is empty")]
    EmptyCatalog,

    #[error("invalid book label {0:?}: expected \"B\" followed by decimal digits")]
    InvalidBookLabel(String),

    #[error("book label {0:?} appears more than once in the catalog")]
    DuplicateBook(String),

    #[error("unknown book label {0:?}")]
    UnknownBook(String),

    #[error("edge {index} has no book annotation")]
    Unannotated { index: usize },

    #[error("split ratio {0} is outside the open interval (0, 1)")]
    InvalidRatio(f64),

    #[error("cannot split {n} rows: {reason}")]
    TooFewRows { n: usize, reason: &'static str },

    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("feature vectors must be non-empty and finite")]
    InvalidFeature,

    #[error("k = {k} is invalid: must satisfy 1 <= k <= {max}")]
    InvalidK { k: usize, max: usize },

    #[error("k range {kmin}..={kmax} is invalid: must satisfy 1 <= kmin <= kmax <= {max}")]
    InvalidRange { kmin: usize, kmax: usize, max: usize },

    #[error("limit must be a positive integer")]
    InvalidLimit,

    #[error("length mismatch: {predictions} predictions vs {truth} truth labels")]
    LengthMismatch { predictions: usize, truth: usize },

    #[error("cannot score an empty prediction set")]
    EmptyPredictions,

    #[error("training set must contain at least one row")]
    EmptyTrainingSet,

    #[error("unknown user {0}")]
    UnknownUser(UserId),

    #[error("invalid model document: {0}")]
    Model(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),
}
