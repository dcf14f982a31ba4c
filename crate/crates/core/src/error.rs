use thiserror::Error;

/// Errors raised across the library.
#[derive(Debug, Error)]
pub enum Error {
    #[error("dataset is empty")]
    EmptyData,
    #[error("sample {index} is deferred but has no expert prediction")]
    MissingExpertLabel { index: usize },
    #[error("value {value} outside the valid range [{min}, {max}]")]
    OutOfRange { value: usize, min: usize, max: usize },
    #[error("label {label} is not a class in [1, {classes}]")]
    InvalidLabel { label: usize, classes: usize },
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },
    #[error("invalid world: {0}")]
    InvalidWorld(String),
    #[error("invalid cost: {0}")]
    InvalidCost(String),
    #[error("construction failed: {0}")]
    ConstructionFailed(String),
    #[error("search size {requested} exceeds the configured cap {cap}")]
    SizeLimit { requested: u128, cap: u128 },
    #[error("labeled pool is empty")]
    EmptyPool,
    #[error("version space is empty; realizability is violated")]
    EmptyVersionSpace,
    #[error("input {0} must be nonnegative")]
    NegativeInput(f64),
    #[error("invalid distribution: {0}")]
    InvalidDistribution(String),
    #[error("training diverged at epoch {epoch} (loss {loss})")]
    Divergence { epoch: usize, loss: f64 },
    #[error("invalid configuration: {0}")]
    Config(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Csv(#[from] csv::Error),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
