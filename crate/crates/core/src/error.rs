use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("dataset is empty")]
    EmptyDataset,

    #[error("dataset length {0} is odd; splitting into halves needs an even length")]
    OddDatasetLength(usize),

    #[error("index {index} out of range for length {len}")]
    IndexOutOfRange { index: usize, len: usize },

    #[error("point representation does not match the hypothesis backend: {0}")]
    RepresentationMismatch(String),

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("hypothesis class is empty")]
    EmptyClass,

    #[error("voting classifier has no members")]
    EmptyVoter,

    #[error("invalid distribution: {0}")]
    InvalidDistribution(String),

    #[error("{kind} budget exceeded: {required} required, budget is {budget}")]
    BudgetExceeded {
        kind: &'static str,
        required: String,
        budget: u64,
    },

    #[error("enumeration cap exceeded: {0}")]
    CapExceeded(String),

    #[error("round {round}: received hypothesis has weighted error {achieved}, above the edge limit {limit}")]
    EdgeViolation {
        round: usize,
        achieved: f64,
        limit: f64,
    },

    #[error("margin {margin} at example {index} is below theta = {theta}")]
    MarginBelowTheta {
        index: usize,
        margin: f64,
        theta: f64,
    },

    #[error("pruning did not succeed within {max_attempts} attempts")]
    MaxAttemptsExceeded { max_attempts: usize },

    #[error("I/O error: {0}")]
    Io(#[from] std::io::Error),

    #[error("CSV error: {0}")]
    Csv(#[from] csv::Error),

    #[error("JSON error: {0}")]
    Json(#[from] serde_json::Error),

    #[error("malformed input file: {0}")]
    MalformedFile(String),
}
