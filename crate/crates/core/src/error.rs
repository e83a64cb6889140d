use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid permutation: {0}")]
    InvalidPermutation(String),

    #[error("degree mismatch: expected {expected}, found {found}")]
    DegreeMismatch { expected: usize, found: usize },

    #[error("malformed group spec `{spec}`: {reason}")]
    GroupSpec { spec: String, reason: String },

    #[error("size bound exceeded: {0}")]
    SizeBound(String),

    #[error("space mismatch: {0}")]
    SpaceMismatch(String),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("configuration is not coherent: {0}")]
    NotCoherent(String),

    #[error("fusion merges classes with different coordinate patterns: {0}")]
    PatternMismatch(String),

    #[error("not a partition: {0}")]
    NotAPartition(String),

    #[error("precondition violated: {0}")]
    Precondition(String),

    #[error("structural anomaly: {0}")]
    Anomaly(String),

    #[error("budget exhausted after {nodes} search nodes")]
    BudgetExhausted { nodes: u64 },

    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),

    #[error("json error: {0}")]
    Json(#[from] serde_json::Error),
}
