use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("parse error at line {line}: {message}")]
    Parse { line: u64, message: String },

    #[error("empty input: {0}")]
    EmptyInput(String),

    #[error("no overlapping date range across {0} series")]
    DisjointRange(usize),

    #[error("column `{0}` has zero variance")]
    DegenerateColumn(String),

    #[error("correlation undefined: column `{0}` is constant")]
    UndefinedCorrelation(String),

    #[error("insufficient data: {0}")]
    InsufficientData(String),

    #[error("series of length {len} too short to embed with d={window}, tau={delay}; need at least {required}")]
    EmbeddingTooShort { len: usize, window: usize, delay: usize, required: usize },

    #[error("invalid parameter: {0}")]
    Parameter(String),

    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    #[error("missing diagram for `{0}`")]
    MissingDiagram(String),

    #[error("metric undefined: {0}")]
    UndefinedMetric(String),

    #[error("label sets differ: {0}")]
    MismatchedItems(String),

    #[error("domain error: {0}")]
    Domain(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),
}
