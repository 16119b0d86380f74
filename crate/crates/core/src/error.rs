use std::path::PathBuf;

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

/// Feed-integrity problems raised while applying an event to a book.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum IntegrityError {
    #[error("unknown order id {0}")]
    UnknownOrder(u64),
    #[error("order id {0} is already live")]
    DuplicateOrder(u64),
    #[error("order {order_id}: requested {requested} shares but only {remaining} remain")]
    QuantityExceedsRemaining {
        order_id: u64,
        requested: u64,
        remaining: u64,
    },
    #[error("zero quantity")]
    ZeroQuantity,
    #[error("non-positive price {0}")]
    NonPositivePrice(i64),
    #[error("timestamp {ts_ns} precedes previous timestamp {prev_ns}")]
    TimestampRegression { ts_ns: i64, prev_ns: i64 },
    #[error("add of order {0} would cross the book in log mode")]
    CrossingAdd(u64),
    #[error("add event for order {0} is missing side or price")]
    IncompleteAdd(u64),
}

#[derive(Debug, Error)]
pub enum Error {
    #[error("feed integrity error at event {index}: {source}")]
    Integrity {
        index: usize,
        #[source]
        source: IntegrityError,
    },
    #[error("line {line}: {message}")]
    Parse { line: u64, message: String },
    #[error("line {line}: {source}")]
    LineIntegrity {
        line: u64,
        #[source]
        source: IntegrityError,
    },
    #[error("insufficient depth: requested {requested} shares, at most {available} available")]
    InsufficientDepth { requested: u64, available: u64 },
    #[error("invalid record: {0}")]
    InvalidRecord(String),
    #[error("power-law fit needs at least 2 usable points, got {usable}")]
    TooFewPoints { usable: usize },
    #[error("power-law fit is degenerate: all quote counts are equal")]
    DegenerateFit,
    #[error("invalid configuration: {0}")]
    Config(String),
    #[error("{path}: {source}")]
    File {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Csv(#[from] csv::Error),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl Error {
    pub(crate) fn file(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::File {
            path: path.into(),
            source,
        }
    }
}
