use thiserror::Error;

/// Crate-wide error type.
///
/// Truncation metadata is explicit everywhere, so "not enough series" is an
/// error condition rather than a silent zero.
#[derive(Debug, Error)]
pub enum Error {
    #[error("series has no nonzero term below its truncation order")]
    ZeroSeries,

    #[error("exponent {num}/{den} has a denominator not dividing 24")]
    ExponentDenominator { num: i64, den: i64 },

    #[error("query at exponent {at} is at or beyond truncation {trunc} (units of 1/24)")]
    OutOfTruncation { at: i64, trunc: i64 },

    #[error("index mismatch: {a} vs {b} (doubled index)")]
    IndexMismatch { a: i64, b: i64 },

    #[error("weight mismatch: {a} vs {b} (doubled weight)")]
    WeightMismatch { a: i64, b: i64 },

    #[error("linear solve failed: {0}")]
    SolveFailed(String),

    #[error("construction failed: {0}")]
    ConstructionFailed(String),

    #[error("dataset schema error at {location}: {message}")]
    SchemaError { location: String, message: String },

    #[error("computed value disagrees with tabulated value: {0}")]
    MismatchAgainstTable(String),

    #[error("truncation insufficient: {0}")]
    InsufficientTruncation(String),

    #[error("vector ({n},{l},{m}) is not a root at t={t}")]
    NotARoot { t: i64, n: i64, l: i64, m: i64 },

    #[error("vector has non-primitive coordinates (content {content})")]
    NonPrimitive { content: i64 },

    #[error("orbit search exhausted word length {max_len} without deciding")]
    DepthExceeded { max_len: usize },

    #[error("no matching tabulated record: {0}")]
    NoMatch(String),

    #[error("io error: {0}")]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
