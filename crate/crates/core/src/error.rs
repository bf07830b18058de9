use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Error {
    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("truncation mismatch: {left} vs {right}")]
    TruncationMismatch { left: usize, right: usize },

    #[error("coefficient {coef} of {term} has an even denominator; cannot reduce mod 2")]
    NonIntegral { term: String, coef: String },

    #[error("{0} has no decomposition of the requested form")]
    NotRepresentable(u64),

    #[error("window too small: {0}")]
    WindowTooSmall(String),

    #[error("rule for page {page} exceeds r_max = {r_max}")]
    PageBeyondLimit { page: u64, r_max: u64 },

    #[error("consistency failure at {cell}: {reason}")]
    Consistency { cell: String, reason: String },

    #[error("filtration condition fails at level {level}: witness {witness:?}")]
    FiltrationCondition { level: usize, witness: Vec<String> },

    #[error("square is not co-cartesian: images miss {witness:?}")]
    NotCocartesian { witness: Vec<String> },

    #[error("map does not respect relations: {0}")]
    IllDefinedMap(String),
}
