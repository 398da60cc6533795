use thiserror::Error;

use crate::ideal::IdealViolation;

/// Errors raised by truncated-series operations.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SeriesError {
    #[error("negative degree (x^{m} q^{n}) is not representable")]
    NegativeDegree { m: i64, n: i64 },
    #[error("coefficient (x^{m}, q^{n}) lies outside the truncation region x <= {x_max}, q <= {q_max}")]
    OutOfRange { m: u32, n: u32, x_max: u32, q_max: u32 },
    #[error("geometric inverse of 1 - q^0 does not exist")]
    ZeroStep,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum PartitionParseError {
    #[error("empty partition literal (use `empty` for the empty partition)")]
    Blank,
    #[error("invalid part `{0}`: parts must be positive integers")]
    BadPart(String),
    #[error("parts of `{0}` are not in non-increasing order")]
    NotSorted(String),
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum MultisumError {
    #[error("profile has inconsistent dimensions: {0}")]
    Dimension(String),
    #[error("alpha is not symmetric at ({0}, {1})")]
    NotSymmetric(usize, usize),
    #[error("{0} must be a positive integer in every coordinate")]
    NonPositive(&'static str),
    #[error("beta has {got} coordinates, profile rank is {rank}")]
    BetaLength { got: usize, rank: usize },
    #[error("coordinate {r} is out of range for rank {rank}")]
    Coordinate { r: usize, rank: usize },
    #[error("term n = {n:?} has negative q-exponent {exponent}; Laurent series are not supported")]
    NegativeExponent { n: Vec<u32>, exponent: i64 },
    #[error("shift S must be positive")]
    ZeroShift,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ProverError {
    #[error("no certificate for H({}) within {max_expansions} expansions", .root.iter().map(|b| b.to_string()).collect::<Vec<_>>().join(","))]
    Exhausted { root: Vec<i64>, max_expansions: usize },
    #[error("not factorizable with this beta list: row {row}: {reason}")]
    NotFactorizable { row: usize, reason: String },
    #[error(transparent)]
    Multisum(#[from] MultisumError),
}

/// Crate-wide error used by the file-format and CLI layers.
#[derive(Debug, Error)]
pub enum Error {
    #[error(transparent)]
    Series(#[from] SeriesError),
    #[error(transparent)]
    Partition(#[from] PartitionParseError),
    #[error("invalid ideal: {}", .0.iter().map(|v| v.to_string()).collect::<Vec<_>>().join("; "))]
    Ideal(Vec<IdealViolation>),
    #[error(transparent)]
    Multisum(#[from] MultisumError),
    #[error(transparent)]
    Prover(#[from] ProverError),
    #[error("invalid q-difference system: {0}")]
    System(String),
    #[error("{path}: {message}")]
    Format { path: String, message: String },
    #[error(transparent)]
    Io(#[from] std::io::Error),
}
