use thiserror::Error;

use crate::io::ParseError;

/// Errors produced by the diversity, maximization and graph routines.
#[derive(Debug, Error)]
pub enum Error {
    #[error("matrix has no rows")]
    EmptyMatrix,

    #[error("matrix is not square: row {row} has {len} entries, expected {expected}")]
    NotSquare { row: usize, len: usize, expected: usize },

    #[error("entry ({row}, {col}) is not finite: {value}")]
    NonFinite { row: usize, col: usize, value: f64 },

    #[error("negative similarity at ({row}, {col}): {value}")]
    NegativeEntry { row: usize, col: usize, value: f64 },

    #[error("diagonal entry {index} must be positive, got {value}")]
    NonPositiveDiagonal { index: usize, value: f64 },

    #[error(
        "maximization requires a symmetric similarity matrix, but Z[{row}][{col}] = {upper} \
         differs from Z[{col}][{row}] = {lower}; for nonsymmetric Z such as [[1, 1/2], [0, 1]] \
         the supremum may be unattained and may depend on q"
    )]
    NotSymmetric {
        row: usize,
        col: usize,
        upper: f64,
        lower: f64,
    },

    #[error("{n} species exceeds the enumeration cap of {cap}")]
    TooManySpecies { n: usize, cap: usize },

    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("invalid distribution: {0}")]
    InvalidDistribution(String),

    #[error("invalid order q = {0}: orders must lie in [0, inf]")]
    InvalidOrder(f64),

    #[error("orders must be nonempty and sorted ascending")]
    UnsortedOrders,

    #[error("power mean undefined: x[{index}] = {value} is not positive on the support")]
    DomainViolation { index: usize, value: f64 },

    #[error("invalid index set: {0}")]
    InvalidIndexSet(String),

    #[error("cannot normalize a zero weighting")]
    ZeroWeighting,

    #[error("linear program exceeded {0} pivots")]
    LpIterationLimit(usize),

    #[error("grid of {points} points exceeds the limit of {limit}")]
    GridTooLarge { points: u128, limit: u128 },

    #[error("invalid grid: {0}")]
    InvalidGrid(String),

    #[error("invalid graph: {0}")]
    InvalidGraph(String),

    #[error("invalid metric: {0}")]
    InvalidMetric(String),

    #[error("numerical failure: {0}")]
    Numerical(String),

    #[error(transparent)]
    Parse(#[from] ParseError),
}

pub type Result<T> = std::result::Result<T, Error>;
