use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Error {
    #[error("division by the zero polynomial")]
    ZeroDivisor,
    #[error("level {q} exceeds the number of variables {n}")]
    LevelTooLarge { q: usize, n: usize },
    #[error("moment matrix dimension {dim} exceeds the limit {limit}")]
    DimensionTooLarge { dim: usize, limit: usize },
    #[error("matrix is not symmetric at ({row}, {col})")]
    NotSymmetric { row: usize, col: usize },
    #[error("expected {expected} weights, got {got}")]
    WeightLength { expected: usize, got: usize },
    #[error("invalid instance: {0}")]
    InvalidInstance(String),
    #[error("parameter {alpha} must be a non-integer in (0, n]")]
    IntegralAlpha { alpha: String },
    #[error("normalization sum {sum} is not positive")]
    NonPositiveNormalization { sum: String },
    #[error("polynomial degree {degree} exceeds the admissible bound {bound}")]
    DegreeTooLarge { degree: usize, bound: usize },
    #[error("invalid level {t} for n = {n}")]
    InvalidLevel { t: usize, n: usize },
    #[error("cannot parse rational from {0:?}")]
    ParseRational(String),
    #[error("{0} has no rational square root")]
    NotASquare(String),
}

pub type Result<T> = std::result::Result<T, Error>;
