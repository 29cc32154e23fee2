use thiserror::Error;

use crate::monomial::Permutation;

pub type Result<T, E = MubError> = std::result::Result<T, E>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum MubError {
    #[error("matrix must be square with n >= 1, got {rows}x{cols}")]
    NotSquare { rows: usize, cols: usize },
    #[error("matrix has a non-finite entry at ({row}, {col})")]
    NonFinite { row: usize, col: usize },
    #[error("tolerance must satisfy 0 <= eps < 1, got {0}")]
    InvalidTolerance(f64),
    #[error("dimension must be positive")]
    ZeroDimension,
    #[error("dimension mismatch: {left} vs {right}")]
    DimensionMismatch { left: usize, right: usize },
    #[error("list length mismatch: {left} vs {right}")]
    LengthMismatch { left: usize, right: usize },
    #[error("dimension {n} exceeds the enumeration bound {max}")]
    DimensionTooLarge { n: usize, max: usize },
    #[error("matrix is not monomial (row or column {index} has no unique unit-modulus entry)")]
    NotMonomial { index: usize },
    #[error("matrix is not unitary (max |M^dag M - 1| = {residual:e})")]
    UnitaryRequired { residual: f64 },
    #[error("matrix is not a complex Hadamard matrix")]
    NotHadamard,
    #[error("bases {first} and {second} are not mutually unbiased")]
    NotAMubList { first: usize, second: usize },
    #[error("a MUB list in dimension {n} holds at most {max} bases, got {len}")]
    TooManyBases { n: usize, len: usize, max: usize },
    #[error("{0}")]
    InvalidArgument(String),
    #[error("unexpected solution space for (rho, sigma) = ({rho}, {sigma}): {reason}")]
    UnexpectedSolutionSpace {
        rho: Permutation,
        sigma: Permutation,
        reason: String,
    },
    #[error("computed element set is not closed under composition")]
    NotClosed,
    #[error("internal witness check failed")]
    WitnessRejected,
}
