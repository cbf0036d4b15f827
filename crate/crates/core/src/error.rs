use thiserror::Error;

/// Errors raised by the solver library.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("matrix is singular (pivot magnitude below tolerance)")]
    SingularMatrix,
    #[error("matrix is not symmetric")]
    NotSymmetric,
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),
    #[error("side-1 feasible set X is empty")]
    XInfeasible,
    #[error("side-1 objective is unbounded over X")]
    XUnbounded,
    #[error("side-2 feasible set Y is empty")]
    YInfeasible,
    #[error("side-2 feasible set Y is unbounded")]
    YUnbounded,
    #[error("operation requires a semi-compact program (s2 = 0)")]
    NotSemiCompact,
    #[error("operation requires equality-form constraints")]
    NotNormalForm,
    #[error("constraint rows are rank deficient")]
    RankDeficientRows,
    #[error("invalid model: {0}")]
    InvalidModel(String),
    #[error("enumeration too large: {count} joint policies exceed cap {cap}")]
    TooLarge { count: f64, cap: f64 },
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
    #[error("linear program did not terminate within the pivot limit")]
    LpIterationLimit,
}

pub type Result<T> = std::result::Result<T, Error>;
