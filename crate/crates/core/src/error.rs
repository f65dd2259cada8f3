use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum BlockDetError {
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    #[error("matrix entry ({row}, {col}) is not finite")]
    NonFinite { row: usize, col: usize },

    #[error("matrix is singular to working precision")]
    SingularMatrix,

    /// A pivot block of the alpha recursion failed the pivot tolerance.
    /// `level` is the recursion level k and `index` the 1-based diagonal
    /// position N - k of the block alpha^(k)_{N-k,N-k}.
    #[error("singular pivot block alpha^({level})_({index},{index})")]
    SingularPivotBlock { level: usize, index: usize },

    #[error("index out of range: {0}")]
    IndexOutOfRange(String),

    #[error("commutation precondition violated: residual {residual:e} exceeds {threshold:e}")]
    CommutatorViolation { residual: f64, threshold: f64 },

    #[error("parse error: {0}")]
    Parse(String),
}

pub type Result<T> = std::result::Result<T, BlockDetError>;
