use thiserror::Error;

/// Errors raised by the numerical kernel and the quantifiers built on it.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("matrix is not square: {rows}x{cols}")]
    NotSquare { rows: usize, cols: usize },

    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("matrix has {entries} entries, shape {rows}x{cols} needs {}", rows * cols)]
    Shape { rows: usize, cols: usize, entries: usize },

    #[error("matrix contains a non-finite entry")]
    NonFinite,

    #[error("hermiticity violated: max |M - M^dagger| = {0:e}")]
    NotHermitian(f64),

    #[error("trace violated: trace = {trace}, deficit {deficit:e}")]
    Trace { trace: f64, deficit: f64 },

    #[error("positivity violated: minimum eigenvalue {0:e}")]
    NotPositive(f64),

    #[error("eigensolver did not converge after {sweeps} sweeps (off-diagonal residual {residual:e})")]
    Convergence { sweeps: usize, residual: f64 },

    #[error("domain error: {0}")]
    Domain(String),

    #[error("invalid probability distribution: {0}")]
    InvalidDistribution(String),

    #[error("matrix is not unitary: max |U^dagger U - I| = {0:e}")]
    NotUnitary(f64),

    #[error("channel is not trace preserving: max |sum K^dagger K - I| = {0:e}")]
    NotTracePreserving(f64),

    #[error("optimizer budget must be nonzero")]
    ZeroBudget,

    #[error("zero vector cannot be normalized")]
    ZeroVector,
}

pub type Result<T> = std::result::Result<T, Error>;
