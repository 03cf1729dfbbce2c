use thiserror::Error;

/// Errors raised by operator construction, divergence evaluation and the
/// dynamics integrator.
#[derive(Debug, Error)]
pub enum Error {
    #[error("matrix is not square: {rows}x{cols}")]
    NotSquare { rows: usize, cols: usize },

    #[error("empty operator: dimension must be at least 1")]
    EmptyOperator,

    #[error("not Hermitian: entry ({row}, {col}) deviates from the conjugate transpose by {deviation:e}")]
    NotHermitian {
        row: usize,
        col: usize,
        deviation: f64,
    },

    #[error("trace is {0}, expected 1")]
    InvalidTrace(f64),

    #[error("not positive semidefinite: minimum eigenvalue {0:e}")]
    NotPositive(f64),

    #[error("not unitary: max |U^dag U - I| = {0:e}")]
    NotUnitary(f64),

    #[error("dimension mismatch: {left} vs {right}")]
    DimensionMismatch { left: usize, right: usize },

    #[error("spectrum is not sorted in non-descending order at index {0}")]
    Unsorted(usize),

    #[error("spectrum contains a non-finite value")]
    NonFinite,

    #[error("negative scale factor {0}; class scaling is defined for k >= 0 only")]
    NegativeScale(f64),

    #[error("not a probability spectrum: {0}")]
    NotProbability(String),

    #[error("Renyi order {0} is outside (0,1) U (1,inf); use relative entropy for alpha = 1")]
    InvalidAlpha(f64),

    #[error("not column-stochastic: {0}")]
    NotStochastic(String),

    #[error("Kraus set is incomplete: max |sum K^dag K - I| = {0:e}")]
    IncompleteKraus(f64),

    #[error("basis is not orthonormal: max |B^dag B - I| = {0:e}")]
    NonOrthonormalBasis(f64),

    #[error("state trace collapsed to {trace:e} at step {step}")]
    TraceCollapse { step: usize, trace: f64 },

    #[error("step {index} is not an interior grid point of a trajectory with {len} points")]
    NotInterior { index: usize, len: usize },

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
