use thiserror::Error;

/// Errors shared across the crate.
#[derive(Debug, Error)]
pub enum Error {
    #[error("matrix dimension {n} exceeds the dense-hafnian cap of {cap}")]
    DimensionTooLarge { n: usize, cap: usize },

    #[error("length mismatch: matrix dimension {dim}, index length {len}")]
    LengthMismatch { dim: usize, len: usize },

    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("value overflows the representable floating-point range")]
    Overflow,

    #[error("eigendecomposition did not converge within {0} sweeps")]
    ConvergenceFailure(usize),

    #[error("parameter out of range: {0}")]
    ParameterOutOfRange(String),

    #[error("spectrum violation: {0}")]
    SpectrumViolation(String),

    #[error("Cholesky factorization failed: matrix not positive definite")]
    CholeskyFailure,

    #[error("empty sample set")]
    EmptySampleSet,

    #[error("probability estimator requires all coefficients nonnegative")]
    NegativeCoefficients,

    #[error("probability estimator requires all covariance entries strictly positive")]
    NonPositiveB,

    #[error("zero hafnian in denominator at index {0}")]
    ZeroHafnianDivision(String),

    #[error("mean is zero; multiplicative error is undefined")]
    ZeroMean,

    #[error("no lower bound for the mean: supply mu0 or the alpha parameters")]
    MissingMuBound,

    #[error("domain violation: {0}")]
    DomainViolation(String),

    #[error("cost guard tripped: {0}")]
    CostGuard(String),

    #[error("invalid configuration: {0}")]
    InvalidConfig(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
