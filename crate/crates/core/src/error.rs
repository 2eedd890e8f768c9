use thiserror::Error;

/// Errors surfaced by state construction, cone tests, and the detection
/// pipelines.
#[derive(Debug, Error)]
pub enum Error {
    #[error("matrix is not square: {rows}x{cols}")]
    NotSquare { rows: usize, cols: usize },

    #[error("dimension must be at least 1")]
    ZeroDim,

    #[error("not Hermitian: relative asymmetry {asymmetry:.3e} exceeds {limit:.3e}")]
    NotHermitian { asymmetry: f64, limit: f64 },

    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("local dimensions ({d_a},{d_b}) do not match operator dimension {dim}")]
    BadLocalDims { d_a: usize, d_b: usize, dim: usize },

    #[error("operator is not positive semi-definite (min eigenvalue {0:.3e})")]
    NotPsd(f64),

    #[error("trace is {0} but must be 1")]
    NonUnitTrace(f64),

    #[error("matrix is not unitary (deviation {0:.3e})")]
    NotUnitary(f64),

    #[error("matrix is not a proper rotation (deviation {0:.3e})")]
    NotRotation(f64),

    #[error("invalid POVM: {0}")]
    InvalidPovm(String),

    #[error("marginal is not maximally mixed (deviation {0:.3e})")]
    MarginalNotMaximallyMixed(f64),

    #[error("state is outside SEP*: {0}")]
    OutsideSepStar(String),

    #[error("state is positive semi-definite; no separating witness exists")]
    StateIsQuantum,

    #[error("negative probability {0:.3e} signals an invalid state/observable pair")]
    NegativeProbability(f64),

    #[error("unsupported local dimensions ({d_a},{d_b}): {reason}")]
    UnsupportedDims { d_a: usize, d_b: usize, reason: &'static str },

    #[error("invalid input file: {0}")]
    Parse(String),

    #[error("internal invariant violated: {0}")]
    Internal(String),
}

pub type Result<T> = std::result::Result<T, Error>;
