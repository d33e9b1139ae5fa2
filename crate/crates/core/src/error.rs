use alloc::string::String;

/// Errors raised by the measurement toolkit.
#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    #[error("matrix is not Hermitian (max asymmetry {0:e})")]
    NotHermitian(f64),

    #[error("operator is not positive semidefinite (min eigenvalue {0:e})")]
    NotPositive(f64),

    #[error("not normalized (got {0})")]
    NotNormalized(f64),

    #[error("matrix is not unitary (defect {0:e})")]
    NotUnitary(f64),

    #[error("operator is not diagonal")]
    NotDiagonal,

    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimMismatch { expected: usize, got: usize },

    #[error("length mismatch: {0} vs {1}")]
    LengthMismatch(usize, usize),

    #[error("bad matrix shape: {0}")]
    BadShape(String),

    #[error("invalid probability {0}")]
    BadProbability(f64),

    #[error("outcome {outcome} has probability {prob:e}; post-measurement state undefined")]
    ZeroProbabilityOutcome { outcome: usize, prob: f64 },

    #[error("outcome index {0} out of range")]
    OutcomeOutOfRange(usize),

    #[error("measurement has no operators")]
    EmptyMeasurement,

    #[error("measurement is not commutative")]
    NotCommutative,

    #[error("ensemble is not made of pure states")]
    NotPure,

    #[error("random normalizer was singular after {0} attempts")]
    SingularNormalizer(usize),

    #[error("unsupported dimension {0}")]
    UnsupportedDimension(usize),

    #[error("non-finite value encountered")]
    NonFinite,
}

pub type Result<T> = core::result::Result<T, Error>;
