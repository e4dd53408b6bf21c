use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum PolyError {
    #[error("syntax error at position {pos}: {msg}")]
    Syntax { pos: usize, msg: String },
    #[error("mixed degrees: term at position {pos} has degree {found}, expected {expected}")]
    MixedDegree {
        pos: usize,
        expected: usize,
        found: usize,
    },
    #[error("variable x{index} out of range for dimension {n}")]
    VariableOutOfRange { index: usize, n: usize },
    #[error("dimension mismatch: expected {expected}, got {found}")]
    DimensionMismatch { expected: usize, found: usize },
    #[error("degree mismatch: {0} vs {1}")]
    DegreeMismatch(usize, usize),
    #[error("expected a cubic form, got degree {0}")]
    NotCubic(usize),
    #[error("dimension must be positive")]
    ZeroDimension,
    #[error("unknown inner-product scheme `{0}`")]
    UnknownScheme(String),
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum AlgebraError {
    #[error(transparent)]
    Poly(#[from] PolyError),
    #[error("Gram matrix is not symmetric")]
    NotSymmetric,
    #[error("Gram matrix is singular")]
    SingularGram,
    #[error("Gram matrix is not positive definite")]
    NotPositiveDefinite,
    #[error("operation requires the identity metric")]
    NonIdentityMetric,
    #[error("zero algebra")]
    ZeroAlgebra,
    #[error("p = 2 is not admissible here (q = 2b/(p-2) is undefined)")]
    PIsTwo,
    #[error("p = infinity is not admissible here")]
    PInfinite,
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum SearchError {
    #[error(transparent)]
    Algebra(#[from] AlgebraError),
    #[error("invalid dimension {0}: need n >= 2")]
    InvalidDimension(usize),
    #[error("at least one restart is required")]
    NoRestarts,
    #[error("grid resolution {0} too coarse: need at least 10 points per axis")]
    GridTooCoarse(usize),
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum FixtureError {
    #[error("unknown fixture `{0}`; known: {1}")]
    Unknown(String, String),
    #[error("fixture `{fixture}`: fact `{fact}` failed to re-verify")]
    FactFailed { fixture: String, fact: String },
}
