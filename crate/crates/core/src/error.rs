use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("division by non-monomial scalar {0}")]
    NonMonomialDivision(String),
    #[error("cannot evaluate {0}")]
    Evaluation(String),
    #[error("cannot parse scalar literal {0:?}")]
    Parse(String),
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("degree mismatch: {0} vs {1}")]
    DegreeMismatch(usize, usize),
    #[error("expected a form of degree {expected}, got degree {got}")]
    WrongDegree { expected: usize, got: usize },
    #[error("endomorphism is not skew-symmetric")]
    NotSkew,
    #[error("index {index} out of range 1..={max}")]
    IndexOutOfRange { index: usize, max: usize },
    #[error("requires p = 1, got p = {0}")]
    RequiresSevenDimensions(usize),
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("linear system has a non-constant coefficient: {0}")]
    NonConstantCoefficient(String),
    #[error("holonomy closure exceeded dimension {0}")]
    HolonomyOverflow(usize),
    #[error("parallel spinor kernel has dimension {0}, expected 1")]
    SpinorKernel(usize),
    #[error("{0}")]
    Inconsistent(String),
}

pub type Result<T> = std::result::Result<T, Error>;
