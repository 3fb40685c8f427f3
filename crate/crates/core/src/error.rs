use thiserror::Error;

/// Errors produced across the crate.
#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("invalid Pearson parameters: {0}")]
    InvalidParams(String),

    #[error("unclassifiable: {0}")]
    Unclassifiable(String),

    #[error("moment does not exist: order {order} requested, at most {max} exist")]
    MomentDoesNotExist { order: usize, max: usize },

    #[error("division by zero in moment recursion at order {order}")]
    DegenerateRecursion { order: usize },

    #[error("not an eigenvalue: degree {degree} violates b2 < 1/(2n-1)")]
    NotAnEigenvalue { degree: usize },

    #[error("moments insufficient: {0}")]
    MomentsInsufficient(String),

    #[error("outside domain: {0}")]
    OutsideDomain(String),

    #[error("not chaotic: {0}")]
    NotChaotic(String),

    #[error("mixed eigenvalues: {0}")]
    MixedEigenvalues(String),

    #[error("invalid coefficient tensor: {0}")]
    InvalidCoefficients(String),

    #[error("non-normalizable density: {0}")]
    NonNormalizable(String),

    #[error("quadrature failed: {0}")]
    Quadrature(String),

    #[error("undefined point x = {0}")]
    UndefinedPoint(f64),

    #[error("negative bound: {0}")]
    NegativeBound(String),

    #[error("invalid diffusion: b(x) = {value} < 0 at x = {x}")]
    NegativeDiffusion { x: f64, value: f64 },

    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("parse error: {0}")]
    Parse(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
