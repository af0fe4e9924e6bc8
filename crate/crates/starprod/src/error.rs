//! Crate-wide error type.

use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("coordinate index {index} out of range for dimension {dim}")]
    UnsupportedIndex { index: usize, dim: usize },

    #[error("dimension mismatch: {0} vs {1}")]
    DimensionMismatch(usize, usize),

    #[error("operand mixes form degrees; graded commutator needs pure-degree inputs")]
    MixedFormDegree,

    #[error("ν-division of a term with ν-power 0 (grading bug upstream)")]
    NuNotDivisible,

    #[error("section has nonzero form degree")]
    NonzeroFormDegree,

    #[error("coefficient ring does not support {0}")]
    MissingCapability(&'static str),

    #[error("geometry validation failed: {}", .0.join("; "))]
    ValidationFailed(Vec<String>),

    #[error("fixed point did not stabilize within Weyl-degree cap {cap} ({what})")]
    NonStabilization { what: &'static str, cap: u32 },

    #[error("D-flatness precondition violated; residual has {terms} terms, first: {sample}")]
    NotDFlat { terms: usize, sample: String },

    #[error("contraction i(X)(ω - Ω) is not exact; obstructing coefficient {0}")]
    NotExact(String),

    #[error("antiderivative exists only for polynomial profile elements, got {0}")]
    NotPolynomial(String),

    #[error("quadrature did not converge: order {order} gives {value}, doubling moved it by {delta}")]
    QuadratureDiverged { order: usize, value: f64, delta: f64 },

    #[error("scalar {0} has no exact inverse")]
    NotInvertible(String),

    #[error("formal series has no inverse: leading coefficient not invertible")]
    SeriesNotInvertible,

    #[error("parse error: {0}")]
    Parse(String),

    #[error("invalid job: {0}")]
    BadJob(String),

    #[error("{0} requires normalization mode {1}")]
    WrongNormalization(&'static str, &'static str),

    #[error("p = {p} rejected: need 1 <= p <= m+1 = {max}")]
    FutakiDegree { p: usize, max: usize },

    #[error("io: {0}")]
    Io(#[from] std::io::Error),

    #[error("json: {0}")]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
