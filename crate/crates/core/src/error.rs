use thiserror::Error;

/// Errors produced by the library.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid domain: {0}")]
    InvalidDomain(String),
    #[error("invalid mesh parameter: {0}")]
    InvalidMeshParameter(String),
    #[error("element index {index} out of range (mesh has {count} elements)")]
    ElementOutOfRange { index: usize, count: usize },
    #[error("invalid exponent: {0}")]
    InvalidExponent(String),
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
    #[error("non-finite value encountered in {0}")]
    NonFinite(&'static str),
    #[error("the field is identically zero")]
    ZeroField,
    #[error("Luxemburg norm iteration did not converge (|F| = {residual:e})")]
    NormNotConverged { residual: f64 },
    #[error("linear solve failed: {0}")]
    LinearSolve(String),
    #[error("inverse power method did not converge in {iterations} steps (residual {residual:e})")]
    NotConverged { iterations: usize, residual: f64 },
    #[error("continuation step {step} (t = {t}) failed: {source}")]
    Continuation {
        step: usize,
        t: f64,
        #[source]
        source: Box<Error>,
    },
}

pub type Result<T> = std::result::Result<T, Error>;
