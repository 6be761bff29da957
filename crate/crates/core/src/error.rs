use alloc::string::String;

/// Errors raised by rule construction, evaluation, the linear solves and
/// the training loops.
#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("derivative order {requested} not supported by {activation} (max {max})")]
    UnsupportedOrder {
        activation: &'static str,
        requested: usize,
        max: usize,
    },
    #[error("sample bundle does not match the problem rules: {0}")]
    MissingSamples(String),
    #[error("energy form is not positive: a(v,v) = {0:e}")]
    NotPositive(f64),
    #[error("zero energy norm")]
    ZeroNorm,
    #[error("linear solve failed: {0}")]
    SolveFailed(String),
    #[error("Galerkin matrix too ill-conditioned: cond = {cond:e} exceeds cap {cap:e}")]
    IllConditioned { cond: f64, cap: f64 },
    #[error("non-finite value during training (iteration {iteration}, epoch {epoch})")]
    NonFinite { iteration: usize, epoch: usize },
    #[error("problem `{0}` has no exact solution")]
    NoExactSolution(String),
    #[error("point {0:?} lies outside the problem domain")]
    PointOutsideDomain([f64; 2]),
    #[error("empty basis")]
    EmptyBasis,
}

pub type Result<T> = core::result::Result<T, Error>;

pub(crate) fn invalid(msg: impl Into<String>) -> Error {
    Error::InvalidArgument(msg.into())
}
