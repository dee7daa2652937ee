use thiserror::Error;

/// Errors produced while building meshes, spaces and operators, or while
/// running the nonlinear solver.
#[derive(Debug, Error)]
pub enum Error {
    #[error("unsupported domain kind `{0}`")]
    UnsupportedDomain(String),
    #[error("invalid domain: {0}")]
    InvalidDomain(String),
    #[error("polynomial degree {0} outside the supported range 1..=6")]
    UnsupportedDegree(usize),
    #[error("no triangle quadrature rule of degree {0} (table covers 1..=13)")]
    QuadratureDegree(usize),
    #[error("mismatched spaces: {0}")]
    SpaceMismatch(&'static str),
    #[error("face {face} is a boundary face: {what} is undefined there")]
    BoundaryFace { face: usize, what: &'static str },
    #[error("invalid exponent p = {0}; expected 1 < p < inf")]
    InvalidExponent(f64),
    #[error("stabilization eps must be positive for p != 2 (got {0})")]
    InvalidEps(f64),
    #[error("non-finite value encountered in {0}")]
    NonFinite(&'static str),
    #[error("linear solve stalled: relative residual {residual:.3e} after {iterations} iterations")]
    SolveFailed { iterations: usize, residual: f64 },
    #[error("invalid configuration: {0}")]
    Config(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
