use thiserror::Error;

/// Errors raised by the numerical core.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("grid size {0} must be a power of two no smaller than 16")]
    InvalidGridSize(usize),

    #[error("grid mismatch: expected {expected} samples, got {found}")]
    GridMismatch { expected: usize, found: usize },

    #[error("non-finite value encountered in {0}")]
    NonFinite(&'static str),

    #[error("derivative order {0} not supported (expected 1, 2 or 3)")]
    DerivativeOrder(usize),

    #[error("kernel evaluated at the singular point")]
    SingularPoint,

    #[error("index constraint p <= n + q + 1 violated (n={n}, q={q}, p={p})")]
    IndexConstraint { n: usize, q: usize, p: usize },

    #[error("point lies within {distance:.3e} of the interface, inside the quadrature collar {collar:.3e}")]
    InsideCollar { distance: f64, collar: f64 },

    #[error("linear solve failed: {0}")]
    Solve(String),

    #[error("Newton iteration did not converge after {iterations} iterations (residual {residual:.3e})")]
    NoConvergence { iterations: usize, residual: f64 },

    #[error("eigensolver failed: {0}")]
    Eigen(String),
}

pub type Result<T> = std::result::Result<T, Error>;
