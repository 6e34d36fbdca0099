use std::fmt;

use crate::cg::IterateRecord;

pub type Result<T> = std::result::Result<T, Error>;

/// Which Wolfe condition(s) held at the best step seen by a failed search.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LineSearchDiagnostics {
    pub alpha: f64,
    pub armijo: bool,
    pub curvature: bool,
    pub iters: usize,
}

impl fmt::Display for LineSearchDiagnostics {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "alpha={:e} armijo={} curvature={} after {} iterations",
            self.alpha, self.armijo, self.curvature, self.iters
        )
    }
}

#[derive(Debug, Clone, thiserror::Error)]
pub enum Error {
    #[error("tangent vectors live at different foot points (max coordinate gap {gap:e})")]
    FootMismatch { gap: f64 },
    #[error("array shape {got:?} does not match the expected shape {expected:?}")]
    ShapeMismatch {
        expected: (usize, usize),
        got: (usize, usize),
    },
    #[error("point is not on the manifold (residual {residual:e})")]
    NotOnManifold { residual: f64 },
    #[error("invalid manifold dimensions: {0}")]
    InvalidDimensions(String),
    #[error("differentiated retraction collapsed a nonzero vector (norm {norm:e})")]
    DegenerateTransport { norm: f64 },
    #[error("direction is not a descent direction (<grad, eta> = {slope:e})")]
    NotDescent { slope: f64 },
    #[error("line search failed: {0}")]
    LineSearchFailed(LineSearchDiagnostics),
    #[error("non-finite {what} encountered")]
    NonFiniteValue { what: &'static str },
    #[error("denominator {value:e} is too small in the {formula} coefficient")]
    DegenerateDenominator { formula: &'static str, value: f64 },
    #[error("invariant violated at iteration {}: {reason}", record.k)]
    InvariantViolation {
        reason: String,
        record: Box<IterateRecord>,
    },
    #[error("matrix is not symmetric (relative asymmetry {0:e})")]
    AsymmetricInput(f64),
    #[error("weights must be positive and strictly increasing")]
    BadWeights,
    #[error("matrix is not positive definite (smallest eigenvalue {0:e})")]
    NotPositiveDefinite(f64),
    #[error("Jacobi eigensolver did not converge after {0} sweeps")]
    NoConvergence(usize),
    #[error("could not extract a tangent basis (found {found}, expected {expected})")]
    DegenerateBasis { found: usize, expected: usize },
    #[error("invalid options: {0}")]
    InvalidOptions(String),
}
