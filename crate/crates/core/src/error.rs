use thiserror::Error;

/// Failure modes shared by every evaluator in the crate.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("{what}: {value} is outside the domain {domain}")]
    Domain { what: &'static str, value: f64, domain: String },
    #[error("derivative order {order} not supported (max {max})")]
    UnsupportedOrder { order: usize, max: usize },
    #[error("singularity at r = {r}: {what} vanishes")]
    Singularity { r: f64, what: &'static str },
    #[error("dimension {got} not supported here (expected {expected})")]
    UnsupportedDimension { got: usize, expected: usize },
    #[error("non-finite integrand value at x = {x}")]
    Evaluation { x: f64 },
    #[error("quadrature did not settle to {tol:e} within {panels} panels")]
    Quadrature { panels: usize, tol: f64 },
    #[error("catalog miss: unknown eigenmap {0:?}")]
    Catalog(String),
    #[error("profile has no terms")]
    EmptyProfile,
    #[error("profile value {rho} at r = {r} leaves the target domain {domain}")]
    Range { r: f64, rho: f64, domain: String },
    #[error("finite-difference stencil around r = {r} (step {h}) leaves the domain")]
    Stencil { r: f64, h: f64 },
    #[error("not applicable: {0}")]
    NotApplicable(String),
    #[error("degenerate family: {0}")]
    DegenerateFamily(String),
    #[error("map is not conformal: conformality residual {sup:e} exceeds {tol:e}")]
    NotConformal { sup: f64, tol: f64 },
    #[error("step size underflow at r = {r} (h = {h:e})")]
    Stiffness { r: f64, h: f64 },
    #[error("profile escaped the target domain at r = {r} (rho = {rho})")]
    RangeEscape { r: f64, rho: f64, state: [f64; 4] },
    #[error("Newton iteration did not converge after {iterations} iterations (mismatch {mismatch:e})")]
    NoConvergence { iterations: usize, mismatch: f64 },
    #[error("unsupported pole start: {0}")]
    UnsupportedStart(String),
    #[error("precondition failed: {0}")]
    Precondition(String),
    #[error("unsupported target: {0}")]
    UnsupportedTarget(String),
    #[error("Jacobi eigensolver did not converge after {sweeps} sweeps")]
    Spectral { sweeps: usize },
    #[error("degenerate input: {0}")]
    Degenerate(String),
    #[error("at r = {r}: {source}")]
    AtRadius { r: f64, source: Box<Error> },
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
}

impl Error {
    pub(crate) fn at(self, r: f64) -> Error {
        match self {
            e @ Error::AtRadius { .. } => e,
            e => Error::AtRadius { r, source: Box::new(e) },
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
