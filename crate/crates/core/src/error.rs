use thiserror::Error;

use crate::linalg::Vector;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("invalid body: {0}")]
    InvalidBody(String),

    #[error("operation not supported for {0} bodies")]
    UnsupportedVariant(&'static str),

    #[error("point {point:?} lies outside the operator domain")]
    OutOfDomain { point: Vector },

    #[error("unknown catalog operator `{0}`")]
    UnknownOperator(String),

    #[error("invalid parameter `{name}`: {reason}")]
    InvalidParameter { name: String, reason: String },

    #[error("Lipschitz quotient undefined: {0}")]
    UndefinedQuotient(String),

    #[error("power iteration did not converge after {iterations} iterations (last estimates {last:e}, {previous:e})")]
    PowerIteration {
        iterations: usize,
        last: f64,
        previous: f64,
    },

    #[error("LP numerical breakdown: {0}")]
    LpNumerical(String),

    #[error("LP did not reach optimality: {0}")]
    LpStatus(String),

    #[error("convex minimization did not converge in {iterations} iterations (value {value:e}, slack {slack:e})")]
    NonConvergence {
        iterations: usize,
        value: f64,
        slack: f64,
    },

    #[error("psi data is not convex-interpolable: worst violation {violation:e} at ({i}, {j})")]
    NotInterpolable { i: usize, j: usize, violation: f64 },

    #[error("internal inconsistency: {0}")]
    Inconsistent(String),

    #[error("body X is not contained in region V: {0}")]
    NotContained(String),

    #[error("operator has no Lipschitz constant for its derivative; supply one explicitly")]
    MissingLipschitz,

    #[error("no certificate: {0}")]
    NoCertificate(String),
}
