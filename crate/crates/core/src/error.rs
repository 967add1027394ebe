use thiserror::Error;

/// Errors produced by mesh construction, energy evaluation and the solvers.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid mesh: {0}")]
    InvalidMesh(String),

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("field has {found} nodes but the mesh has {expected}")]
    FieldSize { expected: usize, found: usize },

    /// In Dirichlet mode (gamma = 0) the energy is infinite unless the trace is +e3 or -e3.
    #[error("Dirichlet mode requires a boundary value of +e3 or -e3 (node {node} deviates by {deviation:.3e})")]
    DirichletViolation { node: usize, deviation: f64 },

    #[error("line search stagnated after {iterations} iterations (step fell below {step:.3e})")]
    Stagnation { iterations: usize, step: f64 },

    #[error("shooting trajectory left [-pi, 2pi] at r = {radius:.6}")]
    Divergence { radius: f64 },

    #[error("iteration did not converge after {iterations} steps (last value {last:.12e})")]
    NoConvergence { iterations: usize, last: f64 },

    #[error("precondition violated: {0}")]
    Precondition(String),

    #[error("operation requires a disk mesh")]
    UnsupportedDomain,

    #[error("matrix is not positive definite (pivot {pivot} = {value:.3e})")]
    NotPositiveDefinite { pivot: usize, value: f64 },

    #[error("malformed input: {0}")]
    Format(String),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
