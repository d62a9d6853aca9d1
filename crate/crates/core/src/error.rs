use thiserror::Error;

/// Every fallible operation in the crate reports one of these.
#[derive(Debug, Error)]
pub enum Error {
    #[error("domain error: {0}")]
    Domain(String),

    #[error("special function overflow: {0}")]
    Overflow(String),

    #[error("quadrature did not converge: estimate {value:e}, error {error:e} after {subdivisions} subdivisions")]
    NonConvergence {
        value: f64,
        error: f64,
        subdivisions: usize,
    },

    #[error("integrand returned a non-finite value at x = {x:e}")]
    NonFinite { x: f64 },

    #[error("integrand singularity r^-{exponent} is not integrable in dimension {dim}")]
    DivergentIntegrand { exponent: f64, dim: usize },

    #[error("inconclusive: {0}")]
    Inconclusive(String),

    #[error("no constructive recipe: {0}")]
    RecipeUnavailable(String),

    #[error("monotonicity violated at iteration {iteration}, r = {radius:e}: {detail}")]
    MonotonicityViolation {
        iteration: usize,
        radius: f64,
        detail: String,
    },

    #[error("iteration stalled after {iterations} steps, residual {residual:e}")]
    IterationNonConvergence { iterations: usize, residual: f64 },

    #[error("singular linear system at row {row}")]
    SingularSystem { row: usize },

    #[error("fit window too small: {nodes} nodes")]
    WindowTooSmall { nodes: usize },

    #[error("invalid profile: {0}")]
    InvalidProfile(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn domain(msg: impl Into<String>) -> Error {
    Error::Domain(msg.into())
}
