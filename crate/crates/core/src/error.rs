use thiserror::Error;

/// Errors produced by grid construction, kernel assembly, the solvers and the runner.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid grid: {0}")]
    InvalidGrid(String),

    #[error("invalid kernel: {0}")]
    InvalidKernel(String),

    #[error("kernel is singular at coincident points")]
    CoincidentPoints,

    #[error("quadrature did not converge: {0}")]
    Quadrature(String),

    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("invalid weight: {0}")]
    InvalidWeight(String),

    #[error("invalid reaction: {0}")]
    InvalidReaction(String),

    #[error("invalid rearrangement class: {0}")]
    InvalidClass(String),

    #[error("class has {count} distinct rearrangements, above the cap of {cap}")]
    EnumerationCap { count: u128, cap: u128 },

    #[error("mixture weights are not on the simplex: {0}")]
    OffSimplex(String),

    #[error("{solver} did not converge after {iterations} iterations (residual {residual:e}, objective {objective:e})")]
    NonConvergence {
        solver: &'static str,
        iterations: usize,
        residual: f64,
        objective: f64,
    },

    #[error("invalid configuration: {}", .0.join("; "))]
    Config(Vec<String>),

    #[error("kernel cache: {0}")]
    Cache(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl Error {
    /// Short machine-readable tag used in error reports.
    pub fn kind(&self) -> &'static str {
        match self {
            Error::InvalidGrid(_) => "invalid_grid",
            Error::InvalidKernel(_) => "invalid_kernel",
            Error::CoincidentPoints => "coincident_points",
            Error::Quadrature(_) => "quadrature",
            Error::DimensionMismatch { .. } => "dimension_mismatch",
            Error::InvalidWeight(_) => "invalid_weight",
            Error::InvalidReaction(_) => "invalid_reaction",
            Error::InvalidClass(_) => "invalid_class",
            Error::EnumerationCap { .. } => "enumeration_cap",
            Error::OffSimplex(_) => "off_simplex",
            Error::NonConvergence { .. } => "non_convergence",
            Error::Config(_) => "config",
            Error::Cache(_) => "cache",
            Error::Io(_) => "io",
            Error::Json(_) => "json",
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn check_len(expected: usize, found: usize) -> Result<()> {
    if expected != found {
        return Err(Error::DimensionMismatch { expected, found });
    }
    Ok(())
}
