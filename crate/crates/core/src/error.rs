use thiserror::Error;

/// Errors produced by the numerical routines and the command layer.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum ConeError {
    #[error("invalid parameter `{name}`: {reason}")]
    InvalidParameter { name: &'static str, reason: String },

    #[error("argument out of domain: {0}")]
    Domain(String),

    #[error("quadrature did not reach tolerance {tol:e} (estimate {estimate:e}) on [{a}, {b}]")]
    Quadrature { a: f64, b: f64, tol: f64, estimate: f64 },

    #[error("root finding failed: {0}")]
    RootFinding(String),

    #[error("too few points for a regression: need {needed}, got {got}")]
    TooFewPoints { needed: usize, got: usize },

    #[error("non-finite value encountered in {0}")]
    NonFinite(String),

    #[error("grid too coarse: {0}")]
    GridTooCoarse(String),

    #[error("newton iteration did not converge after {iterations} steps (residual {residual:e})")]
    NewtonDiverged { iterations: usize, residual: f64 },

    #[error("singular linear system at row {0}")]
    Singular(usize),

    #[error("mode truncation insufficient: tail energy {0:e}")]
    ModeTruncation(f64),

    #[error("configuration error: {0}")]
    Config(String),

    #[error("unknown suite `{0}`")]
    UnknownSuite(String),

    #[error("i/o error: {0}")]
    Io(String),
}

impl ConeError {
    pub(crate) fn param(name: &'static str, reason: impl Into<String>) -> Self {
        ConeError::InvalidParameter { name, reason: reason.into() }
    }

    /// Short machine-readable tag used in structured error reports.
    pub fn kind(&self) -> &'static str {
        match self {
            ConeError::InvalidParameter { .. } => "invalid_parameter",
            ConeError::Domain(_) => "domain",
            ConeError::Quadrature { .. } => "quadrature",
            ConeError::RootFinding(_) => "root_finding",
            ConeError::TooFewPoints { .. } => "too_few_points",
            ConeError::NonFinite(_) => "non_finite",
            ConeError::GridTooCoarse(_) => "grid_too_coarse",
            ConeError::NewtonDiverged { .. } => "newton_diverged",
            ConeError::Singular(_) => "singular",
            ConeError::ModeTruncation(_) => "mode_truncation",
            ConeError::Config(_) => "config",
            ConeError::UnknownSuite(_) => "unknown_suite",
            ConeError::Io(_) => "io",
        }
    }
}

impl From<std::io::Error> for ConeError {
    fn from(e: std::io::Error) -> Self {
        ConeError::Io(e.to_string())
    }
}

pub type Result<T> = std::result::Result<T, ConeError>;
