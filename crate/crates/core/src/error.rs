use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("degenerate domain: x_min = {x_min}, x_max = {x_max}, n = {n} (need x_max > x_min and n >= 5)")]
    DegenerateDomain { x_min: f64, x_max: f64, n: usize },

    #[error("invalid parameter `{name}`: {reason}")]
    InvalidParameter { name: &'static str, reason: String },

    #[error("non-finite value in {what} at index {index}")]
    NonFinite { what: &'static str, index: usize },

    #[error("domain coverage: {0}")]
    DomainCoverage(String),

    #[error("invalid reading: {0}")]
    InvalidReading(String),

    #[error("grid mismatch between {0} and {1}")]
    GridMismatch(&'static str, &'static str),

    #[error("kernel kind mismatch: expected {expected} kernel, got {found}")]
    KernelKind { expected: &'static str, found: &'static str },

    #[error("resolution: kernel width {width} is below two grid spacings (dx = {dx})")]
    Resolution { width: f64, dx: f64 },

    #[error("kernel rejected: {0}")]
    KernelRejected(String),

    #[error("divergent phase: |J|/rho implies a phase step of {step:.3e} rad per cell at x = {x} (limit {limit:.3e})")]
    DivergentPhase { x: f64, step: f64, limit: f64 },

    #[error("divergence: J^2/rho integrand does not decay toward the grid edges (edge/peak ratio {ratio:.3e})")]
    Divergence { ratio: f64 },

    #[error("validity: radicand alpha^4 - lambda^4 + 2 sigma^2 (alpha^2 + lambda^2) = {radicand:.6e} is not positive")]
    Validity { radicand: f64 },

    #[error("label mismatch: expected intrinsic and recorded parameter sets")]
    LabelMismatch,

    #[error("insufficient samples: need at least {needed}, got {got}")]
    InsufficientSamples { needed: usize, got: usize },

    #[error("malformed input: {0}")]
    Parse(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl Error {
    pub(crate) fn param(name: &'static str, reason: impl Into<String>) -> Self {
        Error::InvalidParameter {
            name,
            reason: reason.into(),
        }
    }

    /// Short name of the failed check, used in CLI diagnostics.
    pub fn check_name(&self) -> &'static str {
        match self {
            Error::DegenerateDomain { .. } => "degenerate-domain",
            Error::InvalidParameter { .. } => "parameter",
            Error::NonFinite { .. } => "finite-values",
            Error::DomainCoverage(_) => "domain-coverage",
            Error::InvalidReading(_) => "reading",
            Error::GridMismatch(..) => "grid-mismatch",
            Error::KernelKind { .. } => "kernel-kind",
            Error::Resolution { .. } => "resolution",
            Error::KernelRejected(_) => "kernel-normalization",
            Error::DivergentPhase { .. } => "divergent-phase",
            Error::Divergence { .. } => "divergence",
            Error::Validity { .. } => "validity",
            Error::LabelMismatch => "label",
            Error::InsufficientSamples { .. } => "insufficient-samples",
            Error::Parse(_) => "parse",
            Error::Io(_) => "io",
            Error::Csv(_) => "csv",
            Error::Json(_) => "json",
        }
    }

    /// True for errors raised by numerical validity checks rather than bad input.
    pub fn is_numerical(&self) -> bool {
        matches!(
            self,
            Error::DomainCoverage(_)
                | Error::InvalidReading(_)
                | Error::Resolution { .. }
                | Error::KernelRejected(_)
                | Error::DivergentPhase { .. }
                | Error::Divergence { .. }
                | Error::Validity { .. }
                | Error::NonFinite { .. }
        )
    }
}
