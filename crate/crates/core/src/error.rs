use thiserror::Error;

/// Errors raised while building rules or analysing them.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum QuadError {
    #[error("unsupported weight: {0}")]
    UnsupportedWeight(String),

    #[error("ultraspherical parameter lambda = {0} is outside [0, 1] U {{3}}, where Kronrod extensions are positive")]
    UnsupportedLambda(f64),

    #[error("point t = {0} lies outside [-1, 1]")]
    Domain(f64),

    #[error("{what}: got {got}, need at least {min}")]
    Size {
        what: &'static str,
        got: usize,
        min: usize,
    },

    #[error("invalid nodes: {0}")]
    InvalidNodes(String),

    #[error("symmetric tridiagonal eigensolver did not converge (n = {0})")]
    EigenFailure(usize),

    #[error("interpolatory weights failed the exactness check at degree {degree} (residual {residual:e})")]
    IllConditioned { degree: usize, residual: f64 },

    #[error("Kronrod extension failed: {0}")]
    ExtensionFailure(String),

    #[error("compound rules require the Legendre weight, got {0}")]
    WeightMismatch(String),

    #[error("rule is exact only to degree {exactness}, kernel of order {s} needs degree {s}")]
    PreconditionViolation { s: u32, exactness: usize },

    #[error(
        "error bound violated: actual {actual:e}, kernel bound {kernel_bound:e}, Freud bound {freud_bound:?}"
    )]
    BoundViolation {
        actual: f64,
        kernel_bound: f64,
        freud_bound: Option<f64>,
    },

    #[error("compound kernel scaling violated at n = {n}: sup*n^(s+1)/sup(1) = {ratio}")]
    ScalingViolation { n: usize, ratio: f64 },

    #[error("not enough data points to fit a slope ({0} usable)")]
    InsufficientData(usize),

    #[error("malformed record: {0}")]
    Format(String),
}

impl QuadError {
    /// Short kebab-case name of the variant, for messages and exit reports.
    pub fn kind(&self) -> &'static str {
        match self {
            QuadError::UnsupportedWeight(_) => "unsupported-weight",
            QuadError::UnsupportedLambda(_) => "unsupported-lambda",
            QuadError::Domain(_) => "domain",
            QuadError::Size { .. } => "size",
            QuadError::InvalidNodes(_) => "invalid-nodes",
            QuadError::EigenFailure(_) => "eigen-failure",
            QuadError::IllConditioned { .. } => "ill-conditioned",
            QuadError::ExtensionFailure(_) => "extension-failure",
            QuadError::WeightMismatch(_) => "weight-mismatch",
            QuadError::PreconditionViolation { .. } => "precondition-violation",
            QuadError::BoundViolation { .. } => "bound-violation",
            QuadError::ScalingViolation { .. } => "scaling-violation",
            QuadError::InsufficientData(_) => "insufficient-data",
            QuadError::Format(_) => "format",
        }
    }
}

pub type Result<T, E = QuadError> = std::result::Result<T, E>;
