//! Crate-wide error type.

/// Errors surfaced by the estimator, action sets, policies, environment and
/// the experiment harness.
#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("dimension must be at least 1")]
    ZeroDimension,

    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("non-finite value encountered in {context}")]
    NonFinite { context: &'static str },

    #[error("vector norm {norm} exceeds the unit-ball bound")]
    NormBound { norm: f64 },

    #[error("negative quadratic form {value}: inverse Gram state is corrupted")]
    QuadFormNegative { value: f64 },

    #[error("Gram matrix is not positive definite")]
    NotPositiveDefinite,

    #[error("confidence width must be positive, got {omega}")]
    NonPositiveWidth { omega: f64 },

    #[error("horizon must be at least 2, got {horizon}")]
    HorizonTooShort { horizon: u64 },

    #[error("{what} is out of range: {value}")]
    InvalidParameter { what: &'static str, value: f64 },

    #[error("empty action set")]
    EmptyActionSet,

    #[error("interior point must satisfy every constraint strictly and lie in the open unit ball")]
    InvalidInterior,

    #[error("operation requires a convex action set")]
    NotConvex,

    #[error("action is not feasible for the action set (violation {violation})")]
    InfeasibleAction { violation: f64 },

    #[error("config error: {0}")]
    Config(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
