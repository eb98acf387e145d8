use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("domain error: {0}")]
    Domain(String),

    #[error("invalid model: {0}")]
    InvalidModel(String),

    #[error("variance positivity violated at step {step}: 1 + n^-1/2 B(y) = {scale2}")]
    VariancePositivity { step: usize, scale2: f64 },

    #[error("degenerate design: sum of squared lagged values is zero")]
    DegenerateDesign,

    #[error("insufficient data: need at least {needed} observations, got {got}")]
    InsufficientData { needed: usize, got: usize },

    #[error("non-finite intermediate value in {0}")]
    NonFinite(&'static str),

    #[error("quadrature did not converge (estimated error {error:e})")]
    Quadrature { error: f64 },

    #[error("degenerate gradient component {index}: |{value:e}| below tolerance")]
    DegenerateComponent { index: usize, value: f64 },

    #[error("degenerate test: tau^2 = {0} must be positive")]
    DegenerateTest(f64),

    #[error("invalid configuration: {0}")]
    Config(String),

    #[error("{failed} of {attempted} replicates failed (limit 1%)")]
    TooManyFailures {
        failed: usize,
        attempted: usize,
        partial: Box<crate::testing::PowerCurve>,
    },
}
