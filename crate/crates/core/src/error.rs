use thiserror::Error;

/// Errors raised by the analysis pipeline.
///
/// Input-class errors map to CLI exit code 3, numeric failures to exit code 2.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("non-finite value in {0}")]
    NonFinite(String),

    #[error("matrix is not symmetric (relative asymmetry {0:e})")]
    NotSymmetric(f64),

    #[error("invalid input: {0}")]
    Input(String),

    #[error("precondition violated: {0}")]
    Precondition(String),

    #[error("field {field} evaluated to a non-finite value at t={t}")]
    Evaluation { field: &'static str, t: f64 },

    #[error("secant quadrature residual {residual:e} exceeds tolerance {tolerance:e}")]
    Quadrature { residual: f64, tolerance: f64 },

    #[error("eigenvalue iteration failed at sample {coords:?}")]
    Eigen { coords: Vec<f64> },

    #[error("Gram matrix of 2V is not positive definite (lambda_min = {lambda_min:e})")]
    NotPositiveDefinite { lambda_min: f64 },

    #[error("trajectory diverged; last finite time t={last_t}")]
    Divergence { last_t: f64 },

    #[error("adaptive step underflow at t={t} (h={h:e})")]
    Stiffness { t: f64, h: f64 },

    #[error(
        "shooting Jacobian is singular (condition estimate {condition:e}); try a different guess"
    )]
    SingularJacobian { condition: f64 },

    #[error("config error: {0}")]
    Config(String),
}

impl Error {
    /// True for errors caused by bad input rather than numerical failure.
    pub fn is_input(&self) -> bool {
        matches!(
            self,
            Error::DimensionMismatch { .. }
                | Error::NonFinite(_)
                | Error::NotSymmetric(_)
                | Error::Input(_)
                | Error::Precondition(_)
                | Error::Config(_)
        )
    }
}

pub type Result<T> = std::result::Result<T, Error>;
