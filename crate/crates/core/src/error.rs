use thiserror::Error;

/// Errors raised by the model when an input violates a precondition.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum ModelError {
    #[error("invalid grating: {0}")]
    InvalidGrating(String),
    #[error("angle {0} deg outside [-90, 90]")]
    AngleOutOfRange(f64),
    #[error("invalid interval [{lo}, {hi}]")]
    InvalidInterval { lo: f64, hi: f64 },
    #[error("order {j} does not propagate at alpha_t = {alpha_t}")]
    OrderNotPropagating { j: i64, alpha_t: f64 },
    #[error("domain error: {0}")]
    Domain(String),
    #[error(
        "quadrature did not converge: value {value} with error estimate {abs_error_estimate} \
         after {evaluations} evaluations"
    )]
    NoConvergence {
        value: f64,
        abs_error_estimate: f64,
        evaluations: usize,
    },
}

pub type Result<T> = std::result::Result<T, ModelError>;
