use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("{family}: invalid {parameter} = {value}: {reason}")]
    InvalidParameter {
        family: &'static str,
        parameter: &'static str,
        value: f64,
        reason: String,
    },

    #[error("invalid scenario: {0}")]
    InvalidScenario(String),

    #[error("t = {t} is outside the convergence strip ({lower}, {upper})")]
    StripViolation { t: f64, lower: f64, upper: f64 },

    /// K'(t) does not reach `x` anywhere inside the strip.
    #[error("no saddle point inside the convergence strip for x = {x}")]
    NoSaddleInStrip { x: f64 },

    #[error("saddle point solver did not converge after {iterations} iterations (residual {residual})")]
    DivergedSolver { iterations: usize, residual: f64 },

    #[error("evaluation point is at the mean; use the breakdown branch")]
    BreakdownBranchRequired,

    #[error("quadrature did not converge: estimate {estimate}, error estimate {error_estimate} after {panels} panels")]
    QuadratureNotConverged {
        estimate: f64,
        error_estimate: f64,
        panels: usize,
    },

    #[error("unsupported scenario: {0}")]
    UnsupportedScenario(String),
}
