use thiserror::Error;

/// Errors raised by the attitude reconstruction pipeline.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("argument {value} lies outside the admissible domain: {what}")]
    Domain { what: &'static str, value: f64 },

    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("design matrix is rank deficient (condition estimate {condition_estimate:e})")]
    SingularFit { condition_estimate: f64 },

    #[error("quaternion norm {norm:e} is too small to normalize")]
    DegenerateQuaternion { norm: f64 },

    #[error("rotation too close to pi for a finite Rodrigues vector (scalar part {w:e})")]
    RodriguesSingular { w: f64 },

    #[error("convergence not guaranteed: t*sup|omega| = {precondition} >= 2")]
    NoConvergenceGuarantee { precondition: f64 },

    #[error("iterate degree {degree} exceeds the budget of {budget}; configure a truncation degree")]
    DegreeBudget { degree: usize, budget: usize },

    #[error("propagation failed: {0}")]
    Propagation(String),
}

pub type Result<T> = std::result::Result<T, Error>;
