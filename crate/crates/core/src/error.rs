use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("non-finite value in {0}")]
    NonFinite(&'static str),

    #[error("argument out of domain: {0}")]
    Domain(String),

    #[error("period diverges at the critical point 2J = |lambda_A| (homoclinic orbit)")]
    CriticalPoint,

    #[error("step size fell below dt_min = {dt_min:e} at t = {t}")]
    StepUnderflow { t: f64, dt_min: f64 },

    #[error("step budget of {max_steps} exhausted at t = {t}")]
    StepBudget { t: f64, max_steps: usize },

    #[error("stationary search did not converge after {iterations} iterations (residual {residual:e})")]
    NotConverged { iterations: usize, residual: f64 },

    #[error("insufficient cycles: found {found} extrema, need at least {needed}; extend t_max")]
    InsufficientCycles { found: usize, needed: usize },

    #[error("unknown observable `{name}`; valid names: {valid}")]
    UnknownObservable { name: String, valid: String },

    #[error("grid mismatch: {0}")]
    GridMismatch(String),

    #[error("invalid configuration: {0}")]
    InvalidConfig(String),

    #[error("eigensolver failed: {0}")]
    Eigensolver(String),
}

impl Error {
    /// Numerical failures (as opposed to bad inputs).
    pub fn is_numerical(&self) -> bool {
        matches!(
            self,
            Error::NonFinite(_)
                | Error::StepUnderflow { .. }
                | Error::StepBudget { .. }
                | Error::NotConverged { .. }
                | Error::Eigensolver(_)
                | Error::InsufficientCycles { .. }
        )
    }
}
