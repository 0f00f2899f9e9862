use thiserror::Error;

/// Failures raised by the model, solvers and correlator engines.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid parameters: {0}")]
    InvalidParams(String),

    /// A closed form that only exists on resonance was asked for at `delta != 0`.
    #[error("operation requires resonant driving (delta = 0), got delta = {delta}")]
    NonResonantInput { delta: f64 },

    /// Omega = Delta = 0: the mixing angle of the dressed states is undefined.
    #[error("dressed-state mixing angle is undefined at omega = delta = 0")]
    DegenerateDressing,

    #[error("eigensolver failed to converge: {0}")]
    ConvergenceFailure(String),

    #[error("integrator could not meet tolerances at t = {t} (step {step:e})")]
    ToleranceNotMet { t: f64, step: f64 },

    /// The correlator has not relaxed to its asymptote by the truncation time.
    #[error("correlator tail not converged: |C(tau_max) - C(inf)| / C(0) = {residual:e}")]
    TailNotConverged { residual: f64 },

    #[error("invalid grid: {0}")]
    InvalidGrid(String),
}

impl Error {
    /// True for errors caused by bad input rather than numerical failure.
    pub fn is_validation(&self) -> bool {
        matches!(
            self,
            Error::InvalidParams(_)
                | Error::NonResonantInput { .. }
                | Error::DegenerateDressing
                | Error::InvalidGrid(_)
        )
    }
}

pub type Result<T> = std::result::Result<T, Error>;
