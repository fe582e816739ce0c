use thiserror::Error;

/// Failures reported by the numerical pipeline.
///
/// Every variant carries enough context to locate the failure without a
/// debugger; the CLI maps all of them to the "numerical failure" exit code
/// except [`Error::InvalidInput`].
#[derive(Debug, Clone, Error, PartialEq)]
pub enum Error {
    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("ODE step size underflow at r = {r:.6e} (h = {h:.3e})")]
    StepUnderflow { r: f64, h: f64 },

    #[error("ODE integration exceeded {steps} steps before reaching r = {target:.6e} (stopped at {r:.6e})")]
    TooManySteps { steps: usize, r: f64, target: f64 },

    #[error("quadrature on [{a:.6e}, {b:.6e}] did not converge: estimated error {err:.3e}")]
    QuadratureNonConvergence { a: f64, b: f64, err: f64 },

    #[error("oscillatory quadrature could not resolve the phase on [{a:.6e}, {b:.6e}]: {reason}")]
    UnresolvedPhase { a: f64, b: f64, reason: String },

    #[error("no sign change on [{a:.6e}, {b:.6e}] (f(a) = {fa:.3e}, f(b) = {fb:.3e})")]
    NoSignChange { a: f64, b: f64, fa: f64, fb: f64 },

    #[error("shooting bracket failed to close: {0}")]
    BracketNotClosed(String),

    #[error("fixed-point iteration failed to contract: {0}")]
    NoContraction(String),

    #[error("singular linear system: {0}")]
    Singular(String),

    #[error("inconsistent evaluation: {0}")]
    Inconsistent(String),

    #[error("resolution budget exceeded: {0}")]
    Resolution(String),
}

pub type Result<T> = std::result::Result<T, Error>;
