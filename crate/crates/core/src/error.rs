use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("invalid parameters: {0}")]
    InvalidParameters(String),

    /// The adaptive integrator ran out of subdivisions (or hit the roundoff
    /// floor) before reaching the requested tolerance.
    #[error(
        "quadrature did not converge: value {value:e}, error estimate {abs_error:e} \
         after {evaluations} evaluations"
    )]
    QuadratureNotConverged {
        value: f64,
        abs_error: f64,
        evaluations: usize,
    },

    #[error("integrand tail does not decay: |t f(t)| = {probe:e} at t = {at}")]
    TailNotDecaying { at: f64, probe: f64 },

    #[error("cancellation in finite 2F1 sum for k = {k}: relative error bound {relative_error:e}")]
    LossOfPrecision { k: usize, relative_error: f64 },

    #[error(
        "series truncated at k = {k_max} with tail bound {tail_bound:e} (tolerance {tolerance:e})"
    )]
    TruncationNotConverged {
        k_max: usize,
        tail_bound: f64,
        tolerance: f64,
    },

    #[error("{what} diverges at eta = 1")]
    DivergentAtUnity { what: &'static str },

    #[error("extrapolation stages do not shrink: {0:?}")]
    NonMonotoneConvergence(Vec<f64>),
}

pub(crate) fn invalid<T>(msg: impl Into<String>) -> Result<T> {
    Err(Error::InvalidArgument(msg.into()))
}
