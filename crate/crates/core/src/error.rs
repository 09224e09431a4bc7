use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("discrete density has no pointwise value")]
    NotPointwise,

    /// A weighted moment (or the propagator built from them) does not converge.
    #[error("moment of order {order} diverges: {reason}")]
    DivergentMoment { order: i32, reason: String },

    #[error("moment matching produced a non-physical solution: {0}")]
    NonPhysicalSolution(String),

    #[error("moment matching is ill-conditioned: residual {residual:e} exceeds {limit:e}")]
    IllConditioned { residual: f64, limit: f64 },

    #[error("amplitude series needs n_max > {cap} (S = {s}, N = {occupation})")]
    TruncationFailure { cap: usize, s: f64, occupation: f64 },

    #[error("sideband spectrum needs {entries} products, above the limit of {cap}")]
    SidebandOverflow { entries: usize, cap: usize },

    #[error("excitation and decay rates are both zero; no steady state")]
    DegenerateRates,

    #[error("propagator does not decay: {0}")]
    NonDecayingPropagator(String),
}

impl Error {
    /// True for failures of the numerical method rather than of the inputs.
    pub fn is_numerical(&self) -> bool {
        !matches!(self, Error::InvalidParameter(_))
    }
}
