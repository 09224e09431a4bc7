//! Optical excitation and decay rates of a two-level emitter strongly coupled
//! to a vibrational bath, evaluated in the polaron frame.
//!
//! The vibrational spectral density is replaced by a few effective modes
//! whose weighted moments match those of the continuum
//! ([`moment_matching`]). For such a bath the polaron rate function is an
//! explicit sum over vibronic sidebands weighted by thermal Franck-Condon
//! amplitudes ([`amplitude`], [`prf`]). An independent direct-integration
//! evaluation lives in [`oracle`].

pub mod amplitude;
pub mod dynamics;
pub mod error;
pub mod moment_matching;
pub mod oracle;
pub mod prf;
pub mod quadrature;
pub mod special;
pub mod spectral_density;
pub mod units;

pub use amplitude::{amplitude_table, poisson_limit, AmplitudeConfig, AmplitudeTable};
pub use dynamics::{population_dynamics, steady_state, Trajectory};
pub use error::{Error, Result};
pub use moment_matching::{single_mode_closed_form, truncate, Expansion, TruncatedBath};
pub use oracle::{
    k_function, oracle_rates, phonon_propagator, prf_numerical, propagator_samples, KValue, OracleRates,
    OracleValue, PropagatorSamples, QuadConfig, VibronicKernel,
};
pub use prf::{
    converged_rates, flat_limit_rates, prf, rates, rates_for_bath, sideband_spectrum, weak_limit_rates,
    Channels, Diagnostics, PrfConfig, RateResult, SidebandSpectrum, Splitting,
};
pub use spectral_density::{Mode, OpticalBath, OpticalDensity, SpectralDensity, Tabulated};
pub use units::{bose, Temperatures, K_B};
