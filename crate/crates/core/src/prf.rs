//! Polaron rate function for a truncated bath and the rates derived from it.
//!
//! For a bath of `N*` modes the rate function is a sum over vibronic
//! sidebands. Each sideband carries net vibrational energy
//! `eps_L = sum_i l_i w'_i` and weight `prod_i A_{l_i}(S'_i, w'_i)`:
//!
//! ```text
//! gamma(eta) = sum_L weight_L [J_E(eta - eps_L) + J_A(eps_L - eta)]
//! ```
//!
//! Excitation and decay rates are `gamma(-delta')` and `gamma(delta')`.

use serde::{Deserialize, Serialize};

use crate::amplitude::{amplitude_table, neumaier_sum, AmplitudeConfig};
use crate::error::{Error, Result};
use crate::moment_matching::{truncate, Expansion, TruncatedBath, MAX_NSTAR};
use crate::spectral_density::{OpticalBath, SpectralDensity};

/// Numerical settings for sideband construction.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct PrfConfig {
    pub amplitude: AmplitudeConfig,
    /// Combined sideband weights below `prune_tol * max` may be dropped...
    pub prune_tol: f64,
    /// ...as long as the mass dropped per folded mode stays below this.
    /// Total sideband mass is at least `1 - N* (amplitude.tol + prune_budget)`.
    pub prune_budget: f64,
    /// Offsets closer than this (eV) are merged.
    pub merge_tol: f64,
    /// Largest number of products formed when folding in one mode.
    pub max_products: usize,
}

impl Default for PrfConfig {
    /// Amplitude tables are built 100x tighter than their standalone
    /// default so that six folded modes still lose less than 1e-10 of mass.
    fn default() -> Self {
        Self {
            amplitude: AmplitudeConfig {
                tol: 1e-12,
                ..AmplitudeConfig::default()
            },
            prune_tol: 1e-10,
            prune_budget: 1e-11,
            merge_tol: 1e-12,
            max_products: 50_000_000,
        }
    }
}

/// Vibronic sidebands `(offset, weight)` sorted by offset.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SidebandSpectrum {
    pub entries: Vec<(f64, f64)>,
    pub prune_tol: f64,
    /// Largest amplitude series order used over all modes.
    pub n_max: usize,
}

impl SidebandSpectrum {
    pub fn total_weight(&self) -> f64 {
        neumaier_sum(self.entries.iter().map(|e| e.1))
    }

    pub fn mass_deficit(&self) -> f64 {
        1.0 - self.total_weight()
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    /// Emission and absorption contributions to `gamma(eta)`.
    pub fn evaluate(&self, eta: f64, ob: &OpticalBath) -> Channels {
        let mut emission = Vec::with_capacity(self.entries.len());
        let mut absorption = Vec::with_capacity(self.entries.len());
        for &(offset, weight) in &self.entries {
            let (e, a) = ob.sideband_response(eta, offset);
            emission.push(weight * e);
            absorption.push(weight * a);
        }
        Channels {
            emission: neumaier_sum(emission.into_iter()),
            absorption: neumaier_sum(absorption.into_iter()),
        }
    }

    /// `gamma(eta)`.
    pub fn prf(&self, eta: f64, ob: &OpticalBath) -> f64 {
        self.evaluate(eta, ob).total()
    }
}

/// Build the sideband spectrum of `bath` at vibrational temperature `t_v`.
pub fn sideband_spectrum(bath: &TruncatedBath, t_v: f64, cfg: &PrfConfig) -> Result<SidebandSpectrum> {
    let mut entries = vec![(0.0, 1.0)];
    let mut n_max = 0;
    for mode in &bath.modes {
        let table = amplitude_table(mode.s, mode.omega, t_v, cfg.amplitude)?;
        n_max = n_max.max(table.n_max);
        let factor: Vec<(f64, f64)> = table.iter().map(|(l, a)| (l as f64 * mode.omega, a)).collect();
        entries = fold(&entries, &factor, cfg)?;
    }
    Ok(SidebandSpectrum {
        entries,
        prune_tol: cfg.prune_tol,
        n_max,
    })
}

/// Outer product of two sideband lists. Products too small to matter are
/// never formed; their total mass is charged against the pruning budget.
fn fold(entries: &[(f64, f64)], factor: &[(f64, f64)], cfg: &PrfConfig) -> Result<Vec<(f64, f64)>> {
    let mut by_weight: Vec<(f64, f64)> = entries.to_vec();
    by_weight.sort_by(|a, b| b.1.total_cmp(&a.1));
    let mut suffix = vec![0.0; by_weight.len() + 1];
    for i in (0..by_weight.len()).rev() {
        suffix[i] = suffix[i + 1] + by_weight[i].1;
    }
    let first_below = |cut: f64| by_weight.partition_point(|e| e.1 >= cut);
    let max_product = by_weight.first().map_or(0.0, |e| e.1) * factor.iter().map(|f| f.1).fold(0.0, f64::max);

    let half_budget = 0.5 * cfg.prune_budget;
    let mut cut = cfg.prune_tol * max_product;
    let skipped = loop {
        let skipped: f64 = factor
            .iter()
            .map(|&(_, a)| if a > 0.0 { a * suffix[first_below(cut / a)] } else { 0.0 })
            .sum();
        if skipped <= half_budget || cut < f64::MIN_POSITIVE {
            break if skipped <= half_budget { skipped } else { 0.0 };
        }
        cut *= 0.1;
    };
    let cut = if skipped == 0.0 && cut < f64::MIN_POSITIVE { 0.0 } else { cut };

    let kept = |a: f64| if a > 0.0 { first_below(cut / a) } else { 0 };
    let products: usize = factor.iter().map(|&(_, a)| kept(a)).sum();
    if products > cfg.max_products {
        return Err(Error::SidebandOverflow {
            entries: products,
            cap: cfg.max_products,
        });
    }
    let mut next = Vec::with_capacity(products);
    for &(shift, a) in factor {
        for &(offset, weight) in &by_weight[..kept(a)] {
            next.push((offset + shift, weight * a));
        }
    }
    Ok(merge_and_prune(next, cfg.merge_tol, cfg.prune_tol, cfg.prune_budget - skipped))
}

fn merge_and_prune(mut entries: Vec<(f64, f64)>, merge_tol: f64, prune_tol: f64, budget: f64) -> Vec<(f64, f64)> {
    entries.sort_by(|a, b| a.0.total_cmp(&b.0));
    let mut merged: Vec<(f64, f64)> = Vec::with_capacity(entries.len());
    for (offset, weight) in entries {
        match merged.last_mut() {
            Some(last) if (offset - last.0).abs() <= merge_tol => last.1 += weight,
            _ => merged.push((offset, weight)),
        }
    }
    let max = merged.iter().map(|e| e.1).fold(0.0, f64::max);
    let threshold = prune_tol * max;
    let mut small: Vec<usize> = (0..merged.len()).filter(|&i| merged[i].1 < threshold).collect();
    small.sort_by(|&a, &b| merged[a].1.total_cmp(&merged[b].1));
    let mut keep = vec![true; merged.len()];
    let mut remaining = budget;
    for i in small {
        if merged[i].1 > remaining {
            break;
        }
        remaining -= merged[i].1;
        keep[i] = false;
    }
    merged
        .into_iter()
        .zip(keep)
        .filter_map(|(e, k)| k.then_some(e))
        .collect()
}

/// `gamma(eta)` for a truncated bath.
pub fn prf(eta: f64, bath: &TruncatedBath, ob: &OpticalBath, t_v: f64, cfg: &PrfConfig) -> Result<f64> {
    Ok(sideband_spectrum(bath, t_v, cfg)?.prf(eta, ob))
}

/// Rate split by photon process.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct Channels {
    pub emission: f64,
    pub absorption: f64,
}

impl Channels {
    pub fn total(&self) -> f64 {
        self.emission + self.absorption
    }
}

/// Electronic splitting, either bare or already polaron-shifted.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Splitting {
    /// Bare `delta`; the polaron energy is `delta - lambda`.
    Delta(f64),
    /// Polaron energy `delta'` given directly.
    DeltaPrime(f64),
}

impl Splitting {
    pub fn polaron_energy(self, reorganisation_energy: f64) -> f64 {
        match self {
            Self::Delta(d) => d - reorganisation_energy,
            Self::DeltaPrime(d) => d,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct Diagnostics {
    /// `1 - sum of sideband weights`.
    pub mass_deficit: f64,
    pub n_max: usize,
    pub sidebands: usize,
    pub warnings: Vec<String>,
}

/// Excitation and decay rates with their photon-process decomposition.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RateResult {
    pub gamma_up: f64,
    pub gamma_down: f64,
    pub up: Channels,
    pub down: Channels,
    pub delta_prime: f64,
    pub bath: TruncatedBath,
    pub diagnostics: Diagnostics,
}

impl RateResult {
    fn from_channels(delta_prime: f64, up: Channels, down: Channels, bath: TruncatedBath, diagnostics: Diagnostics) -> Self {
        Self {
            gamma_up: up.total(),
            gamma_down: down.total(),
            up,
            down,
            delta_prime,
            bath,
            diagnostics,
        }
    }

    pub fn nstar(&self) -> usize {
        self.bath.nstar()
    }

    /// `gamma_up / (gamma_up + gamma_down)`.
    pub fn steady_state(&self) -> Result<f64> {
        crate::dynamics::steady_state(self.gamma_up, self.gamma_down)
    }
}

fn check_splitting(delta_prime: f64) -> Result<Vec<String>> {
    if !delta_prime.is_finite() {
        return Err(Error::InvalidParameter(format!(
            "polaron energy must be finite, got {delta_prime}"
        )));
    }
    Ok(if delta_prime <= 0.0 {
        vec![format!("non-positive polaron energy delta' = {delta_prime}")]
    } else {
        Vec::new()
    })
}

/// Rates for an explicit truncated bath at polaron energy `delta_prime`.
pub fn rates_for_bath(
    delta_prime: f64,
    bath: &TruncatedBath,
    ob: &OpticalBath,
    t_v: f64,
    cfg: &PrfConfig,
) -> Result<RateResult> {
    let warnings = check_splitting(delta_prime)?;
    let spectrum = sideband_spectrum(bath, t_v, cfg)?;
    let up = spectrum.evaluate(-delta_prime, ob);
    let down = spectrum.evaluate(delta_prime, ob);
    let diagnostics = Diagnostics {
        mass_deficit: spectrum.mass_deficit(),
        n_max: spectrum.n_max,
        sidebands: spectrum.len(),
        warnings,
    };
    Ok(RateResult::from_channels(delta_prime, up, down, bath.clone(), diagnostics))
}

/// Full pipeline: truncate `sd` to `nstar` modes and evaluate the rates.
pub fn rates(
    splitting: Splitting,
    sd: &SpectralDensity,
    ob: &OpticalBath,
    t_v: f64,
    nstar: usize,
    expansion: Expansion,
    cfg: &PrfConfig,
) -> Result<RateResult> {
    let delta_prime = match splitting {
        Splitting::Delta(_) => splitting.polaron_energy(sd.reorganisation_energy()?),
        Splitting::DeltaPrime(d) => d,
    };
    let bath = truncate(sd, nstar, expansion)?;
    rates_for_bath(delta_prime, &bath, ob, t_v, cfg)
}

/// Increase `N*` from 1 until both rates change by less than `rel_tol`.
/// Returns the last result and every intermediate one.
pub fn converged_rates(
    splitting: Splitting,
    sd: &SpectralDensity,
    ob: &OpticalBath,
    t_v: f64,
    expansion: Expansion,
    rel_tol: f64,
    cfg: &PrfConfig,
) -> Result<(RateResult, Vec<RateResult>)> {
    let mut history: Vec<RateResult> = Vec::new();
    for nstar in 1..=MAX_NSTAR {
        let r = rates(splitting, sd, ob, t_v, nstar, expansion, cfg)?;
        if let Some(prev) = history.last() {
            let change = |a: f64, b: f64| {
                let scale = a.abs().max(b.abs());
                if scale == 0.0 {
                    0.0
                } else {
                    (a - b).abs() / scale
                }
            };
            if change(r.gamma_up, prev.gamma_up) < rel_tol && change(r.gamma_down, prev.gamma_down) < rel_tol {
                history.push(r.clone());
                return Ok((r, history));
            }
        }
        history.push(r);
    }
    let mut last = history.last().cloned().expect("at least one truncation");
    last.diagnostics
        .warnings
        .push(format!("rates not converged to {rel_tol:e} by N* = {MAX_NSTAR}"));
    Ok((last, history))
}

/// Weak vibrational coupling: `gamma_up = J_A(delta)`, `gamma_down = J_E(delta)`.
pub fn weak_limit_rates(delta: f64, ob: &OpticalBath) -> Result<RateResult> {
    let warnings = check_splitting(delta)?;
    let up = Channels {
        emission: 0.0,
        absorption: ob.absorption_density(delta),
    };
    let down = Channels {
        emission: ob.emission_density(delta),
        absorption: 0.0,
    };
    Ok(RateResult::from_channels(
        delta,
        up,
        down,
        TruncatedBath::empty(),
        Diagnostics {
            warnings,
            sidebands: 1,
            ..Diagnostics::default()
        },
    ))
}

/// Flat optical density about the polaron energy:
/// `gamma_up = J_A(delta')`, `gamma_down = J_E(delta')`.
pub fn flat_limit_rates(delta_prime: f64, ob: &OpticalBath) -> Result<RateResult> {
    weak_limit_rates(delta_prime, ob)
}
