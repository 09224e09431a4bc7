//! Finite-mode truncation of a vibrational spectral density by moment
//! matching.
//!
//! Matching `mu_1 .. mu_2N` of `J_V/w^2` is the same as matching the raw
//! moments `0 .. 2N-1` of the measure `J_V(w)/w dw`, so the truncated modes
//! are the nodes and weights of the N-point Gauss rule for that measure.
//! The rule is built from the moments with the Chebyshev algorithm and the
//! Golub-Welsch eigenproblem, then polished with Newton steps on the moment
//! equations themselves.

use nalgebra::{DMatrix, DVector, SymmetricEigen};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::spectral_density::{Mode, SpectralDensity};

/// Largest supported truncation order.
pub const MAX_NSTAR: usize = 6;

/// Matched moments must be reproduced to this relative accuracy.
pub const RESIDUAL_LIMIT: f64 = 1e-8;

/// Nodes closer than this (relative) are merged.
const MERGE_TOL: f64 = 1e-12;

/// Recurrence coefficients below this (in normalised units) mean the
/// measure has fewer support points than requested.
const DEGENERATE_BETA: f64 = 1e-12;

/// Which weighted moments define the truncated modes.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Expansion {
    /// `mu_1 .. mu_2N`
    #[default]
    #[serde(alias = "zero", alias = "zero_temperature")]
    ZeroT,
    /// odd moments `mu_1, mu_3, .., mu_(4N-1)`
    #[serde(alias = "infinite", alias = "infinite_temperature")]
    InfiniteT,
}

impl Expansion {
    /// Orders of the weighted moments matched by an `nstar`-mode truncation.
    pub fn matched_orders(self, nstar: usize) -> Vec<u32> {
        match self {
            Self::ZeroT => (1..=2 * nstar as u32).collect(),
            Self::InfiniteT => (0..2 * nstar as u32).map(|k| 2 * k + 1).collect(),
        }
    }

    pub fn label(self) -> &'static str {
        match self {
            Self::ZeroT => "zero_t",
            Self::InfiniteT => "infinite_t",
        }
    }
}

/// Truncated spectral density `sum_i S'_i w'_i^2 delta(w - w'_i)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TruncatedBath {
    /// Sorted by ascending frequency.
    pub modes: Vec<Mode>,
    /// Largest relative mismatch over the matched moments.
    pub residual: f64,
}

impl TruncatedBath {
    pub fn empty() -> Self {
        Self {
            modes: Vec::new(),
            residual: 0.0,
        }
    }

    /// Bath made of explicit modes; zero-coupling modes are dropped.
    pub fn from_modes(mut modes: Vec<Mode>) -> Result<Self> {
        for m in &modes {
            if !(m.omega.is_finite() && m.omega > 0.0) || !(m.s.is_finite() && m.s >= 0.0) {
                return Err(Error::InvalidParameter(format!(
                    "mode needs S >= 0 and omega > 0, got S = {}, omega = {}",
                    m.s, m.omega
                )));
            }
        }
        modes.retain(|m| m.s > 0.0);
        modes.sort_by(|a, b| a.omega.total_cmp(&b.omega));
        Ok(Self {
            modes,
            residual: 0.0,
        })
    }

    pub fn nstar(&self) -> usize {
        self.modes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.modes.is_empty()
    }

    /// `mu'_j = sum_i S'_i w'_i^j`
    pub fn weighted_moment(&self, j: i32) -> f64 {
        self.modes.iter().map(|m| m.s * m.omega.powi(j)).sum()
    }

    pub fn reorganisation_energy(&self) -> f64 {
        self.weighted_moment(1)
    }

    fn with_residual(mut self, moments: &[(u32, f64)]) -> Self {
        self.residual = moments
            .iter()
            .map(|&(j, mu)| ((self.weighted_moment(j as i32) - mu) / mu).abs())
            .fold(0.0, f64::max);
        self
    }
}

/// Replace `sd` by `nstar` modes matching its weighted moments.
pub fn truncate(sd: &SpectralDensity, nstar: usize, expansion: Expansion) -> Result<TruncatedBath> {
    if nstar == 0 || nstar > MAX_NSTAR {
        return Err(Error::InvalidParameter(format!(
            "N* must lie in 1..={MAX_NSTAR}, got {nstar}"
        )));
    }
    let orders = expansion.matched_orders(nstar);
    let moments = orders
        .iter()
        .map(|&j| sd.weighted_moment(j).map(|mu| (j, mu)))
        .collect::<Result<Vec<_>>>()?;
    if moments[0].1 == 0.0 {
        // lambda = 0: no vibrational coupling
        return Ok(TruncatedBath::empty());
    }
    let raw: Vec<f64> = moments.iter().map(|&(_, mu)| mu).collect();
    let (nodes, weights) = gauss_rule_from_moments(&raw)?;

    let modes = nodes
        .iter()
        .zip(&weights)
        .map(|(&x, &w)| {
            let omega = match expansion {
                Expansion::ZeroT => x,
                Expansion::InfiniteT => x.sqrt(),
            };
            Mode::new(w / omega, omega)
        })
        .collect();
    let bath = TruncatedBath::from_modes(modes)?.with_residual(&moments);
    if !(bath.residual <= RESIDUAL_LIMIT) {
        return Err(Error::IllConditioned {
            residual: bath.residual,
            limit: RESIDUAL_LIMIT,
        });
    }
    Ok(bath)
}

/// Single-mode parameters `S' = lambda^2 / A_V`, `w' = A_V / lambda`.
///
/// `lambda = 0` gives the empty bath.
pub fn single_mode_closed_form(lambda: f64, spectral_area: f64) -> Result<TruncatedBath> {
    if lambda == 0.0 {
        return Ok(TruncatedBath::empty());
    }
    if !(lambda > 0.0 && spectral_area > 0.0) {
        return Err(Error::InvalidParameter(format!(
            "single-mode truncation needs lambda > 0 and A_V > 0, got {lambda}, {spectral_area}"
        )));
    }
    let bath = TruncatedBath::from_modes(vec![Mode::new(
        lambda * lambda / spectral_area,
        spectral_area / lambda,
    )])?;
    Ok(bath.with_residual(&[(1, lambda), (2, spectral_area)]))
}

/// Nodes and weights of the Gauss rule whose first `2n` raw moments are
/// `moments`, for a positive measure on `(0, inf)`.
fn gauss_rule_from_moments(moments: &[f64]) -> Result<(Vec<f64>, Vec<f64>)> {
    let n = moments.len() / 2;
    debug_assert_eq!(moments.len(), 2 * n);
    if moments.iter().any(|m| !(m.is_finite() && *m > 0.0)) {
        return Err(Error::NonPhysicalSolution(
            "moments must be finite and positive".into(),
        ));
    }
    let m0 = moments[0];
    let scale = moments[1] / moments[0];
    let normalised: Vec<f64> = moments
        .iter()
        .enumerate()
        .map(|(k, m)| m / (m0 * scale.powi(k as i32)))
        .collect();

    let (alpha, beta) = chebyshev_recurrence(&normalised)?;
    let mut jacobi = DMatrix::<f64>::zeros(n, n);
    for k in 0..n {
        jacobi[(k, k)] = alpha[k];
        if k + 1 < n {
            let off = beta[k + 1].sqrt();
            jacobi[(k, k + 1)] = off;
            jacobi[(k + 1, k)] = off;
        }
    }
    let eig = SymmetricEigen::new(jacobi);
    let mut rule: Vec<(f64, f64)> = (0..n)
        .map(|i| (eig.eigenvalues[i], eig.eigenvectors[(0, i)].powi(2)))
        .collect();
    rule.sort_by(|a, b| a.0.total_cmp(&b.0));
    let (mut x, mut w): (Vec<f64>, Vec<f64>) = rule.into_iter().unzip();

    newton_polish(&normalised, &mut x, &mut w);
    let (x, w) = merge_coincident(x, w);

    if x.iter().any(|v| !(v.is_finite() && *v > 0.0)) {
        return Err(Error::NonPhysicalSolution(format!(
            "mode frequencies must be real and positive, got {:?}",
            x.iter().map(|v| v * scale).collect::<Vec<_>>()
        )));
    }
    if w.iter().any(|v| !(v.is_finite() && *v > 0.0)) {
        return Err(Error::NonPhysicalSolution(format!(
            "mode weights must be positive, got {:?}",
            w.iter().map(|v| v * m0).collect::<Vec<_>>()
        )));
    }
    Ok((
        x.iter().map(|v| v * scale).collect(),
        w.iter().map(|v| v * m0).collect(),
    ))
}

/// Chebyshev algorithm: three-term recurrence coefficients from ordinary
/// moments. `beta[0]` is the total mass.
fn chebyshev_recurrence(m: &[f64]) -> Result<(Vec<f64>, Vec<f64>)> {
    let n = m.len() / 2;
    let mut alpha = vec![0.0; n];
    let mut beta = vec![0.0; n];
    alpha[0] = m[1] / m[0];
    beta[0] = m[0];
    let mut sigma_prev = vec![0.0; 2 * n];
    let mut sigma = m.to_vec();
    for k in 1..n {
        let mut next = vec![0.0; 2 * n];
        for l in k..(2 * n - k) {
            next[l] = sigma[l + 1] - alpha[k - 1] * sigma[l] - beta[k - 1] * sigma_prev[l];
        }
        if !(next[k].is_finite() && next[k] > DEGENERATE_BETA * sigma[k - 1]) {
            return Err(Error::NonPhysicalSolution(format!(
                "the density supports at most {k} distinct modes"
            )));
        }
        alpha[k] = next[k + 1] / next[k] - sigma[k] / sigma[k - 1];
        beta[k] = next[k] / sigma[k - 1];
        sigma_prev = sigma;
        sigma = next;
    }
    Ok((alpha, beta))
}

fn moment_residuals(m: &[f64], x: &[f64], w: &[f64]) -> Vec<f64> {
    (0..m.len())
        .map(|k| {
            let s: f64 = x.iter().zip(w).map(|(xi, wi)| wi * xi.powi(k as i32)).sum();
            s / m[k] - 1.0
        })
        .collect()
}

fn max_abs(v: &[f64]) -> f64 {
    v.iter().fold(0.0, |a, b| a.max(b.abs()))
}

/// Damped Newton iterations on `sum_i w_i x_i^k = m_k`, relative form.
fn newton_polish(m: &[f64], x: &mut [f64], w: &mut [f64]) {
    let n = x.len();
    let mut res = moment_residuals(m, x, w);
    for _ in 0..20 {
        let current = max_abs(&res);
        if current < 1e-15 {
            break;
        }
        let mut jac = DMatrix::<f64>::zeros(2 * n, 2 * n);
        for k in 0..2 * n {
            for i in 0..n {
                jac[(k, i)] = x[i].powi(k as i32) / m[k];
                jac[(k, n + i)] = if k == 0 {
                    0.0
                } else {
                    k as f64 * w[i] * x[i].powi(k as i32 - 1) / m[k]
                };
            }
        }
        let rhs = DVector::from_vec(res.iter().map(|r| -r).collect());
        let step = match jac.lu().solve(&rhs) {
            Some(s) => s,
            None => break,
        };
        let mut damping = 1.0;
        let mut improved = false;
        for _ in 0..8 {
            let wx: Vec<f64> = (0..n).map(|i| w[i] + damping * step[i]).collect();
            let xx: Vec<f64> = (0..n).map(|i| x[i] + damping * step[n + i]).collect();
            let trial = moment_residuals(m, &xx, &wx);
            if max_abs(&trial) < current {
                w.copy_from_slice(&wx);
                x.copy_from_slice(&xx);
                res = trial;
                improved = true;
                break;
            }
            damping *= 0.5;
        }
        if !improved {
            break;
        }
    }
}

fn merge_coincident(x: Vec<f64>, w: Vec<f64>) -> (Vec<f64>, Vec<f64>) {
    let mut xs: Vec<f64> = Vec::with_capacity(x.len());
    let mut ws: Vec<f64> = Vec::with_capacity(w.len());
    for (xi, wi) in x.into_iter().zip(w) {
        if let Some(last) = xs.last_mut() {
            if (xi - *last).abs() <= MERGE_TOL * xi.abs().max(last.abs()) {
                let total = *ws.last().unwrap() + wi;
                if total != 0.0 {
                    *last = (*last * ws.last().unwrap() + xi * wi) / total;
                }
                *ws.last_mut().unwrap() = total;
                continue;
            }
        }
        xs.push(xi);
        ws.push(wi);
    }
    (xs, ws)
}
