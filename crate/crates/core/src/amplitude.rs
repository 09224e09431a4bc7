//! Thermal Franck-Condon amplitude coefficients `A_l(S, w)` of a single
//! displaced harmonic mode.
//!
//! `A_l` is the weight of an optical transition accompanied by a net change
//! of `l` vibrational quanta. It is evaluated from the double series
//!
//! ```text
//! A_l = sum_{n = |l|, |l|+2, ..} sum_{m = (n-l)/2}^{n} C(n,m) C(m, m-(n-l)/2) W_n(S) V_m(S,w)
//! W_n = S^n e^{-S} / n!,   V_m = N^m e^{-2 S N}
//! ```
//!
//! with `N` the Bose occupation of the mode. Summed over `l`, the order-`n`
//! terms form a Poisson distribution of mean `S(1+2N)` and the thermal order
//! `m` a Poisson distribution of mean `2SN`; both cut-offs are chosen from
//! those tails.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::special::LnFactorials;
use crate::units::{bose, ln_bose};

/// Truncation settings for [`amplitude_table`].
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct AmplitudeConfig {
    /// Target mass deficit `1 - sum_l A_l`.
    pub tol: f64,
    /// Largest admissible series order.
    pub n_max_cap: usize,
}

impl Default for AmplitudeConfig {
    fn default() -> Self {
        Self {
            tol: 1e-10,
            n_max_cap: 512,
        }
    }
}

/// Sparse table of `A_l`, ascending in `l`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AmplitudeTable {
    pub s: f64,
    pub omega: f64,
    pub t_v: f64,
    /// Bose occupation of the mode at `t_v`.
    pub occupation: f64,
    pub entries: Vec<(i64, f64)>,
    pub n_max: usize,
    pub m_tilde: usize,
    pub mass_deficit: f64,
    pub tol: f64,
}

impl AmplitudeTable {
    pub fn get(&self, l: i64) -> f64 {
        self.entries
            .binary_search_by_key(&l, |&(k, _)| k)
            .map(|i| self.entries[i].1)
            .unwrap_or(0.0)
    }

    pub fn iter(&self) -> impl Iterator<Item = (i64, f64)> + '_ {
        self.entries.iter().copied()
    }

    /// Smallest and largest stored `l`.
    pub fn l_range(&self) -> (i64, i64) {
        (
            self.entries.first().map_or(0, |e| e.0),
            self.entries.last().map_or(0, |e| e.0),
        )
    }

    pub fn total(&self) -> f64 {
        neumaier_sum(self.entries.iter().map(|e| e.1))
    }

    /// `l` of the largest coefficient (the smaller `l` on exact ties).
    pub fn argmax(&self) -> i64 {
        self.entries
            .iter()
            .fold((0, f64::NEG_INFINITY), |best, &(l, a)| if a > best.1 { (l, a) } else { best })
            .0
    }

    pub fn max_value(&self) -> f64 {
        self.entries.iter().map(|e| e.1).fold(0.0, f64::max)
    }

    /// `sum_l l A_l`, the mean number of quanta transferred.
    pub fn mean_transfer(&self) -> f64 {
        neumaier_sum(self.entries.iter().map(|&(l, a)| l as f64 * a))
    }

    /// Two-column CSV `l,A_l`.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("l,A_l\n");
        for &(l, a) in &self.entries {
            out.push_str(&format!("{l},{a:.16e}\n"));
        }
        out
    }
}

pub(crate) fn neumaier_sum<I: Iterator<Item = f64>>(values: I) -> f64 {
    let mut sum = 0.0_f64;
    let mut c = 0.0_f64;
    for v in values {
        let t = sum + v;
        if sum.abs() >= v.abs() {
            c += (sum - t) + v;
        } else {
            c += (v - t) + sum;
        }
        sum = t;
    }
    sum + c
}

/// Poisson Franck-Condon factor `e^{-S} S^l / l!` (zero for `l < 0`).
pub fn poisson_limit(s: f64, l: i64) -> f64 {
    if l < 0 {
        return 0.0;
    }
    if s == 0.0 {
        return if l == 0 { 1.0 } else { 0.0 };
    }
    let lf = crate::special::ln_factorial(l as usize);
    (l as f64 * s.ln() - s - lf).exp()
}

/// Smallest `n >= mean` with `P(Poisson(mean) > n) <= eps`, or `None` past `cap`.
fn poisson_cutoff(mean: f64, eps: f64, cap: usize, lnf: &LnFactorials) -> Option<usize> {
    if mean == 0.0 {
        return Some(0);
    }
    let ln_mean = mean.ln();
    let ln_pmf = |k: usize| k as f64 * ln_mean - mean - lnf.get(k);
    let start = mean.floor() as usize;
    for n in start..=cap {
        // tail bound valid once n + 2 > mean
        let ratio = mean / (n as f64 + 2.0);
        if ratio >= 1.0 {
            continue;
        }
        let bound = ln_pmf(n + 1).exp() / (1.0 - ratio);
        if bound <= eps {
            return Some(n);
        }
    }
    None
}

/// Build the amplitude table for a mode `(S, w)` at vibrational temperature `t_v`.
pub fn amplitude_table(s: f64, omega: f64, t_v: f64, cfg: AmplitudeConfig) -> Result<AmplitudeTable> {
    if !(s.is_finite() && s >= 0.0) {
        return Err(Error::InvalidParameter(format!("S must be >= 0, got {s}")));
    }
    if !(omega.is_finite() && omega > 0.0) {
        return Err(Error::InvalidParameter(format!("omega must be > 0, got {omega}")));
    }
    if !(t_v.is_finite() && t_v >= 0.0) {
        return Err(Error::InvalidParameter(format!("T_V must be >= 0, got {t_v}")));
    }
    if !(cfg.tol > 0.0 && cfg.tol < 1.0) {
        return Err(Error::InvalidParameter(format!("tol must lie in (0, 1), got {}", cfg.tol)));
    }

    let occupation = bose(omega, t_v);
    if s == 0.0 {
        return Ok(AmplitudeTable {
            s,
            omega,
            t_v,
            occupation,
            entries: vec![(0, 1.0)],
            n_max: 0,
            m_tilde: 0,
            mass_deficit: 0.0,
            tol: cfg.tol,
        });
    }

    let eps = cfg.tol * 1e-2;
    let lnf = LnFactorials::new(cfg.n_max_cap + 2);
    let order_mean = s * (1.0 + 2.0 * occupation);
    let n_max = poisson_cutoff(order_mean, eps, cfg.n_max_cap, &lnf).ok_or(Error::TruncationFailure {
        cap: cfg.n_max_cap,
        s,
        occupation,
    })?;
    let m_tilde = if occupation > 0.0 {
        poisson_cutoff(2.0 * s * occupation, eps, cfg.n_max_cap, &lnf)
            .unwrap_or(n_max)
            .min(n_max)
    } else {
        0
    };

    let ln_s = s.ln();
    let ln_n = ln_bose(omega, t_v);
    let n_max_i = n_max as i64;
    let mut raw: Vec<(i64, f64)> = Vec::with_capacity(2 * n_max + 1);
    for l in -n_max_i..=n_max_i {
        let mut terms = Vec::new();
        let mut n = l.unsigned_abs() as usize;
        while n <= n_max {
            // k = (n - l)/2 thermal quanta absorbed; 0 <= k <= n
            let k = ((n as i64 - l) / 2) as usize;
            let m_hi = n.min(m_tilde);
            let base = n as f64 * ln_s - order_mean;
            let mut m = k;
            while m <= m_hi {
                let ln_thermal = if m == 0 { 0.0 } else { m as f64 * ln_n };
                let ln_term = base + ln_thermal - lnf.get(m) - lnf.get(n - m) + lnf.ln_binomial(m, k);
                terms.push(ln_term.exp());
                m += 1;
            }
            n += 2;
        }
        let value = neumaier_sum(terms.into_iter());
        if value > 0.0 {
            raw.push((l, value));
        }
    }

    let entries = prune_entries(raw, cfg.tol);
    let mass_deficit = 1.0 - neumaier_sum(entries.iter().map(|e| e.1));
    Ok(AmplitudeTable {
        s,
        omega,
        t_v,
        occupation,
        entries,
        n_max,
        m_tilde,
        mass_deficit,
        tol: cfg.tol,
    })
}

/// Drop the smallest entries below `tol * max` while the dropped mass stays
/// within half of `tol`.
fn prune_entries(raw: Vec<(i64, f64)>, tol: f64) -> Vec<(i64, f64)> {
    let max = raw.iter().map(|e| e.1).fold(0.0, f64::max);
    let threshold = tol * max;
    let mut small: Vec<usize> = (0..raw.len()).filter(|&i| raw[i].1 < threshold).collect();
    small.sort_by(|&a, &b| raw[a].1.total_cmp(&raw[b].1));
    let mut dropped = vec![false; raw.len()];
    let mut budget = 0.5 * tol;
    for i in small {
        if raw[i].1 > budget {
            break;
        }
        budget -= raw[i].1;
        dropped[i] = true;
    }
    raw.into_iter()
        .zip(dropped)
        .filter_map(|(e, d)| (!d).then_some(e))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::units::K_B;

    /// Temperature giving `k_B T / w = ratio`.
    fn temperature_for(omega: f64, ratio: f64) -> f64 {
        ratio * omega / K_B
    }

    /// Independent single-sum form `e^{-S(2N+1)} sum_b (S(N+1))^(l+b) (SN)^b / ((l+b)! b!)`,
    /// accumulated by term ratios.
    fn single_sum_oracle(s: f64, n_occ: f64, l: i64) -> f64 {
        let up = s * (n_occ + 1.0);
        let down = s * n_occ;
        let (a0, b0) = if l >= 0 { (l as usize, 0usize) } else { (0, (-l) as usize) };
        // first term (S(N+1))^a0 (SN)^b0 / (a0! b0!)
        let mut term = (-s * (2.0 * n_occ + 1.0)).exp();
        for i in 1..=a0 {
            term *= up / i as f64;
        }
        for i in 1..=b0 {
            term *= down / i as f64;
        }
        let mut total = term;
        if down == 0.0 {
            return total;
        }
        let (mut a, mut b) = (a0, b0);
        for _ in 0..2000 {
            a += 1;
            b += 1;
            term *= up * down / (a as f64 * b as f64);
            total += term;
            if term < 1e-20 * total {
                break;
            }
        }
        total
    }

    #[test]
    fn zero_coupling() {
        let t = amplitude_table(0.0, 0.1, 300.0, AmplitudeConfig::default()).unwrap();
        assert_eq!(t.entries, vec![(0, 1.0)]);
        assert_eq!(t.mass_deficit, 0.0);
    }

    #[test]
    fn zero_temperature_is_poisson() {
        let t = amplitude_table(2.0, 0.1, 0.0, AmplitudeConfig::default()).unwrap();
        assert!((t.get(2) - 2.0 * (-2.0_f64).exp()).abs() < 1e-15);
        assert!((t.get(2) - 0.27067).abs() < 1e-5);
        assert!(t.entries.iter().all(|&(l, _)| l >= 0));
        for &(l, a) in &t.entries {
            let p = poisson_limit(2.0, l);
            assert!(((a - p) / p).abs() < 1e-12);
        }
    }

    #[test]
    fn poisson_limit_values() {
        assert_eq!(poisson_limit(0.0, 0), 1.0);
        assert!((poisson_limit(2.0, 2) - 0.270_671).abs() < 1e-6);
        assert_eq!(poisson_limit(2.0, -1), 0.0);
    }

    #[test]
    fn room_temperature_overlaps_zero_temperature() {
        let cfg = AmplitudeConfig::default();
        let cold = amplitude_table(15.0, 1.0, 0.0, cfg).unwrap();
        let warm = amplitude_table(15.0, 1.0, 298.0, cfg).unwrap();
        let (lo, hi) = warm.l_range();
        for l in lo.min(cold.l_range().0)..=hi.max(cold.l_range().1) {
            assert!((warm.get(l) - cold.get(l)).abs() < 1e-6);
        }
        // S = 15 is an exact Poisson tie between l = 14 and l = 15
        assert!((cold.get(14) - cold.get(15)).abs() < 1e-15);
        for t in [&cold, &warm] {
            assert!(t.get(15) >= t.max_value() * (1.0 - 1e-12));
        }
    }

    #[test]
    fn matches_single_sum_form() {
        let cfg = AmplitudeConfig::default();
        for &s in &[0.1, 1.0, 5.0, 15.0] {
            for &ratio in &[0.025, 0.5, 2.0] {
                let t = amplitude_table(s, 0.1, temperature_for(0.1, ratio), cfg).unwrap();
                for &(l, a) in &t.entries {
                    let o = single_sum_oracle(s, t.occupation, l);
                    // series truncation error is absolute, bounded by tol * 1e-2
                    assert!(
                        (a - o).abs() <= 1e-12 * o + cfg.tol * 1e-2,
                        "S={s} ratio={ratio} l={l}: {a} vs {o}"
                    );
                }
            }
        }
    }

    #[test]
    fn normalisation_and_first_moment() {
        let cfg = AmplitudeConfig::default();
        for &s in &[0.1, 1.0, 5.0, 15.0] {
            for &ratio in &[0.0, 0.025, 0.5, 2.0] {
                let t = amplitude_table(s, 0.1, temperature_for(0.1, ratio), cfg).unwrap();
                let total = t.total();
                assert!(total >= 1.0 - cfg.tol && total <= 1.0 + 1e-14, "S={s} ratio={ratio}: {total}");
                assert!((t.mean_transfer() - s).abs() < 1e-8 * s.max(1.0));
                assert!(t.entries.iter().all(|e| e.1 >= 0.0));
            }
        }
    }

    #[test]
    fn zero_temperature_has_no_negative_l() {
        let t = amplitude_table(3.3, 0.05, 0.0, AmplitudeConfig::default()).unwrap();
        assert!(t.l_range().0 >= 0);
        assert_eq!(t.m_tilde, 0);
    }

    #[test]
    fn truncation_failure_at_cap() {
        let cfg = AmplitudeConfig {
            tol: 1e-10,
            n_max_cap: 40,
        };
        assert!(matches!(
            amplitude_table(30.0, 0.1, 0.0, cfg),
            Err(Error::TruncationFailure { .. })
        ));
    }

    #[test]
    fn invalid_inputs() {
        let cfg = AmplitudeConfig::default();
        assert!(amplitude_table(-1.0, 0.1, 0.0, cfg).is_err());
        assert!(amplitude_table(1.0, 0.0, 0.0, cfg).is_err());
        assert!(amplitude_table(1.0, 0.1, -3.0, cfg).is_err());
        assert!(amplitude_table(1.0, 0.1, 0.0, AmplitudeConfig { tol: 0.0, n_max_cap: 512 }).is_err());
    }

    #[test]
    fn csv_export() {
        let t = amplitude_table(1.0, 0.1, 0.0, AmplitudeConfig::default()).unwrap();
        let csv = t.to_csv();
        assert!(csv.starts_with("l,A_l\n0,"));
        assert_eq!(csv.lines().count(), t.entries.len() + 1);
    }
}
