//! Thermal amplitude tables against two independent constructions: an
//! explicit sum over displaced-oscillator level pairs, and Fourier
//! coefficients of the single-mode propagator.

use num_complex::Complex64;
use polaron_core::{amplitude_table, phonon_propagator, AmplitudeConfig, Mode, SpectralDensity, K_B};
use std::f64::consts::PI;

fn laguerre(n: usize, alpha: f64, x: f64) -> f64 {
    let (mut prev, mut cur) = (1.0, 1.0 + alpha - x);
    if n == 0 {
        return prev;
    }
    for k in 1..n {
        let kf = k as f64;
        let next = ((2.0 * kf + 1.0 + alpha - x) * cur - (kf + alpha) * prev) / (kf + 1.0);
        prev = cur;
        cur = next;
    }
    cur
}

fn ln_fact(n: usize) -> f64 {
    (1..=n).map(|k| (k as f64).ln()).sum()
}

/// `|<q| D(sqrt S) |p>|^2`.
fn overlap(s: f64, p: usize, q: usize) -> f64 {
    let (lo, hi) = (p.min(q), p.max(q));
    let d = (hi - lo) as f64;
    let l = laguerre(lo, d, s);
    (-s + d * s.ln() + ln_fact(lo) - ln_fact(hi)).exp() * l * l
}

fn brute_force(s: f64, omega: f64, t_v: f64, l: i64) -> f64 {
    let x = if t_v == 0.0 { 0.0 } else { (-omega / (K_B * t_v)).exp() };
    let mut total = 0.0;
    for p in 0..=40usize {
        let q = p as i64 + l;
        if !(0..=40).contains(&q) {
            continue;
        }
        total += (1.0 - x) * x.powi(p as i32) * overlap(s, p, q as usize);
    }
    total
}

#[test]
fn matches_level_pair_sum() {
    let omega = 0.1;
    for s in [0.3, 1.0, 2.0] {
        for ratio in [0.0, 0.25, 0.5, 1.0] {
            let t_v = ratio * omega / K_B;
            let table = amplitude_table(s, omega, t_v, AmplitudeConfig::default()).unwrap();
            for l in -8..=14 {
                let b = brute_force(s, omega, t_v, l);
                let a = table.get(l);
                assert!((a - b).abs() < 1e-8, "S={s} kT/w={ratio} l={l}: {a} vs {b}");
            }
        }
    }
}

#[test]
fn matches_propagator_fourier_coefficients() {
    let (s, omega, t_v) = (1.0, 0.1, 2000.0);
    let sd = SpectralDensity::discrete(vec![Mode::new(s, omega)]).unwrap();
    let phi0 = phonon_propagator(&sd, t_v, 0.0).unwrap().re;
    let n = 512;
    let samples: Vec<Complex64> = (0..n)
        .map(|k| {
            let theta = 2.0 * PI * k as f64 / n as f64;
            (phonon_propagator(&sd, t_v, theta / omega).unwrap() - phi0).exp()
        })
        .collect();
    let table = amplitude_table(s, omega, t_v, AmplitudeConfig::default()).unwrap();
    for l in -10..=15 {
        let coeff: Complex64 = samples
            .iter()
            .enumerate()
            .map(|(k, v)| v * Complex64::from_polar(1.0, 2.0 * PI * (l * k as i64) as f64 / n as f64))
            .sum::<Complex64>()
            / n as f64;
        assert!(coeff.im.abs() < 1e-12);
        assert!((coeff.re - table.get(l)).abs() < 1e-6, "l={l}: {} vs {}", coeff.re, table.get(l));
    }
}
