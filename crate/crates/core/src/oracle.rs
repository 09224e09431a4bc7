//! Direct numerical evaluation of the rate function for the full
//! (untruncated) vibrational bath.
//!
//! The vibronic kernel `K(eps) = (1/pi) Re int_0^inf dt exp[phi(t) - phi(0)] e^{i eps t}`
//! is split into a zero-phonon line `exp(-phi(0)) delta(eps)` and a smooth
//! part. The smooth part is the multi-phonon series
//!
//! ```text
//! K_s = exp(-phi(0)) sum_{n >= 1} g^{*n} / n!
//! g(eps) = J(|eps|)/eps^2 * (N(|eps|) + 1)   for eps > 0
//!        = J(|eps|)/eps^2 * N(|eps|)         for eps < 0
//! ```
//!
//! For the cubic-exponential family at zero temperature every convolution
//! power is a gamma density and the series is summed exactly. Otherwise the
//! one-phonon term is evaluated pointwise and the rest by FFT on a uniform
//! grid. A time-domain Fourier evaluation ([`k_function`]) is kept as a
//! cross-check.

use std::f64::consts::PI;

use num_complex::Complex64;
use rustfft::FftPlanner;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::prf::Channels;
use crate::quadrature::{integrate, integrate_with_breaks, QuadTolerance};
use crate::special::ln_factorial;
use crate::spectral_density::{OpticalBath, SpectralDensity};
use crate::units::{bose, K_B};

/// Numerical knobs for the oracle.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct QuadConfig {
    /// Relative tolerance of every adaptive integral.
    pub rel_tol: f64,
    /// Time-domain integration stops once `|exp(phi(t)-phi(0)) - exp(-phi(0))|`
    /// falls below this.
    pub tail_tol: f64,
    /// Minimum FFT grid size for the multi-phonon part.
    pub grid_points: usize,
    /// Upper limit on the FFT grid size.
    pub max_grid_points: usize,
    pub max_intervals: usize,
}

impl Default for QuadConfig {
    fn default() -> Self {
        Self {
            rel_tol: 1e-9,
            tail_tol: 1e-10,
            grid_points: 1 << 16,
            max_grid_points: 1 << 22,
            max_intervals: 20_000,
        }
    }
}

impl QuadConfig {
    fn tolerance(&self) -> QuadTolerance {
        QuadTolerance {
            abs: 0.0,
            rel: self.rel_tol,
            max_intervals: self.max_intervals,
        }
    }
}

fn check_continuum(sd: &SpectralDensity, t_v: f64) -> Result<()> {
    sd.validate()?;
    if !(t_v.is_finite() && t_v >= 0.0) {
        return Err(Error::InvalidParameter(format!("T_V must be non-negative, got {t_v}")));
    }
    if sd.is_discrete() {
        return Err(Error::NonDecayingPropagator(
            "discrete modes give a pure delta comb; use the amplitude tables".into(),
        ));
    }
    Ok(())
}

/// `phi(0)` requires `mu_0` at zero temperature and `mu_-1` above it.
fn check_propagator_moments(sd: &SpectralDensity, t_v: f64) -> Result<()> {
    sd.moment(0)?;
    if t_v > 0.0 {
        sd.moment(-1)?;
    }
    Ok(())
}

/// Trigamma function for `Re z >= 1`.
fn trigamma(mut z: Complex64) -> Complex64 {
    let mut acc = Complex64::new(0.0, 0.0);
    while z.norm() < 20.0 {
        acc += 1.0 / (z * z);
        z += 1.0;
    }
    let w = 1.0 / z;
    let w2 = w * w;
    // Bernoulli series in 1/z
    let series = w2
        * (1.0 / 6.0
            + w2 * (-1.0 / 30.0
                + w2 * (1.0 / 42.0 + w2 * (-1.0 / 30.0 + w2 * (5.0 / 66.0 + w2 * (-691.0 / 2730.0 + w2 * 7.0 / 6.0))))));
    acc + w + 0.5 * w2 + w * series
}

/// `coth(w / 2 k_B T) = 1 + 2 N(w)`.
fn coth_factor(omega: f64, t_v: f64) -> f64 {
    1.0 + 2.0 * bose(omega, t_v)
}

/// Phonon propagator
/// `phi(t) = int dw J(w)/w^2 [cos(wt) coth(w/2k_B T) - i sin(wt)]`.
///
/// Closed forms are used for discrete modes and the cubic-exponential
/// family; other densities are integrated numerically.
pub fn phonon_propagator(sd: &SpectralDensity, t_v: f64, t: f64) -> Result<Complex64> {
    sd.validate()?;
    match sd {
        SpectralDensity::DiscreteModes { modes } => Ok(modes
            .iter()
            .map(|m| {
                let (s, c) = (m.omega * t).sin_cos();
                m.s * Complex64::new(c * coth_factor(m.omega, t_v), -s)
            })
            .sum()),
        SpectralDensity::CubicExponential { s, omega_c } => Ok(cubic_propagator(*s, *omega_c, t_v, t)),
        _ => propagator_by_quadrature(sd, t_v, t, &QuadConfig::default()),
    }
}

fn cubic_propagator(s: f64, omega_c: f64, t_v: f64, t: f64) -> Complex64 {
    let d = Complex64::new(1.0, omega_c * t);
    let zero_t = s / (d * d);
    if t_v == 0.0 {
        return zero_t;
    }
    // coth = 1 + 2 sum_k exp(-k w / k_B T) turns the thermal part into a
    // Hurwitz sum of 1/(a_k -+ i t)^2 with a_k = 1/w_c + k/k_B T.
    let kt = K_B * t_v;
    let base = kt / omega_c + 1.0;
    let plus = trigamma(Complex64::new(base, kt * t));
    let minus = trigamma(Complex64::new(base, -kt * t));
    zero_t + s * (kt / omega_c).powi(2) * (plus + minus)
}

/// `phi(t)` by adaptive quadrature over frequency, for any continuum density.
pub fn propagator_by_quadrature(sd: &SpectralDensity, t_v: f64, t: f64, cfg: &QuadConfig) -> Result<Complex64> {
    check_continuum(sd, t_v)?;
    check_propagator_moments(sd, t_v)?;
    let lo = sd.support_start();
    let hi = sd.support_bound();
    let pieces = ((hi - lo) * t.abs() / PI).ceil().clamp(16.0, 4000.0) as usize;
    let mut points: Vec<f64> = (0..=pieces).map(|k| lo + (hi - lo) * k as f64 / pieces as f64).collect();
    if let SpectralDensity::Tabulated(tab) = sd {
        if tab.omega.len() <= 2000 {
            points.extend(tab.omega.iter().copied());
            points.sort_by(f64::total_cmp);
            points.dedup();
        }
    }
    let weight = |w: f64| sd.evaluate(w).unwrap_or(0.0) / (w * w);
    let tol = QuadTolerance {
        abs: 1e-13 * sd.moment(0)?.abs().max(f64::MIN_POSITIVE),
        rel: 1e-12,
        max_intervals: cfg.max_intervals.max(4 * pieces),
    };
    let re = integrate_with_breaks(|w| weight(w) * (w * t).cos() * coth_factor(w, t_v), &points, tol);
    let im = integrate_with_breaks(|w| -weight(w) * (w * t).sin(), &points, tol);
    if !(re.converged && im.converged) {
        return Err(Error::DivergentMoment {
            order: 0,
            reason: format!("propagator quadrature did not converge at t = {t}"),
        });
    }
    Ok(Complex64::new(re.value, im.value))
}

/// `phi(t_k)` on the symmetric grid `t_k = k dt`, `k = -n..=n`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PropagatorSamples {
    pub t: Vec<f64>,
    pub phi: Vec<Complex64>,
    pub phi0: f64,
    /// `|exp(phi(t_n) - phi(0)) - exp(-phi(0))|` at the grid end.
    pub tail_certificate: f64,
}

impl PropagatorSamples {
    /// Largest `|phi(-t) - conj(phi(t))|` over the grid.
    pub fn hermiticity_defect(&self) -> f64 {
        let n = self.t.len();
        (0..n / 2 + 1)
            .map(|k| (self.phi[k] - self.phi[n - 1 - k].conj()).norm())
            .fold(0.0, f64::max)
    }
}

pub fn propagator_samples(sd: &SpectralDensity, t_v: f64, dt: f64, n: usize) -> Result<PropagatorSamples> {
    if !(dt > 0.0) {
        return Err(Error::InvalidParameter("time step must be positive".into()));
    }
    let n = n as i64;
    let t: Vec<f64> = (-n..=n).map(|k| k as f64 * dt).collect();
    let phi = t
        .iter()
        .map(|&ti| phonon_propagator(sd, t_v, ti))
        .collect::<Result<Vec<_>>>()?;
    let phi0 = phi[n as usize].re;
    let end = *phi.last().expect("non-empty grid");
    let tail_certificate = ((end - phi0).exp() - (-phi0).exp()).norm();
    Ok(PropagatorSamples {
        t,
        phi,
        phi0,
        tail_certificate,
    })
}

/// One value of the vibronic kernel from the time-domain integral.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct KValue {
    /// Weight of the zero-phonon delta line, `exp(-phi(0))`.
    pub delta_weight: f64,
    /// Smooth multi-phonon density at the requested energy (1/eV).
    pub smooth: f64,
    pub t_max: f64,
    pub tail_certificate: f64,
    pub converged: bool,
}

/// Vibronic kernel at `eps` by direct Fourier integration of the propagator.
///
/// The constant long-time limit of `exp(phi(t) - phi(0))` gives the delta
/// weight; the decaying remainder is integrated on growing panels until
/// the tail certificate passes, with a two-term integration-by-parts
/// estimate of what lies beyond.
pub fn k_function(sd: &SpectralDensity, t_v: f64, eps: f64, cfg: &QuadConfig) -> Result<KValue> {
    check_continuum(sd, t_v)?;
    check_propagator_moments(sd, t_v)?;
    let phi0 = phonon_propagator(sd, t_v, 0.0)?.re;
    let delta_weight = (-phi0).exp();
    let f = |t: f64| -> Result<Complex64> { Ok((phonon_propagator(sd, t_v, t)? - phi0).exp() - delta_weight) };

    let scale = sd.frequency_scale();
    let base = 0.5 / (scale + eps.abs());
    let t_limit = 1e8 / scale;
    let tol = QuadTolerance {
        abs: cfg.tail_tol * 1e-3 / (scale + eps.abs()),
        rel: cfg.rel_tol,
        max_intervals: 200,
    };

    // panel integrals must not fail mid-way: evaluate the closure eagerly once
    f(0.0)?;
    let re_part = |t: f64| {
        let v = f(t).unwrap_or_default();
        let (s, c) = (eps * t).sin_cos();
        v.re * c - v.im * s
    };
    let mut total = 0.0;
    let mut lo: f64 = 0.0;
    let mut converged = true;
    let certificate;
    loop {
        let mut width = (0.2 * lo).max(base);
        if eps != 0.0 {
            width = width.min(4.0 * PI / eps.abs());
        }
        let hi = lo + width;
        let part = integrate(re_part, lo, hi, tol);
        converged &= part.converged;
        total += part.value;
        lo = hi;
        let tail = f(lo)?.norm();
        if tail < cfg.tail_tol {
            certificate = tail;
            break;
        }
        if lo > t_limit {
            certificate = tail;
            converged = false;
            break;
        }
    }
    if eps != 0.0 {
        let h = 1e-4 * lo.max(1.0 / scale);
        let fv = f(lo)?;
        let dfv = (f(lo + h)? - f(lo - h)?) / (2.0 * h);
        let phase = Complex64::from_polar(1.0, eps * lo);
        let tail = phase * (Complex64::i() * fv / eps - dfv / (eps * eps));
        total += tail.re;
    }
    Ok(KValue {
        delta_weight,
        smooth: total / PI,
        t_max: lo,
        tail_certificate: certificate,
        converged,
    })
}

/// Smooth part of the vibronic kernel, prepared once and evaluated anywhere.
#[derive(Debug, Clone)]
pub struct VibronicKernel {
    sd: SpectralDensity,
    t_v: f64,
    phi0: f64,
    repr: KernelRepr,
    window: (f64, f64),
}

#[derive(Debug, Clone)]
enum KernelRepr {
    /// Zero-temperature cubic-exponential bath: gamma-density series.
    CubicSeries { s: f64, omega_c: f64 },
    /// Multi-phonon (n >= 2) part sampled on a circular grid; index `j`
    /// holds energy `j h` for `j < n - negative` and `(j - n) h` otherwise.
    Grid { h: f64, negative: usize, values: Vec<f64> },
}

impl VibronicKernel {
    pub fn new(sd: &SpectralDensity, t_v: f64, cfg: &QuadConfig) -> Result<Self> {
        check_continuum(sd, t_v)?;
        check_propagator_moments(sd, t_v)?;
        let phi0 = phonon_propagator(sd, t_v, 0.0)?.re;
        let lambda = sd.moment(1)?;
        // second cumulant: int J coth <= mu_2 + 2 k_B T mu_1
        let variance = sd.moment(2)? + 2.0 * K_B * t_v * lambda;
        let spread = 15.0 * variance.sqrt();
        let bound = sd.support_bound();

        if let (SpectralDensity::CubicExponential { s, omega_c }, true) = (sd, t_v == 0.0) {
            return Ok(Self {
                sd: sd.clone(),
                t_v,
                phi0,
                repr: KernelRepr::CubicSeries {
                    s: *s,
                    omega_c: *omega_c,
                },
                window: (0.0, lambda + spread + 40.0 * omega_c),
            });
        }

        let thermal = if t_v > 0.0 { (40.0 * K_B * t_v).min(bound) } else { 0.0 };
        let lo = (lambda - spread).min(0.0) - thermal;
        let hi = lambda + spread + bound;
        let target_h = sd.frequency_scale() / 400.0;
        let mut n = cfg.grid_points.next_power_of_two();
        while (hi - lo) / n as f64 > target_h && n < cfg.max_grid_points {
            n *= 2;
        }
        let h = (hi - lo) / n as f64;
        let negative = ((-lo) / h).ceil() as usize;
        let mut kernel = Self {
            sd: sd.clone(),
            t_v,
            phi0,
            repr: KernelRepr::Grid {
                h,
                negative,
                values: Vec::new(),
            },
            window: (lo, hi),
        };
        kernel.fill_grid(n, h, negative);
        Ok(kernel)
    }

    fn fill_grid(&mut self, n: usize, h: f64, negative: usize) {
        let energy = |j: usize| if j < n - negative { j as f64 * h } else { (j as f64 - n as f64) * h };
        let mut buf: Vec<Complex64> = (0..n)
            .map(|j| {
                let e = energy(j);
                let g = if e == 0.0 {
                    0.5 * (self.one_phonon(0.5 * h) + self.one_phonon(-0.5 * h))
                } else {
                    self.one_phonon(e)
                };
                Complex64::new(h * g, 0.0)
            })
            .collect();
        // The kink of g at zero costs the rectangle rule O(h^2) of mass,
        // concentrated at the kink; restore it there.
        let grid_mass: f64 = buf.iter().map(|c| c.re).sum();
        let defect = self.phi0 - grid_mass;
        if defect.abs() < 1e-3 * self.phi0 {
            buf[0].re += defect;
        }
        let mut planner = FftPlanner::new();
        planner.plan_fft_forward(n).process(&mut buf);
        let damp = (-self.phi0).exp();
        for a in buf.iter_mut() {
            *a = multi_phonon_remainder(*a, self.phi0, damp);
        }
        planner.plan_fft_inverse(n).process(&mut buf);
        let norm = 1.0 / (n as f64 * h);
        if let KernelRepr::Grid { values, .. } = &mut self.repr {
            *values = buf.iter().map(|c| c.re * norm).collect();
        }
    }

    /// One-phonon density `g(eps)`.
    pub fn one_phonon(&self, eps: f64) -> f64 {
        if eps == 0.0 {
            return 0.0;
        }
        let w = eps.abs();
        let j = self.sd.evaluate(w).unwrap_or(0.0);
        if j == 0.0 {
            return 0.0;
        }
        let occ = bose(w, self.t_v);
        j / (w * w) * if eps > 0.0 { occ + 1.0 } else { occ }
    }

    /// Zero-phonon weight `exp(-phi(0))`.
    pub fn delta_weight(&self) -> f64 {
        (-self.phi0).exp()
    }

    pub fn phi0(&self) -> f64 {
        self.phi0
    }

    /// Energy range outside which the smooth part is negligible.
    pub fn window(&self) -> (f64, f64) {
        self.window
    }

    /// Smooth kernel density at `eps`.
    pub fn smooth(&self, eps: f64) -> f64 {
        match &self.repr {
            KernelRepr::CubicSeries { s, omega_c } => cubic_series(*s, *omega_c, eps),
            KernelRepr::Grid { h, negative, values } => {
                let n = values.len();
                let x = eps / h;
                let (lo, hi) = (-(*negative as f64), (n - negative) as f64 - 1.0);
                let multi = if x < lo || x > hi {
                    0.0
                } else {
                    let i0 = x.floor();
                    let frac = x - i0;
                    let idx = |i: f64| ((i as i64).rem_euclid(n as i64)) as usize;
                    let a = values[idx(i0)];
                    let b = if i0 + 1.0 > hi { 0.0 } else { values[idx(i0 + 1.0)] };
                    a + frac * (b - a)
                };
                self.delta_weight() * self.one_phonon(eps) + multi
            }
        }
    }

    /// `int smooth(eps) d eps`; should equal `1 - exp(-phi(0))`.
    pub fn smooth_mass(&self, cfg: &QuadConfig) -> f64 {
        let (lo, hi) = self.window;
        let points = breakpoints(&[lo, 0.0, hi], lo, hi);
        integrate_with_breaks(|e| self.smooth(e), &points, cfg.tolerance()).value
    }
}

/// `exp(-phi0) (e^a - 1 - a)` without cancellation for small `a`.
fn multi_phonon_remainder(a: Complex64, phi0: f64, damp: f64) -> Complex64 {
    if a.norm() < 0.5 {
        let mut term = a * a * 0.5;
        let mut sum = term;
        for k in 3..40 {
            term *= a / k as f64;
            sum += term;
            if term.norm() < 1e-18 * sum.norm() {
                break;
            }
        }
        sum * damp
    } else {
        (a - phi0).exp() - damp * (1.0 + a)
    }
}

/// `exp(-S) sum_{n>=1} S^n/n! eps^(2n-1) exp(-eps/w_c) / (w_c^(2n) (2n-1)!)`.
fn cubic_series(s: f64, omega_c: f64, eps: f64) -> f64 {
    if eps <= 0.0 || s == 0.0 {
        return 0.0;
    }
    let x = eps / omega_c;
    let ln_x = x.ln();
    let ln_s = s.ln();
    let log_term = |n: usize| {
        let nf = n as f64;
        nf * ln_s - ln_factorial(n) + (2.0 * nf - 1.0) * ln_x - ln_factorial(2 * n - 1)
    };
    // stationary point of the summand: S x^2 ~ 4 n^3
    let mut peak = ((s * x * x / 4.0).cbrt().round() as usize).max(1);
    while peak > 1 && log_term(peak - 1) > log_term(peak) {
        peak -= 1;
    }
    while log_term(peak + 1) > log_term(peak) {
        peak += 1;
    }
    let top = log_term(peak);
    let mut sum = 0.0;
    for n in (1..=peak).rev() {
        let v = (log_term(n) - top).exp();
        sum += v;
        if v < 1e-18 * sum {
            break;
        }
    }
    for n in peak + 1.. {
        let v = (log_term(n) - top).exp();
        sum += v;
        if v < 1e-18 * sum {
            break;
        }
    }
    (top - s - x).exp() * sum / omega_c
}

fn breakpoints(candidates: &[f64], lo: f64, hi: f64) -> Vec<f64> {
    let mut points: Vec<f64> = candidates.iter().copied().filter(|p| *p >= lo && *p <= hi).collect();
    points.extend([lo, hi]);
    points.sort_by(f64::total_cmp);
    points.dedup();
    points
}

/// Oracle rate at one energy.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct OracleValue {
    pub value: f64,
    pub channels: Channels,
    pub error: f64,
    pub converged: bool,
}

impl VibronicKernel {
    /// `gamma(eta) = int d eps K(eps) [J_E(eta - eps) + J_A(eps - eta)]`.
    pub fn prf(&self, eta: f64, ob: &OpticalBath, cfg: &QuadConfig) -> OracleValue {
        let (lo, hi) = self.window;
        let points = breakpoints(&[0.0, eta, -eta], lo, hi);
        let tol = cfg.tolerance();
        let em = integrate_with_breaks(|e| self.smooth(e) * ob.sideband_response(eta, e).0, &points, tol);
        let ab = integrate_with_breaks(|e| self.smooth(e) * ob.sideband_response(eta, e).1, &points, tol);
        let (zero_em, zero_ab) = ob.sideband_response(eta, 0.0);
        let dw = self.delta_weight();
        let channels = Channels {
            emission: dw * zero_em + em.value,
            absorption: dw * zero_ab + ab.value,
        };
        OracleValue {
            value: channels.total(),
            channels,
            error: em.error + ab.error,
            converged: em.converged && ab.converged,
        }
    }
}

/// `gamma(eta)` for the full bath.
pub fn prf_numerical(eta: f64, sd: &SpectralDensity, ob: &OpticalBath, t_v: f64, cfg: &QuadConfig) -> Result<OracleValue> {
    Ok(VibronicKernel::new(sd, t_v, cfg)?.prf(eta, ob, cfg))
}

/// Excitation and decay rates of the full bath.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct OracleRates {
    pub gamma_up: f64,
    pub gamma_down: f64,
    pub up: Channels,
    pub down: Channels,
    pub delta_prime: f64,
    pub delta_weight: f64,
    pub converged: bool,
}

pub fn oracle_rates(
    delta_prime: f64,
    sd: &SpectralDensity,
    ob: &OpticalBath,
    t_v: f64,
    cfg: &QuadConfig,
) -> Result<OracleRates> {
    let kernel = VibronicKernel::new(sd, t_v, cfg)?;
    let up = kernel.prf(-delta_prime, ob, cfg);
    let down = kernel.prf(delta_prime, ob, cfg);
    Ok(OracleRates {
        gamma_up: up.value,
        gamma_down: down.value,
        up: up.channels,
        down: down.channels,
        delta_prime,
        delta_weight: kernel.delta_weight(),
        converged: up.converged && down.converged,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::moment_matching::{truncate, Expansion};
    use crate::prf::{rates_for_bath, weak_limit_rates, PrfConfig};
    use crate::spectral_density::Mode;

    fn rel(a: f64, b: f64) -> f64 {
        (a - b).abs() / b.abs()
    }

    #[test]
    fn propagator_at_origin() {
        let sd = SpectralDensity::cubic_exponential(1.7, 0.05).unwrap();
        let p = phonon_propagator(&sd, 0.0, 0.0).unwrap();
        assert!((p.re - 1.7).abs() < 1e-15);
        assert_eq!(p.im, 0.0);
        for t_v in [300.0, 3000.0] {
            let p = phonon_propagator(&sd, t_v, 0.0).unwrap();
            assert!(p.im.abs() < 1e-15);
            let q = propagator_by_quadrature(&sd, t_v, 0.0, &QuadConfig::default()).unwrap();
            assert!(rel(p.re, q.re) < 1e-10, "{t_v}: {} vs {}", p.re, q.re);
        }
    }

    #[test]
    fn single_discrete_mode() {
        let sd = SpectralDensity::discrete(vec![Mode::new(0.8, 0.1)]).unwrap();
        for t in [0.0, 3.0, 17.5] {
            let p = phonon_propagator(&sd, 0.0, t).unwrap();
            let expected = 0.8 * Complex64::from_polar(1.0, -0.1 * t);
            assert!((p - expected).norm() < 1e-15);
        }
    }

    #[test]
    fn cubic_closed_form_matches_quadrature() {
        let omega_c = 0.2;
        let sd = SpectralDensity::cubic_exponential(1.0, omega_c).unwrap();
        let cfg = QuadConfig::default();
        for t_v in [0.0, 500.0, 2500.0] {
            for k in 0..=40 {
                let t = 100.0 / omega_c * k as f64 / 40.0;
                let a = phonon_propagator(&sd, t_v, t).unwrap();
                let b = propagator_by_quadrature(&sd, t_v, t, &cfg).unwrap();
                assert!((a - b).norm() / a.norm() < 1e-9, "T_V={t_v} t={t}: {a} vs {b}");
            }
        }
    }

    #[test]
    fn samples_are_hermitian() {
        let sd = SpectralDensity::cubic_exponential(1.0, 0.1).unwrap();
        let s = propagator_samples(&sd, 1000.0, 0.7, 200).unwrap();
        assert!(s.hermiticity_defect() < 1e-12);
        let sd = SpectralDensity::log_normal_ohmic(0.01, 0.2).unwrap();
        let s = propagator_samples(&sd, 300.0, 1.3, 20).unwrap();
        assert!(s.hermiticity_defect() < 1e-12);
        assert_eq!(s.phi[20].im, 0.0);
    }

    #[test]
    fn ohmic_and_discrete_are_rejected() {
        let cfg = QuadConfig::default();
        let ohmic = SpectralDensity::gaussian_ohmic(0.01, 0.2).unwrap();
        assert!(matches!(VibronicKernel::new(&ohmic, 0.0, &cfg), Err(Error::DivergentMoment { .. })));
        let discrete = SpectralDensity::discrete(vec![Mode::new(1.0, 0.1)]).unwrap();
        assert!(matches!(
            k_function(&discrete, 0.0, 0.1, &cfg),
            Err(Error::NonDecayingPropagator(_))
        ));
    }

    #[test]
    fn kernel_normalisation() {
        let cfg = QuadConfig::default();
        let cases = [
            (SpectralDensity::cubic_exponential(1.0, 0.2).unwrap(), 0.0),
            (SpectralDensity::cubic_exponential(30.0, 0.01).unwrap(), 0.0),
            (SpectralDensity::cubic_exponential(1.0, 0.2).unwrap(), 1500.0),
            (SpectralDensity::log_normal_ohmic(0.05, 0.1).unwrap(), 0.0),
            (SpectralDensity::log_normal_ohmic(0.05, 0.1).unwrap(), 1000.0),
        ];
        for (sd, t_v) in cases {
            let k = VibronicKernel::new(&sd, t_v, &cfg).unwrap();
            let total = k.delta_weight() + k.smooth_mass(&cfg);
            assert!((total - 1.0).abs() < 1e-6, "{sd:?} T_V={t_v}: {total}");
        }
    }

    #[test]
    fn grid_kernel_matches_cubic_series() {
        // force the FFT path at T_V = 0 through a tabulated copy
        let (s, omega_c) = (1.5, 0.1);
        let cubic = SpectralDensity::cubic_exponential(s, omega_c).unwrap();
        let mut omega: Vec<f64> = (0..=700).map(|k| 1e-6 * 1.02_f64.powi(k)).take_while(|&w| w < 0.01).collect();
        omega.extend((0..=12_000).map(|k| 0.01 + k as f64 * 6.0 / 12_000.0));
        let values = omega.iter().map(|&w| cubic.evaluate(w).unwrap()).collect();
        let tab = SpectralDensity::tabulated(omega, values).unwrap();
        let cfg = QuadConfig::default();
        let exact = VibronicKernel::new(&cubic, 0.0, &cfg).unwrap();
        let grid = VibronicKernel::new(&tab, 0.0, &cfg).unwrap();
        assert!(rel(grid.phi0(), tab.moment(0).unwrap()) < 1e-9);
        // the remaining difference is the tabulation error of J itself
        assert!(rel(grid.delta_weight(), exact.delta_weight()) < 1e-4);
        let peak = (0..200).map(|k| exact.smooth(k as f64 * 0.01)).fold(0.0, f64::max);
        for k in 1..200 {
            let e = k as f64 * 0.01;
            assert!((grid.smooth(e) - exact.smooth(e)).abs() < 1e-5 * peak, "eps={e}");
        }
    }

    #[test]
    fn time_domain_kernel_agrees() {
        let cfg = QuadConfig::default();
        for (sd, t_v) in [
            (SpectralDensity::cubic_exponential(1.0, 0.2).unwrap(), 0.0),
            (SpectralDensity::cubic_exponential(0.5, 0.1).unwrap(), 1200.0),
        ] {
            let kernel = VibronicKernel::new(&sd, t_v, &cfg).unwrap();
            let peak = (1..100).map(|k| kernel.smooth(k as f64 * 0.02)).fold(0.0, f64::max);
            for eps in [-0.05, 0.1, 0.3, 0.6, 1.2] {
                let kv = k_function(&sd, t_v, eps, &cfg).unwrap();
                assert!(kv.converged);
                assert!(kv.tail_certificate < cfg.tail_tol);
                assert!(rel(kv.delta_weight, kernel.delta_weight()) < 1e-12);
                let diff = (kv.smooth - kernel.smooth(eps)).abs();
                assert!(diff < 1e-5 * peak, "T_V={t_v} eps={eps}: {} vs {}", kv.smooth, kernel.smooth(eps));
            }
        }
    }

    #[test]
    fn weak_coupling_limit() {
        let cfg = QuadConfig::default();
        let ob = OpticalBath::cubic(1.0, 6000.0).unwrap();
        let sd = SpectralDensity::cubic_exponential(1e-8, 0.05).unwrap();
        let r = oracle_rates(1.0, &sd, &ob, 0.0, &cfg).unwrap();
        let w = weak_limit_rates(1.0, &ob).unwrap();
        assert!(rel(r.gamma_up, w.gamma_up) < 1e-6);
        assert!(rel(r.gamma_down, w.gamma_down) < 1e-6);
    }

    #[test]
    fn flat_limit() {
        let cfg = QuadConfig::default();
        let ob = OpticalBath::flat(0.4, 6000.0).unwrap();
        let w = weak_limit_rates(1.0, &ob).unwrap();
        for (sd, t_v) in [
            (SpectralDensity::cubic_exponential(3.0, 0.05).unwrap(), 0.0),
            (SpectralDensity::cubic_exponential(0.3, 0.2).unwrap(), 2000.0),
        ] {
            let r = oracle_rates(1.0, &sd, &ob, t_v, &cfg).unwrap();
            assert!(rel(r.gamma_up, w.gamma_up) < 1e-6);
            assert!(rel(r.gamma_down, w.gamma_down) < 1e-6);
        }
    }

    #[test]
    fn truncation_agrees_at_three_modes() {
        let cfg = QuadConfig::default();
        let ob = OpticalBath::cubic(1.0, 6000.0).unwrap();
        let sd = SpectralDensity::cubic_exponential(0.02, 0.01).unwrap();
        let r = oracle_rates(1.0, &sd, &ob, 0.0, &cfg).unwrap();
        let bath = truncate(&sd, 3, Expansion::ZeroT).unwrap();
        let t = rates_for_bath(1.0, &bath, &ob, 0.0, &PrfConfig::default()).unwrap();
        assert!(rel(t.gamma_up, r.gamma_up) < 1e-3);
        assert!(rel(t.gamma_down, r.gamma_down) < 1e-3);
    }

    #[test]
    fn broadened_discrete_mode_matches_series() {
        // a narrow Gaussian line of total Huang-Rhys factor S at w0
        let (s, w0, width) = (1.0, 0.1, 0.001);
        let omega: Vec<f64> = (0..=4000).map(|k| w0 - 8.0 * width + k as f64 * 16.0 * width / 4000.0).collect();
        let values = omega
            .iter()
            .map(|&w| {
                let z = (w - w0) / width;
                s * w * w * (-0.5 * z * z).exp() / (width * (2.0 * PI).sqrt())
            })
            .collect();
        let tab = SpectralDensity::tabulated(omega, values).unwrap();
        let ob = OpticalBath::cubic(1.0, 6000.0).unwrap();
        let cfg = QuadConfig::default();
        let r = oracle_rates(1.0, &tab, &ob, 0.0, &cfg).unwrap();
        let bath = crate::moment_matching::TruncatedBath::from_modes(vec![Mode::new(s, w0)]).unwrap();
        let t = rates_for_bath(1.0, &bath, &ob, 0.0, &PrfConfig::default()).unwrap();
        assert!(rel(r.gamma_down, t.gamma_down) < 1e-3, "{} vs {}", r.gamma_down, t.gamma_down);
        assert!(rel(r.gamma_up, t.gamma_up) < 1e-3, "{} vs {}", r.gamma_up, t.gamma_up);
    }
}
