//! Vibrational and optical spectral densities and their scalar functionals.
//!
//! The vibrational density `J_V(w)` enters the rates only through its
//! weighted moments `mu_j = int J_V(w) w^(j-2) dw`. Closed forms are used for
//! the analytic families; tabulated densities are integrated exactly segment
//! by segment under linear interpolation.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::quadrature::{integrate, kronrod21, QuadTolerance};
use crate::special::{factorial, gamma_half_integer};
use crate::units::bose;

/// A tabulated density is rejected as divergent when the integrand at the end
/// of its grid, times the grid end, exceeds this fraction of the accumulated
/// moment.
pub const TABULATED_TAIL_TOL: f64 = 1e-12;

/// A single harmonic mode with Huang-Rhys parameter `s` and energy `omega`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Mode {
    #[serde(rename = "S")]
    pub s: f64,
    pub omega: f64,
}

impl Mode {
    pub fn new(s: f64, omega: f64) -> Self {
        Self { s, omega }
    }
}

/// Piecewise-linear samples, zero outside the sampled range.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Tabulated {
    #[serde(alias = "nu")]
    pub omega: Vec<f64>,
    #[serde(rename = "J")]
    pub values: Vec<f64>,
}

impl Tabulated {
    pub fn new(omega: Vec<f64>, values: Vec<f64>) -> Result<Self> {
        let t = Self { omega, values };
        t.validate()?;
        Ok(t)
    }

    fn validate(&self) -> Result<()> {
        if self.omega.len() != self.values.len() {
            return Err(Error::InvalidParameter(format!(
                "tabulated grid has {} abscissae but {} values",
                self.omega.len(),
                self.values.len()
            )));
        }
        if self.omega.len() < 2 {
            return Err(Error::InvalidParameter(
                "tabulated grid needs at least two samples".into(),
            ));
        }
        if self.omega[0] < 0.0 || !self.omega.iter().all(|w| w.is_finite()) {
            return Err(Error::InvalidParameter(
                "tabulated abscissae must be finite and non-negative".into(),
            ));
        }
        if self.omega.windows(2).any(|w| w[1] <= w[0]) {
            return Err(Error::InvalidParameter(
                "tabulated abscissae must be strictly increasing".into(),
            ));
        }
        if self.values.iter().any(|v| !(v.is_finite() && *v >= 0.0)) {
            return Err(Error::InvalidParameter(
                "tabulated values must be finite and non-negative".into(),
            ));
        }
        Ok(())
    }

    pub fn eval(&self, x: f64) -> f64 {
        let n = self.omega.len();
        if x <= 0.0 || x < self.omega[0] || x > self.omega[n - 1] {
            return 0.0;
        }
        let i = self.omega.partition_point(|&w| w <= x);
        if i == 0 {
            return self.values[0];
        }
        if i == n {
            return self.values[n - 1];
        }
        let (x0, x1) = (self.omega[i - 1], self.omega[i]);
        let t = (x - x0) / (x1 - x0);
        self.values[i - 1] + t * (self.values[i] - self.values[i - 1])
    }

    /// `int f(x) x^p dx` over the grid with `f` linearly interpolated.
    fn power_moment(&self, p: i32) -> Result<f64> {
        let order = p + 2;
        let mut total = 0.0;
        for k in 0..self.omega.len() - 1 {
            let (x0, x1) = (self.omega[k], self.omega[k + 1]);
            let (y0, y1) = (self.values[k], self.values[k + 1]);
            if y0 == 0.0 && y1 == 0.0 {
                continue;
            }
            let slope = (y1 - y0) / (x1 - x0);
            let part = if (0..=29).contains(&p) {
                // polynomial of degree <= 30: the Kronrod rule is exact
                kronrod21(&|x: f64| (y0 + slope * (x - x0)) * x.powi(p), x0, x1).0
            } else if x0 == 0.0 {
                // (y0 + slope x) x^p near zero: finite only if the leading power is integrable
                let leading = if y0 > 0.0 { p } else { p + 1 };
                if leading <= -1 {
                    return Err(Error::DivergentMoment {
                        order,
                        reason: "tabulated density does not vanish fast enough at zero".into(),
                    });
                }
                integrate(
                    |x: f64| (y0 + slope * (x - x0)) * x.powi(p),
                    x0,
                    x1,
                    QuadTolerance::relative(1e-13),
                )
                .value
            } else {
                integrate(
                    |x: f64| (y0 + slope * (x - x0)) * x.powi(p),
                    x0,
                    x1,
                    QuadTolerance::relative(1e-13),
                )
                .value
            };
            total += part;
        }
        let last = self.omega.len() - 1;
        let end = self.omega[last];
        let tail = self.values[last] * end.powi(p) * end;
        if !(total > 0.0) {
            return Err(Error::DivergentMoment {
                order,
                reason: "tabulated density has no weight".into(),
            });
        }
        if tail > TABULATED_TAIL_TOL * total {
            return Err(Error::DivergentMoment {
                order,
                reason: format!(
                    "tabulated density has not decayed at the end of its grid (tail/accumulated = {:.3e})",
                    tail / total
                ),
            });
        }
        Ok(total)
    }

    fn support_end(&self) -> f64 {
        *self.omega.last().unwrap()
    }
}

/// Continuum or discrete vibrational spectral density `J_V(w)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "family", rename_all = "snake_case")]
pub enum SpectralDensity {
    /// `S w^3 / w_c^2 exp(-w/w_c)`
    #[serde(alias = "cubic")]
    CubicExponential {
        #[serde(rename = "S")]
        s: f64,
        omega_c: f64,
    },
    /// `lambda 2/(sqrt(pi) w_c) w exp(-(w/w_c)^2)`
    #[serde(alias = "gaussian")]
    GaussianOhmic { lambda: f64, omega_c: f64 },
    /// `lambda exp(-1/4)/(sqrt(pi) w_c) w exp(-ln^2(w/w_c))`
    #[serde(alias = "log_normal", alias = "lognormal")]
    LogNormalOhmic { lambda: f64, omega_c: f64 },
    /// Sum of delta functions `sum_i S_i w_i^2 delta(w - w_i)`.
    #[serde(alias = "discrete")]
    DiscreteModes { modes: Vec<Mode> },
    Tabulated(Tabulated),
}

impl SpectralDensity {
    pub fn cubic_exponential(s: f64, omega_c: f64) -> Result<Self> {
        let sd = Self::CubicExponential { s, omega_c };
        sd.validate()?;
        Ok(sd)
    }

    pub fn gaussian_ohmic(lambda: f64, omega_c: f64) -> Result<Self> {
        let sd = Self::GaussianOhmic { lambda, omega_c };
        sd.validate()?;
        Ok(sd)
    }

    pub fn log_normal_ohmic(lambda: f64, omega_c: f64) -> Result<Self> {
        let sd = Self::LogNormalOhmic { lambda, omega_c };
        sd.validate()?;
        Ok(sd)
    }

    pub fn discrete(modes: Vec<Mode>) -> Result<Self> {
        let sd = Self::DiscreteModes { modes };
        sd.validate()?;
        Ok(sd)
    }

    pub fn tabulated(omega: Vec<f64>, values: Vec<f64>) -> Result<Self> {
        Ok(Self::Tabulated(Tabulated::new(omega, values)?))
    }

    pub fn validate(&self) -> Result<()> {
        let positive = |name: &str, v: f64| {
            if v.is_finite() && v > 0.0 {
                Ok(())
            } else {
                Err(Error::InvalidParameter(format!(
                    "{name} must be positive, got {v}"
                )))
            }
        };
        let non_negative = |name: &str, v: f64| {
            if v.is_finite() && v >= 0.0 {
                Ok(())
            } else {
                Err(Error::InvalidParameter(format!(
                    "{name} must be non-negative, got {v}"
                )))
            }
        };
        match self {
            Self::CubicExponential { s, omega_c } => {
                non_negative("S", *s)?;
                positive("omega_c", *omega_c)
            }
            Self::GaussianOhmic { lambda, omega_c } | Self::LogNormalOhmic { lambda, omega_c } => {
                non_negative("lambda", *lambda)?;
                positive("omega_c", *omega_c)
            }
            Self::DiscreteModes { modes } => {
                for m in modes {
                    non_negative("mode S", m.s)?;
                    positive("mode omega", m.omega)?;
                }
                Ok(())
            }
            Self::Tabulated(t) => t.validate(),
        }
    }

    /// Pointwise value `J_V(w)`; zero for `w <= 0`.
    pub fn evaluate(&self, omega: f64) -> Result<f64> {
        if let Self::DiscreteModes { .. } = self {
            return Err(Error::NotPointwise);
        }
        if omega <= 0.0 {
            return Ok(0.0);
        }
        Ok(match self {
            Self::CubicExponential { s, omega_c } => {
                s * omega.powi(3) / (omega_c * omega_c) * (-omega / omega_c).exp()
            }
            Self::GaussianOhmic { lambda, omega_c } => {
                let x = omega / omega_c;
                lambda * 2.0 / (PI.sqrt() * omega_c) * omega * (-x * x).exp()
            }
            Self::LogNormalOhmic { lambda, omega_c } => {
                let l = (omega / omega_c).ln();
                lambda * (-0.25_f64).exp() / (PI.sqrt() * omega_c) * omega * (-l * l).exp()
            }
            Self::Tabulated(t) => t.eval(omega),
            Self::DiscreteModes { .. } => unreachable!(),
        })
    }

    /// Weighted moment `mu_j = int J_V(w) w^(j-2) dw`, `j >= 1`.
    pub fn weighted_moment(&self, j: u32) -> Result<f64> {
        if j == 0 {
            return Err(Error::InvalidParameter(
                "weighted moments are defined for j >= 1".into(),
            ));
        }
        self.moment(j as i32)
    }

    /// `mu_j` for any integer order; `j <= 0` is used by the propagator
    /// (`mu_0` is the bath Huang-Rhys parameter).
    pub(crate) fn moment(&self, j: i32) -> Result<f64> {
        match self {
            Self::CubicExponential { s, omega_c } => {
                if j < -1 {
                    return Err(Error::DivergentMoment {
                        order: j,
                        reason: "cubic density: w^(j+1) not integrable at zero".into(),
                    });
                }
                Ok(s * omega_c.powi(j) * factorial((j + 1) as u32))
            }
            Self::GaussianOhmic { lambda, omega_c } => {
                if j < 1 {
                    return Err(Error::DivergentMoment {
                        order: j,
                        reason: "ohmic density: w^(j-1) not integrable at zero".into(),
                    });
                }
                Ok(lambda * omega_c.powi(j - 1) * gamma_half_integer(j as u32) / PI.sqrt())
            }
            Self::LogNormalOhmic { lambda, omega_c } => {
                let jf = j as f64;
                Ok(lambda * omega_c.powi(j - 1) * ((jf * jf - 1.0) / 4.0).exp())
            }
            Self::DiscreteModes { modes } => Ok(modes.iter().map(|m| m.s * m.omega.powi(j)).sum()),
            Self::Tabulated(t) => t.power_moment(j - 2),
        }
    }

    /// `lambda = mu_1 = int J_V(w)/w dw`.
    pub fn reorganisation_energy(&self) -> Result<f64> {
        self.weighted_moment(1)
    }

    /// `A_V = mu_2 = int J_V(w) dw`.
    pub fn spectral_area(&self) -> Result<f64> {
        self.weighted_moment(2)
    }

    pub fn is_discrete(&self) -> bool {
        matches!(self, Self::DiscreteModes { .. })
    }

    /// Characteristic frequency beyond which `J_V` is negligible
    /// (below ~1e-16 of its peak for the analytic families).
    pub fn support_bound(&self) -> f64 {
        match self {
            Self::CubicExponential { omega_c, .. } => 60.0 * omega_c,
            Self::GaussianOhmic { omega_c, .. } => 7.0 * omega_c,
            Self::LogNormalOhmic { omega_c, .. } => (7.0_f64).exp() * omega_c,
            Self::DiscreteModes { modes } => modes.iter().map(|m| m.omega).fold(0.0, f64::max),
            Self::Tabulated(t) => t.support_end(),
        }
    }

    /// Natural frequency scale `A_V / lambda`, used to size integration panels.
    pub fn frequency_scale(&self) -> f64 {
        match (self.moment(1), self.moment(2)) {
            (Ok(l), Ok(a)) if l > 0.0 => a / l,
            _ => self.support_bound() / 10.0,
        }
    }

    /// Lower edge of the support; zero for the analytic families.
    pub(crate) fn support_start(&self) -> f64 {
        match self {
            Self::Tabulated(t) => t.omega[0],
            Self::DiscreteModes { modes } => modes.iter().map(|m| m.omega).fold(f64::INFINITY, f64::min),
            _ => 0.0,
        }
    }
}

/// Photon spectral density `J_O(nu)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "family", rename_all = "snake_case")]
pub enum OpticalDensity {
    /// `kappa nu^3`
    Cubic { kappa: f64 },
    /// Constant `value`. Treated as locally flat about the zero-phonon
    /// energy: every vibronic sideband sees the emission and absorption
    /// densities at the bare polaron energy.
    Flat { value: f64 },
    Tabulated(Tabulated),
}

/// Optical bath: photon spectral density at temperature `T_O`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OpticalBath {
    #[serde(flatten)]
    pub density: OpticalDensity,
    #[serde(rename = "T_O")]
    pub temperature: f64,
}

impl OpticalBath {
    pub fn new(density: OpticalDensity, temperature: f64) -> Result<Self> {
        let ob = Self {
            density,
            temperature,
        };
        ob.validate()?;
        Ok(ob)
    }

    pub fn cubic(kappa: f64, temperature: f64) -> Result<Self> {
        Self::new(OpticalDensity::Cubic { kappa }, temperature)
    }

    pub fn flat(value: f64, temperature: f64) -> Result<Self> {
        Self::new(OpticalDensity::Flat { value }, temperature)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.temperature.is_finite() && self.temperature >= 0.0) {
            return Err(Error::InvalidParameter(format!(
                "T_O must be non-negative, got {}",
                self.temperature
            )));
        }
        match &self.density {
            OpticalDensity::Cubic { kappa: v } | OpticalDensity::Flat { value: v } => {
                if !(v.is_finite() && *v >= 0.0) {
                    return Err(Error::InvalidParameter(format!(
                        "optical density prefactor must be non-negative, got {v}"
                    )));
                }
                Ok(())
            }
            OpticalDensity::Tabulated(t) => t.validate(),
        }
    }

    /// `J_O(nu)`, identically zero for `nu <= 0`.
    pub fn j_o(&self, nu: f64) -> f64 {
        if nu <= 0.0 {
            return 0.0;
        }
        match &self.density {
            OpticalDensity::Cubic { kappa } => kappa * nu * nu * nu,
            OpticalDensity::Flat { value } => *value,
            OpticalDensity::Tabulated(t) => t.eval(nu),
        }
    }

    pub fn occupation(&self, nu: f64) -> f64 {
        bose(nu, self.temperature)
    }

    /// `J_E(nu) = 2 pi J_O(nu) [1 + N_O(nu)]`.
    pub fn emission_density(&self, nu: f64) -> f64 {
        if nu <= 0.0 {
            return 0.0;
        }
        2.0 * PI * self.j_o(nu) * (1.0 + self.occupation(nu))
    }

    /// `J_A(nu) = 2 pi J_O(nu) N_O(nu)`.
    pub fn absorption_density(&self, nu: f64) -> f64 {
        if nu <= 0.0 {
            return 0.0;
        }
        2.0 * PI * self.j_o(nu) * self.occupation(nu)
    }

    pub fn is_flat(&self) -> bool {
        matches!(self.density, OpticalDensity::Flat { .. })
    }

    /// Optical response for a vibronic transition carrying net vibrational
    /// energy `offset` when evaluated at `eta`: returns
    /// `(J_E(eta - offset), J_A(offset - eta))`.
    pub fn sideband_response(&self, eta: f64, offset: f64) -> (f64, f64) {
        if self.is_flat() {
            (self.emission_density(eta), self.absorption_density(-eta))
        } else {
            (
                self.emission_density(eta - offset),
                self.absorption_density(offset - eta),
            )
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::quadrature::integrate_semi_infinite;
    use crate::units::K_B;

    fn brute_force_moment(sd: &SpectralDensity, j: i32) -> f64 {
        let scale = sd.frequency_scale();
        let (r, ok) = integrate_semi_infinite(
            |w: f64| sd.evaluate(w).unwrap() * w.powi(j - 2),
            0.0,
            scale,
            QuadTolerance::relative(1e-13),
            1e-16,
            1e8 * scale,
        );
        assert!(ok, "{sd:?} j={j}");
        r.value
    }

    fn families() -> Vec<SpectralDensity> {
        vec![
            SpectralDensity::cubic_exponential(1.0, 0.2).unwrap(),
            SpectralDensity::cubic_exponential(0.3, 0.01).unwrap(),
            SpectralDensity::gaussian_ohmic(0.01, 0.2).unwrap(),
            SpectralDensity::log_normal_ohmic(0.01, 0.2).unwrap(),
        ]
    }

    #[test]
    fn cubic_value_at_cutoff() {
        let sd = SpectralDensity::cubic_exponential(1.0, 0.2).unwrap();
        let expected = 0.2 * (-1.0_f64).exp();
        assert!((sd.evaluate(0.2).unwrap() - expected).abs() < 1e-15);
        assert!((sd.evaluate(0.2).unwrap() - 0.073_575_9).abs() < 1e-7);
    }

    #[test]
    fn negative_frequency_is_zero() {
        for sd in families() {
            assert_eq!(sd.evaluate(-0.1).unwrap(), 0.0);
        }
        let t = SpectralDensity::tabulated(vec![0.0, 1.0], vec![0.0, 1.0]).unwrap();
        assert_eq!(t.evaluate(-0.1).unwrap(), 0.0);
        assert_eq!(t.evaluate(1.5).unwrap(), 0.0);
        assert!((t.evaluate(0.25).unwrap() - 0.25).abs() < 1e-15);
    }

    #[test]
    fn discrete_has_no_pointwise_value() {
        let sd = SpectralDensity::discrete(vec![Mode::new(1.0, 0.1)]).unwrap();
        assert_eq!(sd.evaluate(0.1), Err(Error::NotPointwise));
        assert_eq!(
            Error::NotPointwise.to_string(),
            "discrete density has no pointwise value"
        );
    }

    #[test]
    fn closed_form_moments() {
        let sd = SpectralDensity::cubic_exponential(1.0, 0.2).unwrap();
        assert!((sd.weighted_moment(1).unwrap() - 0.4).abs() < 1e-15);
        assert!((sd.reorganisation_energy().unwrap() - 0.4).abs() < 1e-15);
        assert!((sd.spectral_area().unwrap() - 0.24).abs() < 1e-15);

        let d = SpectralDensity::discrete(vec![Mode::new(2.0, 0.1)]).unwrap();
        assert!((d.weighted_moment(3).unwrap() - 0.002).abs() < 1e-17);

        let g = SpectralDensity::gaussian_ohmic(0.01, 0.2).unwrap();
        assert!((g.reorganisation_energy().unwrap() - 0.01).abs() < 1e-17);

        let (s, w) = (0.7, 0.13);
        let p = SpectralDensity::discrete(vec![Mode::new(s, w)]).unwrap();
        assert!((p.reorganisation_energy().unwrap() - s * w).abs() < 1e-16);
        assert!((p.spectral_area().unwrap() - s * w * w).abs() < 1e-16);
    }

    #[test]
    fn moments_agree_with_quadrature() {
        for sd in families() {
            for j in 1..=8 {
                let closed = sd.weighted_moment(j).unwrap();
                let brute = brute_force_moment(&sd, j as i32);
                assert!(
                    ((closed - brute) / brute).abs() < 1e-9,
                    "{sd:?} j={j}: {closed} vs {brute}"
                );
                assert!(closed > 0.0);
            }
        }
    }

    #[test]
    fn tabulated_moments_match_sampled_family() {
        let sd = SpectralDensity::cubic_exponential(1.0, 0.2).unwrap();
        let n = 20_001;
        let omega: Vec<f64> = (0..n).map(|i| 14.0 * i as f64 / (n - 1) as f64).collect();
        let values: Vec<f64> = omega.iter().map(|&w| sd.evaluate(w).unwrap()).collect();
        let tab = SpectralDensity::tabulated(omega, values).unwrap();
        for j in 1..=4 {
            let a = tab.weighted_moment(j).unwrap();
            let b = sd.weighted_moment(j).unwrap();
            assert!(((a - b) / b).abs() < 1e-5, "j={j}: {a} vs {b}");
        }
    }

    #[test]
    fn drude_lorentz_tail_is_divergent() {
        // J = 2 lambda gamma w / (w^2 + gamma^2), sampled to 100 gamma
        let (lambda, gamma) = (0.05, 0.01);
        let omega: Vec<f64> = (0..=2000).map(|i| i as f64 * 0.0005).collect();
        let values: Vec<f64> = omega
            .iter()
            .map(|&w| 2.0 * lambda * gamma * w / (w * w + gamma * gamma))
            .collect();
        let sd = SpectralDensity::tabulated(omega, values).unwrap();
        assert!(matches!(
            sd.weighted_moment(2),
            Err(Error::DivergentMoment { .. })
        ));
        assert!(matches!(
            sd.reorganisation_energy(),
            Err(Error::DivergentMoment { .. })
        ));
    }

    #[test]
    fn invalid_parameters_rejected() {
        assert!(SpectralDensity::cubic_exponential(-1.0, 0.2).is_err());
        assert!(SpectralDensity::gaussian_ohmic(0.1, 0.0).is_err());
        assert!(SpectralDensity::discrete(vec![Mode::new(1.0, -0.1)]).is_err());
        assert!(SpectralDensity::tabulated(vec![0.0, 0.0], vec![1.0, 1.0]).is_err());
        assert!(SpectralDensity::cubic_exponential(1.0, 0.2)
            .unwrap()
            .weighted_moment(0)
            .is_err());
    }

    #[test]
    fn optical_densities() {
        let ob = OpticalBath::cubic(1.0, 0.0).unwrap();
        assert_eq!(ob.absorption_density(0.7), 0.0);
        assert!((ob.emission_density(0.7) - 2.0 * PI * 0.343).abs() < 1e-14);
        assert_eq!(ob.emission_density(-0.5), 0.0);
        assert_eq!(ob.absorption_density(-0.5), 0.0);

        let hot = OpticalBath::cubic(1.0, 6000.0).unwrap();
        // independent Bose function
        let n = 1.0 / ((1.0 / (K_B * 6000.0)).exp() - 1.0);
        assert!((hot.absorption_density(1.0) - 2.0 * PI * n).abs() < 1e-13);
        assert!((hot.absorption_density(1.0) - 1.061_758).abs() < 1e-6);
        assert_eq!(hot.emission_density(-0.5), 0.0);
    }

    #[test]
    fn optical_detailed_balance() {
        let ob = OpticalBath::cubic(2.5, 4000.0).unwrap();
        for i in 1..200 {
            let nu = 0.01 * i as f64;
            let e = ob.emission_density(nu);
            let a = ob.absorption_density(nu);
            assert!(((e - a) - 2.0 * PI * ob.j_o(nu)).abs() < 1e-12 * e);
            let ratio = (nu / (K_B * 4000.0)).exp();
            assert!((e / a - ratio).abs() < 1e-10 * ratio);
        }
    }

    #[test]
    fn config_round_trip() {
        let sd: SpectralDensity =
            serde_json::from_str(r#"{"family":"cubic_exponential","S":1.0,"omega_c":0.2}"#).unwrap();
        assert_eq!(sd, SpectralDensity::cubic_exponential(1.0, 0.2).unwrap());
        let g: SpectralDensity =
            serde_json::from_str(r#"{"family":"gaussian","lambda":0.01,"omega_c":0.2}"#).unwrap();
        assert!(matches!(g, SpectralDensity::GaussianOhmic { .. }));
        let d: SpectralDensity =
            serde_json::from_str(r#"{"family":"discrete","modes":[{"S":1.0,"omega":0.1}]}"#).unwrap();
        assert!(d.is_discrete());
        let ob: OpticalBath =
            serde_json::from_str(r#"{"family":"cubic","kappa":1.0,"T_O":6000.0}"#).unwrap();
        assert_eq!(ob, OpticalBath::cubic(1.0, 6000.0).unwrap());
    }
}
