//! Run configuration: a TOML or JSON file, overridden field by field by flags.

use std::path::{Path, PathBuf};

use clap::ValueEnum;
use polaron_core::{
    AmplitudeConfig, Expansion, Mode, OpticalBath, PrfConfig, QuadConfig, SpectralDensity, Splitting,
};
use serde::{Deserialize, Serialize};

use crate::error::{config_err, CliError};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, ValueEnum)]
#[serde(rename_all = "snake_case")]
pub enum Family {
    #[serde(alias = "cubic")]
    #[value(alias = "cubic", alias = "cubic_exponential")]
    CubicExponential,
    #[serde(alias = "gaussian")]
    #[value(alias = "gaussian", alias = "gaussian_ohmic")]
    GaussianOhmic,
    #[serde(alias = "log_normal", alias = "lognormal")]
    #[value(alias = "log_normal", alias = "lognormal", alias = "log_normal_ohmic")]
    LogNormalOhmic,
    Discrete,
    Tabulated,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, ValueEnum)]
#[serde(rename_all = "snake_case")]
pub enum OpticalFamily {
    Cubic,
    Flat,
}

/// Rate engine. The truncation engines evaluate one row per requested `N*`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, ValueEnum)]
#[serde(rename_all = "snake_case")]
pub enum Engine {
    #[value(alias = "zero_t")]
    ZeroT,
    #[value(alias = "infinite_t")]
    InfiniteT,
    Oracle,
    Weak,
    Flat,
}

impl Engine {
    pub fn label(self) -> &'static str {
        match self {
            Self::ZeroT => "zero_t",
            Self::InfiniteT => "infinite_t",
            Self::Oracle => "oracle",
            Self::Weak => "weak",
            Self::Flat => "flat",
        }
    }

    pub fn expansion(self) -> Option<Expansion> {
        match self {
            Self::ZeroT => Some(Expansion::ZeroT),
            Self::InfiniteT => Some(Expansion::InfiniteT),
            _ => None,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, ValueEnum)]
pub enum SweepParameter {
    #[serde(rename = "S")]
    #[value(name = "S", alias = "s")]
    S,
    #[serde(rename = "omega_c")]
    #[value(name = "omega_c")]
    OmegaC,
    #[serde(rename = "T_V")]
    #[value(name = "T_V", alias = "t_v")]
    TV,
    #[serde(rename = "lambda")]
    #[value(name = "lambda")]
    Lambda,
}

impl SweepParameter {
    pub fn column(self) -> &'static str {
        match self {
            Self::S => "S",
            Self::OmegaC => "omega_c",
            Self::TV => "T_V",
            Self::Lambda => "lambda",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize, ValueEnum)]
#[serde(rename_all = "snake_case")]
pub enum Scale {
    #[default]
    Linear,
    Log,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct VibrationalConfig {
    pub family: Option<Family>,
    #[serde(rename = "S")]
    pub s: Option<f64>,
    pub lambda: Option<f64>,
    pub omega_c: Option<f64>,
    pub modes: Option<Vec<Mode>>,
    /// CSV file with columns `omega,J`.
    pub table: Option<PathBuf>,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OpticalConfig {
    pub family: Option<OpticalFamily>,
    pub kappa: Option<f64>,
    pub value: Option<f64>,
    #[serde(rename = "T_O")]
    pub t_o: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepConfig {
    pub parameter: Option<SweepParameter>,
    pub start: Option<f64>,
    pub stop: Option<f64>,
    pub count: Option<usize>,
    #[serde(default)]
    pub scale: Option<Scale>,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DynamicsConfig {
    pub rho0: Option<f64>,
    pub t_stop: Option<f64>,
    pub samples: Option<usize>,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    #[serde(default)]
    pub vibrational: VibrationalConfig,
    #[serde(default)]
    pub optical: OpticalConfig,
    pub delta_prime: Option<f64>,
    pub delta: Option<f64>,
    #[serde(rename = "T_V")]
    pub t_v: Option<f64>,
    pub nstar: Option<Vec<usize>>,
    pub engines: Option<Vec<Engine>>,
    pub amplitude_tol: Option<f64>,
    pub n_max_cap: Option<usize>,
    pub sweep: Option<SweepConfig>,
    pub dynamics: Option<DynamicsConfig>,
}

impl RunConfig {
    /// Parse a `.toml` or `.json` file (decided by extension, TOML otherwise).
    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::Io(format!("cannot read {}: {e}", path.display())))?;
        let mut cfg: RunConfig = if path.extension().is_some_and(|e| e == "json") {
            serde_json::from_str(&text).map_err(|e| config_err(format!("{}: {e}", path.display())))?
        } else {
            toml::from_str(&text).map_err(|e| config_err(format!("{}: {e}", path.display())))?
        };
        // tables are resolved relative to the config file
        if let (Some(table), Some(dir)) = (&cfg.vibrational.table, path.parent()) {
            if table.is_relative() {
                cfg.vibrational.table = Some(dir.join(table));
            }
        }
        Ok(cfg)
    }
}

/// Fully resolved single-point problem.
#[derive(Debug, Clone)]
pub struct Problem {
    pub sd: SpectralDensity,
    pub ob: OpticalBath,
    pub splitting: Splitting,
    pub t_v: f64,
    pub nstar: Vec<usize>,
    pub engines: Vec<Engine>,
    pub prf: PrfConfig,
    pub quad: QuadConfig,
}

impl Problem {
    pub fn resolve(cfg: &RunConfig) -> Result<Self, CliError> {
        let sd = spectral_density(&cfg.vibrational)?;
        let ob = optical_bath(&cfg.optical)?;
        let splitting = match (cfg.delta_prime, cfg.delta) {
            (Some(d), None) => Splitting::DeltaPrime(d),
            (None, Some(d)) => Splitting::Delta(d),
            (Some(_), Some(_)) => return Err(config_err("give either delta_prime or delta, not both")),
            (None, None) => return Err(config_err("missing electronic splitting (delta_prime or delta)")),
        };
        let t_v = cfg.t_v.unwrap_or(0.0);
        let nstar = nstar_list(cfg, &sd)?;
        let engines = match &cfg.engines {
            Some(list) if !list.is_empty() => list.clone(),
            Some(_) => return Err(config_err("engine list is empty")),
            None => vec![Engine::ZeroT],
        };
        let mut prf = PrfConfig::default();
        prf.amplitude = AmplitudeConfig {
            tol: cfg.amplitude_tol.unwrap_or(prf.amplitude.tol),
            n_max_cap: cfg.n_max_cap.unwrap_or(prf.amplitude.n_max_cap),
        };
        if !(prf.amplitude.tol > 0.0 && prf.amplitude.tol < 1.0) {
            return Err(config_err("amplitude_tol must lie in (0, 1)"));
        }
        Ok(Self {
            sd,
            ob,
            splitting,
            t_v,
            nstar,
            engines,
            prf,
            quad: QuadConfig::default(),
        })
    }

    pub fn delta_prime(&self) -> Result<f64, CliError> {
        Ok(match self.splitting {
            Splitting::DeltaPrime(d) => d,
            Splitting::Delta(d) => d - self.sd.reorganisation_energy()?,
        })
    }
}

/// Requested truncation sizes; a discrete bath defaults to its own mode count.
pub fn nstar_list(cfg: &RunConfig, sd: &SpectralDensity) -> Result<Vec<usize>, CliError> {
    let nstar = match &cfg.nstar {
        Some(list) if !list.is_empty() => list.clone(),
        Some(_) => return Err(config_err("nstar list is empty")),
        None => match &sd {
            SpectralDensity::DiscreteModes { modes } => vec![modes.len()],
            _ => vec![1],
        },
    };
    if let Some(bad) = nstar.iter().find(|&&n| n == 0 || n > polaron_core::moment_matching::MAX_NSTAR) {
        return Err(config_err(format!(
            "N* = {bad} outside 1..={}",
            polaron_core::moment_matching::MAX_NSTAR
        )));
    }
    Ok(nstar)
}

fn need(value: Option<f64>, name: &str, family: &str) -> Result<f64, CliError> {
    value.ok_or_else(|| config_err(format!("{family} density needs {name}")))
}

pub fn spectral_density(v: &VibrationalConfig) -> Result<SpectralDensity, CliError> {
    let family = v
        .family
        .ok_or_else(|| config_err("missing vibrational family"))?;
    Ok(match family {
        Family::CubicExponential => {
            let omega_c = need(v.omega_c, "omega_c", "cubic_exponential")?;
            let s = match (v.s, v.lambda) {
                (Some(s), None) => s,
                // lambda = 2 S omega_c for this family
                (None, Some(l)) => l / (2.0 * omega_c),
                (Some(_), Some(_)) => return Err(config_err("give either S or lambda for cubic_exponential")),
                (None, None) => return Err(config_err("cubic_exponential density needs S or lambda")),
            };
            SpectralDensity::cubic_exponential(s, omega_c)?
        }
        Family::GaussianOhmic => SpectralDensity::gaussian_ohmic(
            need(v.lambda, "lambda", "gaussian_ohmic")?,
            need(v.omega_c, "omega_c", "gaussian_ohmic")?,
        )?,
        Family::LogNormalOhmic => SpectralDensity::log_normal_ohmic(
            need(v.lambda, "lambda", "log_normal_ohmic")?,
            need(v.omega_c, "omega_c", "log_normal_ohmic")?,
        )?,
        Family::Discrete => {
            let modes = v.modes.clone().ok_or_else(|| config_err("discrete density needs modes"))?;
            SpectralDensity::discrete(modes)?
        }
        Family::Tabulated => {
            let path = v.table.as_ref().ok_or_else(|| config_err("tabulated density needs a table file"))?;
            let (omega, values) = read_table(path)?;
            SpectralDensity::tabulated(omega, values)?
        }
    })
}

fn read_table(path: &Path) -> Result<(Vec<f64>, Vec<f64>), CliError> {
    let mut reader = csv::ReaderBuilder::new()
        .comment(Some(b'#'))
        .trim(csv::Trim::All)
        .from_path(path)
        .map_err(|e| CliError::Io(format!("cannot read {}: {e}", path.display())))?;
    let (mut omega, mut values) = (Vec::new(), Vec::new());
    for (i, record) in reader.records().enumerate() {
        let record = record.map_err(|e| config_err(format!("{}: {e}", path.display())))?;
        let field = |k: usize| -> Result<f64, CliError> {
            record
                .get(k)
                .and_then(|s| s.parse().ok())
                .ok_or_else(|| config_err(format!("{}: bad number in row {}", path.display(), i + 1)))
        };
        omega.push(field(0)?);
        values.push(field(1)?);
    }
    Ok((omega, values))
}

pub fn optical_bath(o: &OpticalConfig) -> Result<OpticalBath, CliError> {
    let t_o = o
        .t_o
        .ok_or_else(|| config_err("missing optical temperature T_O"))?;
    Ok(match o.family.unwrap_or(OpticalFamily::Cubic) {
        OpticalFamily::Cubic => OpticalBath::cubic(o.kappa.unwrap_or(1.0), t_o)?,
        OpticalFamily::Flat => OpticalBath::flat(
            o.value.ok_or_else(|| config_err("flat optical density needs value"))?,
            t_o,
        )?,
    })
}

/// Parse `"S:omega,S:omega"`.
pub fn parse_modes(text: &str) -> Result<Vec<Mode>, String> {
    text.split(',')
        .filter(|p| !p.trim().is_empty())
        .map(|pair| {
            let (s, w) = pair
                .split_once(':')
                .ok_or_else(|| format!("mode `{pair}` is not of the form S:omega"))?;
            let s: f64 = s.trim().parse().map_err(|_| format!("bad Huang-Rhys factor in `{pair}`"))?;
            let w: f64 = w.trim().parse().map_err(|_| format!("bad frequency in `{pair}`"))?;
            Ok(Mode::new(s, w))
        })
        .collect()
}

/// Grid of `count` values from `start` to `stop` inclusive.
pub fn grid(start: f64, stop: f64, count: usize, scale: Scale) -> Result<Vec<f64>, CliError> {
    if count < 2 {
        return Err(config_err("sweep grid needs at least two points"));
    }
    if !(start.is_finite() && stop.is_finite()) {
        return Err(config_err("sweep bounds must be finite"));
    }
    let last = (count - 1) as f64;
    Ok(match scale {
        Scale::Linear => (0..count).map(|k| start + (stop - start) * k as f64 / last).collect(),
        Scale::Log => {
            if !(start > 0.0 && stop > 0.0) {
                return Err(config_err("log grid needs positive bounds"));
            }
            let (a, b) = (start.ln(), stop.ln());
            (0..count).map(|k| (a + (b - a) * k as f64 / last).exp()).collect()
        }
    })
}
