//! Command-line flags. Every flag overrides the matching config field.

use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};

use crate::config::{
    parse_modes, DynamicsConfig, Engine, Family, OpticalFamily, RunConfig, Scale, SweepConfig, SweepParameter,
};
use crate::error::CliError;
use polaron_core::Mode;

#[derive(Debug, Parser)]
#[command(name = "polaron-rates", version, about = "Polaron-frame optical excitation and decay rates")]
pub struct Cli {
    /// Worker threads for sweeps (default: one per core).
    #[arg(long, global = true)]
    pub jobs: Option<usize>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Print the effective modes of the truncated bath for each N*.
    Modes(PointArgs),
    /// Rates at one parameter point for every requested engine (JSON).
    Rates(PointArgs),
    /// Rates over a one-parameter grid (CSV).
    Sweep(SweepArgs),
    /// Two-level population dynamics driven by the computed rates (CSV).
    Dynamics(DynamicsArgs),
    /// Truncation error of both moment sets against direct integration (CSV).
    Compare(PointArgs),
}

#[derive(Debug, Clone, Default, Args)]
pub struct PointArgs {
    /// TOML or JSON configuration file.
    #[arg(long)]
    pub config: Option<PathBuf>,
    /// Write the result here instead of stdout.
    #[arg(long, short)]
    pub output: Option<PathBuf>,

    /// Vibrational spectral density family.
    #[arg(long, value_enum)]
    pub family: Option<Family>,
    /// Huang-Rhys factor of the cubic-exponential density.
    #[arg(long = "S", alias = "s")]
    pub s: Option<f64>,
    /// Reorganisation energy (eV).
    #[arg(long)]
    pub lambda: Option<f64>,
    /// Cut-off frequency (eV).
    #[arg(long)]
    pub omega_c: Option<f64>,
    /// Discrete modes as `S:omega,S:omega`.
    #[arg(long, value_parser = parse_modes_arg)]
    pub modes: Option<ModeList>,
    /// CSV file `omega,J` for a tabulated density.
    #[arg(long)]
    pub table: Option<PathBuf>,

    /// Polaron-shifted splitting delta' (eV).
    #[arg(long, alias = "delta-p")]
    pub delta_prime: Option<f64>,
    /// Bare splitting delta (eV); delta' = delta - lambda.
    #[arg(long)]
    pub delta: Option<f64>,
    /// Vibrational temperature (K).
    #[arg(long = "t-v", alias = "T_V")]
    pub t_v: Option<f64>,
    /// Optical temperature (K).
    #[arg(long = "t-o", alias = "T_O")]
    pub t_o: Option<f64>,
    /// Photon spectral density family.
    #[arg(long, value_enum)]
    pub optical: Option<OpticalFamily>,
    /// Prefactor of the cubic photon density.
    #[arg(long)]
    pub kappa: Option<f64>,
    /// Value of the flat photon density.
    #[arg(long)]
    pub flat_value: Option<f64>,

    /// Truncation sizes, comma separated.
    #[arg(long, value_delimiter = ',')]
    pub nstar: Option<Vec<usize>>,
    /// Engines, comma separated.
    #[arg(long, value_enum, value_delimiter = ',')]
    pub engines: Option<Vec<Engine>>,
    /// Amplitude table tolerance.
    #[arg(long)]
    pub tol: Option<f64>,
    /// Hard cap on the amplitude series order.
    #[arg(long)]
    pub n_max_cap: Option<usize>,
}

fn parse_modes_arg(text: &str) -> Result<Vec<Mode>, String> {
    parse_modes(text)
}

#[derive(Debug, Clone, Args)]
pub struct SweepArgs {
    #[command(flatten)]
    pub point: PointArgs,
    /// Swept parameter.
    #[arg(long, value_enum)]
    pub parameter: Option<SweepParameter>,
    /// First grid value.
    #[arg(long)]
    pub start: Option<f64>,
    /// Last grid value.
    #[arg(long)]
    pub stop: Option<f64>,
    /// Number of grid points.
    #[arg(long)]
    pub count: Option<usize>,
    /// Grid spacing.
    #[arg(long, value_enum)]
    pub scale: Option<Scale>,
}

#[derive(Debug, Clone, Args)]
pub struct DynamicsArgs {
    #[command(flatten)]
    pub point: PointArgs,
    /// Initial excited-state population.
    #[arg(long)]
    pub rho0: Option<f64>,
    /// Final time (1/eV); default ten relaxation times.
    #[arg(long)]
    pub t_stop: Option<f64>,
    /// Number of output times (default 101).
    #[arg(long)]
    pub samples: Option<usize>,
}

/// Alias so clap parses the whole list as one value.
type ModeList = Vec<Mode>;

fn set<T>(slot: &mut Option<T>, value: &Option<T>)
where
    T: Clone,
{
    if let Some(v) = value {
        *slot = Some(v.clone());
    }
}

impl PointArgs {
    pub fn load(&self) -> Result<RunConfig, CliError> {
        let mut cfg = match &self.config {
            Some(path) => RunConfig::load(path)?,
            None => RunConfig::default(),
        };
        self.apply(&mut cfg);
        Ok(cfg)
    }

    pub fn apply(&self, cfg: &mut RunConfig) {
        let v = &mut cfg.vibrational;
        if self.family.is_some() && self.family != v.family {
            // a new family invalidates the parameters of the old one
            *v = Default::default();
        }
        set(&mut v.family, &self.family);
        set(&mut v.s, &self.s);
        set(&mut v.lambda, &self.lambda);
        set(&mut v.omega_c, &self.omega_c);
        set(&mut v.modes, &self.modes);
        set(&mut v.table, &self.table);
        if self.s.is_some() {
            v.lambda = None;
        } else if self.lambda.is_some() && v.family == Some(Family::CubicExponential) {
            v.s = None;
        }

        let o = &mut cfg.optical;
        set(&mut o.family, &self.optical);
        set(&mut o.kappa, &self.kappa);
        set(&mut o.value, &self.flat_value);
        set(&mut o.t_o, &self.t_o);

        if self.delta_prime.is_some() {
            cfg.delta = None;
            cfg.delta_prime = self.delta_prime;
        }
        if self.delta.is_some() {
            cfg.delta_prime = None;
            cfg.delta = self.delta;
        }
        set(&mut cfg.t_v, &self.t_v);
        set(&mut cfg.nstar, &self.nstar);
        set(&mut cfg.engines, &self.engines);
        set(&mut cfg.amplitude_tol, &self.tol);
        set(&mut cfg.n_max_cap, &self.n_max_cap);
    }
}

impl SweepArgs {
    pub fn load(&self) -> Result<RunConfig, CliError> {
        let mut cfg = self.point.load()?;
        let sweep = cfg.sweep.get_or_insert(SweepConfig {
            parameter: None,
            start: None,
            stop: None,
            count: None,
            scale: None,
        });
        set(&mut sweep.parameter, &self.parameter);
        set(&mut sweep.start, &self.start);
        set(&mut sweep.stop, &self.stop);
        set(&mut sweep.count, &self.count);
        set(&mut sweep.scale, &self.scale);
        Ok(cfg)
    }
}

impl DynamicsArgs {
    pub fn load(&self) -> Result<RunConfig, CliError> {
        let mut cfg = self.point.load()?;
        let d = cfg.dynamics.get_or_insert(DynamicsConfig::default());
        set(&mut d.rho0, &self.rho0);
        set(&mut d.t_stop, &self.t_stop);
        set(&mut d.samples, &self.samples);
        Ok(cfg)
    }
}
