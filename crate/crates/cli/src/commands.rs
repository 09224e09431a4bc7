//! Subcommand implementations. Each returns the text to be written out.

use polaron_core::{
    oracle_rates, population_dynamics, rates_for_bath, steady_state, truncate, weak_limit_rates, Channels,
    Expansion, Splitting,
};
use rayon::prelude::*;
use serde::Serialize;
use serde_json::{json, Value};

use crate::config::{grid, nstar_list, spectral_density, Engine, Family, Problem, RunConfig, Scale, SweepParameter};
use crate::error::{config_err, CliError};

/// Fixed float format: 17 significant digits.
pub fn fmt(x: f64) -> String {
    format!("{x:.16e}")
}

fn fmt_opt(x: Option<f64>) -> String {
    x.map(fmt).unwrap_or_default()
}

/// Outcome of one engine at one point.
#[derive(Debug, Clone, Serialize)]
pub struct EngineValue {
    pub gamma_up: f64,
    pub gamma_down: f64,
    pub up: Channels,
    pub down: Channels,
    pub mass_deficit: Option<f64>,
    pub detail: Value,
}

#[derive(Debug, Clone)]
pub struct EngineRow {
    pub engine: Engine,
    pub nstar: Option<usize>,
    pub outcome: Result<EngineValue, polaron_core::Error>,
}

/// Evaluate every requested engine (and every `N*` for the truncations).
pub fn evaluate(problem: &Problem) -> Result<(f64, Vec<EngineRow>), CliError> {
    let delta_prime = problem.delta_prime()?;
    let mut rows = Vec::new();
    for &engine in &problem.engines {
        match engine {
            Engine::ZeroT | Engine::InfiniteT => {
                let expansion = engine.expansion().expect("truncation engine");
                for &n in &problem.nstar {
                    let outcome = truncate(&problem.sd, n, expansion)
                        .and_then(|bath| rates_for_bath(delta_prime, &bath, &problem.ob, problem.t_v, &problem.prf))
                        .map(|r| EngineValue {
                            gamma_up: r.gamma_up,
                            gamma_down: r.gamma_down,
                            up: r.up,
                            down: r.down,
                            mass_deficit: Some(r.diagnostics.mass_deficit),
                            detail: serde_json::to_value(&r).expect("serialisable"),
                        });
                    rows.push(EngineRow {
                        engine,
                        nstar: Some(n),
                        outcome,
                    });
                }
            }
            Engine::Oracle => {
                let outcome = oracle_rates(delta_prime, &problem.sd, &problem.ob, problem.t_v, &problem.quad).map(|r| {
                    EngineValue {
                        gamma_up: r.gamma_up,
                        gamma_down: r.gamma_down,
                        up: r.up,
                        down: r.down,
                        mass_deficit: None,
                        detail: serde_json::to_value(r).expect("serialisable"),
                    }
                });
                rows.push(EngineRow {
                    engine,
                    nstar: None,
                    outcome,
                });
            }
            Engine::Weak | Engine::Flat => {
                // weak coupling uses the bare splitting when one was given
                let d = match (engine, problem.splitting) {
                    (Engine::Weak, Splitting::Delta(d)) => d,
                    _ => delta_prime,
                };
                let outcome = weak_limit_rates(d, &problem.ob).map(|r| EngineValue {
                    gamma_up: r.gamma_up,
                    gamma_down: r.gamma_down,
                    up: r.up,
                    down: r.down,
                    mass_deficit: None,
                    detail: serde_json::to_value(&r).expect("serialisable"),
                });
                rows.push(EngineRow {
                    engine,
                    nstar: None,
                    outcome,
                });
            }
        }
    }
    Ok((delta_prime, rows))
}

pub fn cmd_modes(cfg: &RunConfig) -> Result<String, CliError> {
    let sd = spectral_density(&cfg.vibrational)?;
    let nstar = nstar_list(cfg, &sd)?;
    let mut expansions: Vec<Expansion> = cfg.engines.iter().flatten().filter_map(|e| e.expansion()).collect();
    if expansions.is_empty() {
        expansions.push(Expansion::ZeroT);
    }
    let mut out = Vec::new();
    for expansion in expansions {
        for &n in &nstar {
            let bath = truncate(&sd, n, expansion)?;
            out.push(json!({
                "expansion": expansion.label(),
                "Nstar": n,
                "modes": bath.modes,
                "residual": bath.residual,
                "reorganisation_energy": bath.reorganisation_energy(),
            }));
        }
    }
    Ok(serde_json::to_string_pretty(&out).expect("serialisable") + "\n")
}

pub fn cmd_rates(cfg: &RunConfig) -> Result<String, CliError> {
    let problem = Problem::resolve(cfg)?;
    let (delta_prime, rows) = evaluate(&problem)?;
    let weak = weak_limit_rates(delta_prime, &problem.ob)?;
    let mut results = Vec::new();
    for row in rows {
        let value = row.outcome?;
        results.push(json!({
            "engine": row.engine.label(),
            "Nstar": row.nstar,
            "gamma_up": value.gamma_up,
            "gamma_down": value.gamma_down,
            "rho_ss": steady_state(value.gamma_up, value.gamma_down).ok(),
            "result": value.detail,
        }));
    }
    let doc = json!({
        "delta_prime": delta_prime,
        "T_V": problem.t_v,
        "T_O": problem.ob.temperature,
        "weak": { "gamma_up": weak.gamma_up, "gamma_down": weak.gamma_down },
        "results": results,
    });
    Ok(serde_json::to_string_pretty(&doc).expect("serialisable") + "\n")
}

fn set_parameter(cfg: &RunConfig, parameter: SweepParameter, value: f64) -> RunConfig {
    let mut c = cfg.clone();
    match parameter {
        SweepParameter::S => {
            c.vibrational.s = Some(value);
            c.vibrational.lambda = None;
        }
        SweepParameter::OmegaC => c.vibrational.omega_c = Some(value),
        SweepParameter::TV => c.t_v = Some(value),
        SweepParameter::Lambda => {
            c.vibrational.lambda = Some(value);
            c.vibrational.s = None;
        }
    }
    c
}

fn check_parameter(cfg: &RunConfig, parameter: SweepParameter) -> Result<(), CliError> {
    let family = cfg.vibrational.family;
    let ok = match parameter {
        SweepParameter::S => family == Some(Family::CubicExponential),
        SweepParameter::OmegaC | SweepParameter::Lambda => matches!(
            family,
            Some(Family::CubicExponential | Family::GaussianOhmic | Family::LogNormalOhmic)
        ),
        SweepParameter::TV => true,
    };
    if ok {
        Ok(())
    } else {
        Err(config_err(format!(
            "cannot sweep {} for the {:?} family",
            parameter.column(),
            family
        )))
    }
}

pub const SWEEP_COLUMNS: [&str; 15] = [
    "engine",
    "Nstar",
    "gamma_up",
    "gamma_down",
    "gamma_up_emission",
    "gamma_up_absorption",
    "gamma_down_emission",
    "gamma_down_absorption",
    "gamma_up_norm",
    "gamma_down_norm",
    "rho_ss",
    "mass_deficit",
    "abs_err_up",
    "abs_err_down",
    "error",
];

fn point_records(cfg: &RunConfig, value: f64) -> Vec<Vec<String>> {
    let failed = |engines: &[Engine], msg: String| -> Vec<Vec<String>> {
        engines
            .iter()
            .map(|e| {
                let mut r = vec![fmt(value), e.label().to_string()];
                r.extend(std::iter::repeat_n(String::new(), SWEEP_COLUMNS.len() - 2));
                *r.last_mut().expect("non-empty") = msg.clone();
                r
            })
            .collect()
    };
    let engines = cfg.engines.clone().unwrap_or_else(|| vec![Engine::ZeroT]);
    let problem = match Problem::resolve(cfg) {
        Ok(p) => p,
        Err(e) => return failed(&engines, e.to_string()),
    };
    let (delta_prime, rows) = match evaluate(&problem) {
        Ok(v) => v,
        Err(e) => return failed(&engines, e.to_string()),
    };
    let weak = weak_limit_rates(delta_prime, &problem.ob).ok();
    let oracle = rows
        .iter()
        .find(|r| r.engine == Engine::Oracle)
        .and_then(|r| r.outcome.as_ref().ok())
        .map(|v| (v.gamma_up, v.gamma_down));
    rows.into_iter()
        .map(|row| {
            let mut rec = vec![
                fmt(value),
                row.engine.label().to_string(),
                row.nstar.map(|n| n.to_string()).unwrap_or_default(),
            ];
            match row.outcome {
                Ok(v) => {
                    let norm = |g: f64, w: Option<f64>| w.filter(|w| *w > 0.0).map(|w| g / w);
                    let errs = oracle
                        .filter(|_| row.engine != Engine::Oracle)
                        .map(|(ou, od)| ((v.gamma_up - ou).abs(), (v.gamma_down - od).abs()));
                    rec.extend([
                        fmt(v.gamma_up),
                        fmt(v.gamma_down),
                        fmt(v.up.emission),
                        fmt(v.up.absorption),
                        fmt(v.down.emission),
                        fmt(v.down.absorption),
                        fmt_opt(norm(v.gamma_up, weak.as_ref().map(|w| w.gamma_up))),
                        fmt_opt(norm(v.gamma_down, weak.as_ref().map(|w| w.gamma_down))),
                        fmt_opt(steady_state(v.gamma_up, v.gamma_down).ok()),
                        fmt_opt(v.mass_deficit),
                        fmt_opt(errs.map(|e| e.0)),
                        fmt_opt(errs.map(|e| e.1)),
                        String::new(),
                    ]);
                }
                Err(e) => {
                    rec.extend(std::iter::repeat_n(String::new(), SWEEP_COLUMNS.len() - 2));
                    *rec.last_mut().expect("non-empty") = e.to_string();
                }
            }
            rec
        })
        .collect()
}

/// CSV text, number of failed rows and total rows.
pub fn cmd_sweep(cfg: &RunConfig) -> Result<(String, usize, usize), CliError> {
    let sweep = cfg.sweep.as_ref().ok_or_else(|| config_err("missing [sweep] section"))?;
    let parameter = sweep.parameter.ok_or_else(|| config_err("sweep needs a parameter"))?;
    let start = sweep.start.ok_or_else(|| config_err("sweep needs start"))?;
    let stop = sweep.stop.ok_or_else(|| config_err("sweep needs stop"))?;
    let count = sweep.count.ok_or_else(|| config_err("sweep needs count"))?;
    let values = grid(start, stop, count, sweep.scale.unwrap_or(Scale::Linear))?;
    check_parameter(cfg, parameter)?;
    // anything that fails independently of the swept value is a configuration error
    Problem::resolve(&set_parameter(cfg, parameter, values[0]))?;

    let records: Vec<Vec<String>> = values
        .par_iter()
        .map(|&v| point_records(&set_parameter(cfg, parameter, v), v))
        .collect::<Vec<_>>()
        .into_iter()
        .flatten()
        .collect();

    let mut writer = csv::Writer::from_writer(Vec::new());
    let mut header = vec![parameter.column()];
    header.extend(SWEEP_COLUMNS);
    writer.write_record(&header).map_err(|e| CliError::Io(e.to_string()))?;
    let failed = records.iter().filter(|r| !r.last().expect("non-empty").is_empty()).count();
    for r in &records {
        writer.write_record(r).map_err(|e| CliError::Io(e.to_string()))?;
    }
    let bytes = writer.into_inner().map_err(|e| CliError::Io(e.to_string()))?;
    Ok((String::from_utf8(bytes).expect("utf-8"), failed, records.len()))
}

pub fn cmd_dynamics(cfg: &RunConfig) -> Result<String, CliError> {
    let mut problem = Problem::resolve(cfg)?;
    problem.engines.truncate(1);
    if let Some(&last) = problem.nstar.last() {
        problem.nstar = vec![last];
    }
    let (_, rows) = evaluate(&problem)?;
    let v = rows.into_iter().next().expect("one engine").outcome?;
    let d = cfg.dynamics.clone().unwrap_or_default();
    let total = v.gamma_up + v.gamma_down;
    let t_stop = match d.t_stop {
        Some(t) if t > 0.0 => t,
        Some(_) => return Err(config_err("t_stop must be positive")),
        None if total > 0.0 => 10.0 / total,
        None => return Err(polaron_core::Error::DegenerateRates.into()),
    };
    let samples = d.samples.unwrap_or(101);
    if samples < 2 {
        return Err(config_err("dynamics needs at least two samples"));
    }
    let times: Vec<f64> = (0..samples).map(|k| t_stop * k as f64 / (samples - 1) as f64).collect();
    let tr = population_dynamics(v.gamma_up, v.gamma_down, d.rho0.unwrap_or(0.0), &times)?;
    let mut writer = csv::Writer::from_writer(Vec::new());
    let io = |e: csv::Error| CliError::Io(e.to_string());
    writer.write_record(["t", "rho_ee", "rho_gg", "rho_ss", "inverted"]).map_err(io)?;
    for k in 0..samples {
        writer
            .write_record([
                fmt(tr.t[k]),
                fmt(tr.rho_ee[k]),
                fmt(tr.rho_gg[k]),
                fmt(tr.steady_state),
                tr.inverted().to_string(),
            ])
            .map_err(io)?;
    }
    let bytes = writer.into_inner().map_err(|e| CliError::Io(e.to_string()))?;
    Ok(String::from_utf8(bytes).expect("utf-8"))
}

pub fn cmd_compare(cfg: &RunConfig) -> Result<String, CliError> {
    let mut cfg = cfg.clone();
    cfg.engines = Some(vec![Engine::Oracle, Engine::ZeroT, Engine::InfiniteT]);
    if cfg.nstar.is_none() {
        cfg.nstar = Some(vec![1, 2, 3]);
    }
    let problem = Problem::resolve(&cfg)?;
    let (_, rows) = evaluate(&problem)?;
    let mut rows = rows.into_iter();
    let oracle_row = rows.next().expect("oracle first");
    let oracle = oracle_row.outcome?;
    let converged = oracle.detail["converged"] == json!(true);
    let rel = |a: f64, b: f64| if b == 0.0 { (a - b).abs() } else { (a - b).abs() / b.abs() };
    let mut writer = csv::Writer::from_writer(Vec::new());
    let io = |e: csv::Error| CliError::Io(e.to_string());
    writer
        .write_record([
            "expansion",
            "Nstar",
            "gamma_up",
            "gamma_down",
            "oracle_up",
            "oracle_down",
            "rel_err_up",
            "rel_err_down",
            "oracle_converged",
        ])
        .map_err(io)?;
    for row in rows {
        let v = row.outcome?;
        writer
            .write_record([
                row.engine.label().to_string(),
                row.nstar.map(|n| n.to_string()).unwrap_or_default(),
                fmt(v.gamma_up),
                fmt(v.gamma_down),
                fmt(oracle.gamma_up),
                fmt(oracle.gamma_down),
                fmt(rel(v.gamma_up, oracle.gamma_up)),
                fmt(rel(v.gamma_down, oracle.gamma_down)),
                converged.to_string(),
            ])
            .map_err(io)?;
    }
    let bytes = writer.into_inner().map_err(|e| CliError::Io(e.to_string()))?;
    Ok(String::from_utf8(bytes).expect("utf-8"))
}
