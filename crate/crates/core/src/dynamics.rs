//! Two-level population dynamics `d rho_ee/dt = gamma_up rho_gg - gamma_down rho_ee`.

use serde::Serialize;

use crate::error::{Error, Result};

/// `gamma_up / (gamma_up + gamma_down)`.
pub fn steady_state(gamma_up: f64, gamma_down: f64) -> Result<f64> {
    let total = gamma_up + gamma_down;
    if !(total > 0.0) {
        return Err(Error::DegenerateRates);
    }
    Ok(gamma_up / total)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Trajectory {
    pub t: Vec<f64>,
    pub rho_ee: Vec<f64>,
    pub rho_gg: Vec<f64>,
    pub steady_state: f64,
}

impl Trajectory {
    /// Steady-state excited population above one half.
    pub fn inverted(&self) -> bool {
        self.steady_state > 0.5
    }
}

/// Closed-form solution sampled on `t_grid`:
/// `rho_ee(t) = rho_ss + (rho_ee(0) - rho_ss) exp(-(gamma_up + gamma_down) t)`.
pub fn population_dynamics(gamma_up: f64, gamma_down: f64, rho_ee0: f64, t_grid: &[f64]) -> Result<Trajectory> {
    if !(0.0..=1.0).contains(&rho_ee0) {
        return Err(Error::InvalidParameter(format!(
            "initial excited population must lie in [0, 1], got {rho_ee0}"
        )));
    }
    if gamma_up < 0.0 || gamma_down < 0.0 {
        return Err(Error::InvalidParameter("rates must be non-negative".into()));
    }
    let rho_ss = steady_state(gamma_up, gamma_down)?;
    let total = gamma_up + gamma_down;
    let rho_ee: Vec<f64> = t_grid
        .iter()
        .map(|&t| rho_ss + (rho_ee0 - rho_ss) * (-total * t).exp())
        .collect();
    let rho_gg = rho_ee.iter().map(|r| 1.0 - r).collect();
    Ok(Trajectory {
        t: t_grid.to_vec(),
        rho_ee,
        rho_gg,
        steady_state: rho_ss,
    })
}
