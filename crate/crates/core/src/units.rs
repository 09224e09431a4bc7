//! Unit conventions: energies in eV, temperatures in kelvin, hbar = 1 so
//! rates carry units of energy and times units of 1/eV.

use serde::{Deserialize, Serialize};

/// Boltzmann constant in eV/K.
pub const K_B: f64 = 8.617333262e-5;

/// Bose-Einstein occupation `1/(exp(e/(k_B T)) - 1)`.
///
/// Defined as exactly zero at `T = 0` and for `e <= 0`.
pub fn bose(energy: f64, temperature: f64) -> f64 {
    if temperature <= 0.0 || energy <= 0.0 {
        return 0.0;
    }
    let x = energy / (K_B * temperature);
    if x > 745.0 {
        0.0
    } else {
        1.0 / x.exp_m1()
    }
}

/// Natural log of the Bose occupation, `-inf` when the occupation is zero.
pub fn ln_bose(energy: f64, temperature: f64) -> f64 {
    if temperature <= 0.0 || energy <= 0.0 {
        return f64::NEG_INFINITY;
    }
    let x = energy / (K_B * temperature);
    if x > 30.0 {
        // ln(1/(e^x - 1)) = -x - ln(1 - e^-x)
        -x - (-(-x).exp()).ln_1p()
    } else {
        -x.exp_m1().ln()
    }
}

/// Vibrational and optical bath temperatures in kelvin.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Temperatures {
    #[serde(rename = "T_V")]
    pub vibrational: f64,
    #[serde(rename = "T_O")]
    pub optical: f64,
}

impl Temperatures {
    pub fn new(vibrational: f64, optical: f64) -> Self {
        Self {
            vibrational,
            optical,
        }
    }
}
