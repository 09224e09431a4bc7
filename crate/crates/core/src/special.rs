//! Factorials, binomials and Gamma values used by the series code.

use std::f64::consts::PI;

const EXACT_FACTORIAL_MAX: usize = 20;

/// `ln(n!)`: exact factorial below 21, Stirling series above.
pub fn ln_factorial(n: usize) -> f64 {
    if n <= EXACT_FACTORIAL_MAX {
        let mut f = 1.0_f64;
        for k in 2..=n {
            f *= k as f64;
        }
        f.ln()
    } else {
        let x = n as f64 + 1.0;
        let x2 = x * x;
        let series = 1.0 / 12.0 - (1.0 / 360.0 - (1.0 / 1260.0 - 1.0 / (1680.0 * x2)) / x2) / x2;
        (x - 0.5) * x.ln() - x + 0.5 * (2.0 * PI).ln() + series / x
    }
}

/// Precomputed `ln(k!)` for `k = 0..=n`.
#[derive(Debug, Clone)]
pub struct LnFactorials(Vec<f64>);

impl LnFactorials {
    pub fn new(n: usize) -> Self {
        Self((0..=n).map(ln_factorial).collect())
    }

    #[inline]
    pub fn get(&self, n: usize) -> f64 {
        self.0[n]
    }

    /// `ln C(n, k)`, requires `k <= n`.
    #[inline]
    pub fn ln_binomial(&self, n: usize, k: usize) -> f64 {
        self.0[n] - self.0[k] - self.0[n - k]
    }
}

/// `Gamma(j/2)` for positive integer `j`.
pub fn gamma_half_integer(j: u32) -> f64 {
    assert!(j >= 1);
    let (mut value, mut x) = if j.is_multiple_of(2) {
        (1.0, 1.0)
    } else {
        (PI.sqrt(), 0.5)
    };
    let target = j as f64 / 2.0;
    while x < target {
        value *= x;
        x += 1.0;
    }
    value
}

/// `n!` as a float (exact up to 22!).
pub fn factorial(n: u32) -> f64 {
    (2..=n).fold(1.0, |acc, k| acc * k as f64)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn stirling_branch_continues_exact_branch() {
        // ln 21! from the exact product
        let exact: f64 = (1..=21).map(|k| (k as f64).ln()).sum();
        assert!((ln_factorial(21) - exact).abs() < 1e-13);
        let exact_100: f64 = (1..=100).map(|k| (k as f64).ln()).sum();
        assert!((ln_factorial(100) - exact_100).abs() / exact_100 < 1e-14);
    }

    #[test]
    fn binomials() {
        let t = LnFactorials::new(60);
        assert!((t.ln_binomial(10, 3).exp() - 120.0).abs() < 1e-10);
        assert!((t.ln_binomial(50, 25).exp() - 126_410_606_437_752.0).abs() / 1.26e14 < 1e-12);
        assert_eq!(t.ln_binomial(7, 0), 0.0);
    }

    #[test]
    fn gamma_half_values() {
        assert!((gamma_half_integer(1) - PI.sqrt()).abs() < 1e-15);
        assert_eq!(gamma_half_integer(2), 1.0);
        assert!((gamma_half_integer(3) - 0.5 * PI.sqrt()).abs() < 1e-15);
        assert_eq!(gamma_half_integer(6), 2.0);
        assert!((gamma_half_integer(7) - 1.875 * PI.sqrt()).abs() < 1e-14);
    }
}
