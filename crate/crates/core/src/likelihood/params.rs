use std::sync::OnceLock;

use serde::{Deserialize, Serialize};

use crate::error::{invalid, Result};

/// Model parameters of a likelihood evaluation.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct LikelihoodParams {
    pub lambda: f64,
    pub s: f64,
    pub d: usize,
}

impl LikelihoodParams {
    pub fn new(lambda: f64, s: f64, d: usize) -> Result<Self> {
        let p = Self { lambda, s, d };
        p.validate()?;
        Ok(p)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.lambda.is_finite() && self.lambda > 0.0) {
            return invalid(format!("lambda must be finite and > 0, got {}", self.lambda));
        }
        if !(0.0..=1.0).contains(&self.s) {
            return invalid(format!("s must lie in [0,1], got {}", self.s));
        }
        Ok(())
    }

    pub fn with_depth(self, d: usize) -> Self {
        Self { d, ..self }
    }
}

const TABLE_LEN: usize = 1024;

/// `ln k!`, tabulated for small `k` and by Stirling's series beyond.
pub fn ln_factorial(k: usize) -> f64 {
    static TABLE: OnceLock<Vec<f64>> = OnceLock::new();
    let table = TABLE.get_or_init(|| {
        let mut t = vec![0.0; TABLE_LEN];
        for i in 1..TABLE_LEN {
            t[i] = t[i - 1] + (i as f64).ln();
        }
        t
    });
    if k < TABLE_LEN {
        return table[k];
    }
    let x = k as f64 + 1.0;
    let inv = 1.0 / x;
    let inv2 = inv * inv;
    (x - 0.5) * x.ln() - x
        + 0.5 * (2.0 * std::f64::consts::PI).ln()
        + inv * (1.0 / 12.0 - inv2 * (1.0 / 360.0 - inv2 / 1260.0))
}

/// `k * ln(v)` with the convention `0 * ln 0 = 0`.
pub(crate) fn xlny(k: usize, ln_v: f64) -> f64 {
    if k == 0 {
        0.0
    } else {
        k as f64 * ln_v
    }
}

/// `ln P(Poisson(mean) = k)`, with `Poisson(0)` the point mass at zero.
pub fn ln_poisson_pmf(mean: f64, k: usize) -> f64 {
    xlny(k, mean.ln()) - mean - ln_factorial(k)
}

/// `ln psi(k, c, c')`, the prior weight of `k` shared children among
/// `c` and `c'` children relative to independent Poisson(`lambda`) counts.
pub fn log_psi(k: usize, c: usize, c_prime: usize, lambda: f64, s: f64) -> Result<f64> {
    if k > c.min(c_prime) {
        return invalid(format!("psi needs k <= min(c, c'), got k={k}, c={c}, c'={c_prime}"));
    }
    LikelihoodParams::new(lambda, s, 0)?;
    let private = lambda * (1.0 - s);
    Ok(ln_poisson_pmf(lambda * s, k)
        + (ln_poisson_pmf(private, c - k) - ln_poisson_pmf(lambda, c))
        + (ln_poisson_pmf(private, c_prime - k) - ln_poisson_pmf(lambda, c_prime)))
}

pub fn psi(k: usize, c: usize, c_prime: usize, lambda: f64, s: f64) -> Result<f64> {
    log_psi(k, c, c_prime, lambda, s).map(f64::exp)
}
