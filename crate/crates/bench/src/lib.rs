//! Seeded inputs shared by the benchmarks.

use galign_core::models::{sample_correlated_er, sample_correlated_wigner, CorrelatedErPair, CorrelatedWignerPair};
use galign_core::rng::{rng_from_seed, uniform};

pub fn wigner_pair(n: usize, sigma: f64) -> CorrelatedWignerPair {
    sample_correlated_wigner(n, sigma, 0xBE7C).expect("valid parameters")
}

pub fn er_pair(n: usize, lambda: f64, s: f64) -> CorrelatedErPair {
    sample_correlated_er(n, lambda, s, 0xBE7C).expect("valid parameters")
}

/// Dense `n x n` cost matrix with uniform entries.
pub fn uniform_costs(n: usize) -> Vec<f64> {
    let mut rng = rng_from_seed(0xC057);
    (0..n * n).map(|_| uniform(&mut rng)).collect()
}
