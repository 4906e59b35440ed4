use serde::{Deserialize, Serialize};

use crate::error::{invalid, Result};
use crate::models::{sample_correlated_tree_pair, sample_independent_tree_pair};
use crate::rng::substream;

use super::classes::ClassTable;
use super::evaluate::{PairEvaluator, DEFAULT_DEGREE_CAP};
use super::params::LikelihoodParams;

/// Sample mean with its standard error.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct KlEstimate {
    pub mean: f64,
    pub stderr: f64,
    pub n_samples: usize,
    /// Fraction of samples whose evaluation hit the degree cap.
    pub capped_fraction: f64,
}

fn summarize(values: &[f64], capped: usize) -> KlEstimate {
    let n = values.len() as f64;
    let mean = values.iter().sum::<f64>() / n;
    let var = if values.len() > 1 {
        values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (n - 1.0)
    } else {
        0.0
    };
    KlEstimate {
        mean,
        stderr: (var / n).sqrt(),
        n_samples: values.len(),
        capped_fraction: capped as f64 / n,
    }
}

fn check_samples(n_samples: usize) -> Result<()> {
    if n_samples < 100 {
        return invalid(format!("Monte Carlo estimates need at least 100 samples, got {n_samples}"));
    }
    Ok(())
}

/// Per-sample `ln L_d` values, under the correlated law when `correlated`
/// and under the independent law otherwise. Sample `i` uses its own
/// substream of `seed`, so prefixes of longer runs agree.
pub fn sample_log_ratios(
    p: &LikelihoodParams,
    n_samples: usize,
    seed: u64,
    correlated: bool,
    degree_cap: u32,
) -> Result<(Vec<f64>, usize)> {
    p.validate()?;
    let mut table = ClassTable::new();
    let mut eval = PairEvaluator::new(p.lambda, p.s, degree_cap)?;
    let mut values = Vec::with_capacity(n_samples);
    let mut capped = 0;
    for i in 0..n_samples {
        let mut rng = substream(seed, i as u64);
        let pair = if correlated {
            sample_correlated_tree_pair(p.lambda, p.s, p.d, &mut rng)?
        } else {
            sample_independent_tree_pair(p.lambda, p.d, &mut rng)?
        };
        let a = table.classify(&pair.t, p.d);
        let b = table.classify(&pair.tprime, p.d);
        let v = eval.evaluate(&table, p.d, a, b);
        capped += v.capped as usize;
        values.push(v.log_ratio);
    }
    Ok((values, capped))
}

/// Monte Carlo estimate of `KL_d(lambda, s)`: the mean of `ln L_d` over
/// pairs drawn from the correlated tree law.
pub fn kl_monte_carlo(p: &LikelihoodParams, n_samples: usize, seed: u64) -> Result<KlEstimate> {
    check_samples(n_samples)?;
    let (values, capped) = sample_log_ratios(p, n_samples, seed, true, DEFAULT_DEGREE_CAP)?;
    Ok(summarize(&values, capped))
}

/// Mean of `L_d` over independent pairs, which is 1 in expectation. `L_d`
/// is heavy-tailed under the independent law, so the standard error
/// understates the fluctuations once `(lambda s)^d` is large.
pub fn null_likelihood_mean(p: &LikelihoodParams, n_samples: usize, seed: u64) -> Result<KlEstimate> {
    check_samples(n_samples)?;
    let (values, capped) = sample_log_ratios(p, n_samples, seed, false, DEFAULT_DEGREE_CAP)?;
    let ratios: Vec<f64> = values.into_iter().map(f64::exp).collect();
    Ok(summarize(&ratios, capped))
}

/// One row of an `s*` scan.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ScanRow {
    pub lambda: f64,
    pub s: f64,
    pub d: usize,
    pub estimate: KlEstimate,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SStarScan {
    pub rows: Vec<ScanRow>,
    /// Grid values whose divergence curve shows accelerating growth.
    pub growing: Vec<f64>,
    /// Smallest grid `s` from which every larger grid value grows; a
    /// finite-depth heuristic, not a limit statement.
    pub s_star: Option<f64>,
}

/// Estimates `KL_d(lambda, s)` on a grid and reads off a threshold.
///
/// A grid value counts as growing when, over the sorted depth list, the
/// last increment of the estimates exceeds the previous one. The reported
/// threshold is the smallest grid value from which all larger values grow.
pub fn s_star_scan(lambda: f64, d_list: &[usize], s_grid: &[f64], n_samples: usize, seed: u64) -> Result<SStarScan> {
    if d_list.is_empty() || s_grid.is_empty() {
        return invalid("s* scan needs nonempty depth and correlation grids");
    }
    check_samples(n_samples)?;
    let mut depths = d_list.to_vec();
    depths.sort_unstable();
    depths.dedup();
    let mut grid = s_grid.to_vec();
    grid.sort_by(f64::total_cmp);
    grid.dedup();

    let mut rows = Vec::new();
    let mut growing = Vec::new();
    for (si, &s) in grid.iter().enumerate() {
        let mut means = Vec::new();
        for &d in &depths {
            let p = LikelihoodParams::new(lambda, s, d)?;
            let est = kl_monte_carlo(&p, n_samples, crate::rng::mix64(seed ^ crate::rng::mix64(si as u64 * 1009 + d as u64)))?;
            means.push(est.mean);
            rows.push(ScanRow { lambda, s, d, estimate: est });
        }
        if means.len() >= 3 {
            let m = means.len();
            if means[m - 1] - means[m - 2] > means[m - 2] - means[m - 3] {
                growing.push(s);
            }
        }
    }
    let mut s_star = None;
    for &s in grid.iter().rev() {
        if growing.contains(&s) {
            s_star = Some(s);
        } else {
            break;
        }
    }
    Ok(SStarScan { rows, growing, s_star })
}
