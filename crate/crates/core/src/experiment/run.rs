use std::time::Instant;

use rayon::prelude::*;

use crate::convex::{default_gap_tol, frobenius_gap, fw_birkhoff, round_argmax, round_lap};
use crate::error::{invalid, Error, Result};
use crate::likelihood::{kl_monte_carlo, LikelihoodParams};
use crate::models::{sample_correlated_er, sample_correlated_wigner};
use crate::mp_align::{compute_messages, match_vertices, score_matches};
use crate::rng::derive_seed;
use crate::spectral::{eig1_align, perturbation_stats};
use crate::tree_enum::{corrected_ratio, count_ratio, exact_counts, kl_infinity};

use super::config::{CellParams, ExperimentConfig, Kind, Options};
use super::local_limit::{local_limit_check, LocalLimitParams};
use super::metrics::overlap;
use super::record::{Metrics, ResultRecord, VERSION};

/// Runs every (cell, rep) of the sweep on a pool of `threads` workers
/// (all cores when `None`). Records come back sorted by (cell, rep) and do
/// not depend on the worker count; a failing cell becomes an error record.
pub fn run_experiment(cfg: &ExperimentConfig, threads: Option<usize>) -> Result<Vec<ResultRecord>> {
    cfg.validate()?;
    let mut builder = rayon::ThreadPoolBuilder::new();
    if let Some(t) = threads {
        if t == 0 {
            return invalid("--threads must be at least 1");
        }
        builder = builder.num_threads(t);
    }
    let pool = builder
        .build()
        .map_err(|e| Error::InvalidInput(format!("worker pool: {e}")))?;
    let jobs: Vec<(usize, usize, CellParams)> = cfg
        .cells()
        .into_iter()
        .enumerate()
        .flat_map(|(c, p)| (0..cfg.reps).map(move |r| (c, r, p)))
        .collect();
    let mut records: Vec<ResultRecord> = pool.install(|| {
        jobs.par_iter()
            .map(|&(cell, rep, params)| run_cell(cfg, cell, rep, params))
            .collect()
    });
    records.sort_by_key(|r| (r.cell, r.rep));
    Ok(records)
}

/// Seed of one (cell, rep); a record can be rerun standalone from it.
pub fn cell_seed(cfg: &ExperimentConfig, cell: usize, rep: usize) -> u64 {
    derive_seed(cfg.seed, cfg.kind.as_str(), cell as u64, rep as u64)
}

fn run_cell(cfg: &ExperimentConfig, cell: usize, rep: usize, params: CellParams) -> ResultRecord {
    let seed = cell_seed(cfg, cell, rep);
    let start = Instant::now();
    let outcome = run_kind(cfg.kind, &params, &cfg.options, seed).and_then(|m| match m.non_finite() {
        Some((col, x)) => invalid(format!("non-finite {col} = {x}")),
        None => Ok(m),
    });
    let runtime_ms = cfg
        .options
        .record_timing
        .then(|| start.elapsed().as_secs_f64() * 1e3);
    let (metrics, error) = match outcome {
        Ok(m) => (Some(m), None),
        Err(e) => (None, Some(e.to_string())),
    };
    ResultRecord {
        kind: cfg.kind,
        cell,
        rep,
        seed,
        params,
        metrics,
        error,
        runtime_ms,
        version: VERSION.to_string(),
    }
}

/// Metrics of a single run with the given seed.
pub fn run_kind(kind: Kind, p: &CellParams, o: &Options, seed: u64) -> Result<Metrics> {
    let need = |x: Option<f64>, name: &str| x.ok_or_else(|| Error::InvalidInput(format!("missing {name}")));
    let need_n = |x: Option<usize>, name: &str| x.ok_or_else(|| Error::InvalidInput(format!("missing {name}")));
    match kind {
        Kind::ErMpalign => {
            let (n, lambda, s, d) = (need_n(p.n, "n")?, need(p.lambda, "lambda")?, need(p.s, "s")?, need_n(p.d, "d")?);
            let pair = sample_correlated_er(n, lambda, s, seed)?;
            let lp = LikelihoodParams::new(lambda, s, d)?;
            let msgs = compute_messages(&pair.g1, &pair.g2, &lp, &o.mp_align)?;
            let m = match_vertices(&pair.g1, &pair.g2, &msgs, o.mp_align.tau);
            let (n_correct, n_incorrect) = score_matches(&m, &pair.truth);
            Ok(Metrics::ErMpalign {
                n_pairs: m.len(),
                n_correct,
                n_incorrect,
                overlap: n_correct as f64 / n as f64,
                capped_pairs: msgs.capped_pairs,
                depth_warning: msgs.depth_warning,
            })
        }
        Kind::WignerEig1 => {
            let (n, sigma) = (need_n(p.n, "n")?, need(p.sigma, "sigma")?);
            let pair = sample_correlated_wigner(n, sigma, seed)?;
            let r = eig1_align(&pair.a1, &pair.a2, o.eig_tol)?;
            let stats = perturbation_stats(&pair.a1, &pair.a2_aligned(), sigma, o.eig_tol)?;
            Ok(Metrics::WignerEig1 {
                overlap: overlap(r.permutation.as_slice(), &pair.truth)?,
                eig_gap: r.eig1.gap,
                s_magnitude: stats.s_magnitude,
                alignment: stats.alignment,
                reversed: r.reversed,
                degenerate: r.eig1.degenerate || r.eig2.degenerate,
            })
        }
        Kind::WignerBirkhoff => {
            let (n, sigma) = (need_n(p.n, "n")?, need(p.sigma, "sigma")?);
            let pair = sample_correlated_wigner(n, sigma, seed)?;
            let tol = o.gap_tol.unwrap_or_else(|| default_gap_tol(n));
            let rep = fw_birkhoff(&pair.a1, &pair.a2, o.max_iters, tol)?;
            Ok(Metrics::WignerBirkhoff {
                objective: rep.objective,
                fw_gap: rep.fw_gap,
                iterations: rep.iterations,
                converged: rep.converged,
                frob_gap: frobenius_gap(&rep.x, &pair.truth)?,
                overlap_argmax: overlap(&round_argmax(&rep.x), &pair.truth)?,
                overlap_lap: overlap(round_lap(&rep.x).as_slice(), &pair.truth)?,
            })
        }
        Kind::TreeKl => {
            let (lambda, s, d) = (need(p.lambda, "lambda")?, need(p.s, "s")?, need_n(p.d, "d")?);
            let lp = LikelihoodParams::new(lambda, s, d)?;
            let est = kl_monte_carlo(&lp, o.n_samples, seed)?;
            let limit = kl_infinity(d, s, o.truncation)?;
            Ok(Metrics::TreeKl {
                kl_mean: est.mean,
                kl_stderr: est.stderr,
                n_samples: est.n_samples,
                capped_fraction: est.capped_fraction,
                kl_limit: limit.value,
                kl_limit_tail: limit.tail_flag,
            })
        }
        Kind::Otter => {
            let n = need_n(p.n, "n")?;
            let counts = exact_counts(n.saturating_sub(1), n)?;
            Ok(Metrics::Otter {
                count: counts[n - 1],
                ratio: count_ratio(n)?,
                alpha_estimate: corrected_ratio(n)?,
            })
        }
        Kind::LocalLimitCheck => {
            let lp = LocalLimitParams {
                n: need_n(p.n, "n")?,
                lambda: need(p.lambda, "lambda")?,
                s: need(p.s, "s")?,
                d: need_n(p.d, "d")?,
                max_vertices: o.max_vertices,
                tree_samples: o.tree_samples,
            };
            let r = local_limit_check(&lp, seed)?;
            Ok(Metrics::LocalLimitCheck {
                tv_matched: r.tv_matched,
                tv_unmatched: r.tv_unmatched,
                tv_control: r.tv_control,
                graph_pairs_matched: r.graph_pairs_matched,
                graph_pairs_unmatched: r.graph_pairs_unmatched,
                tree_pairs_matched: r.tree_pairs_matched,
                tree_pairs_unmatched: r.tree_pairs_unmatched,
            })
        }
    }
}
