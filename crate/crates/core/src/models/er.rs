use rand::RngCore;

use crate::error::{invalid, Result};
use crate::rng;

use super::{Permutation, SparseGraph};

/// Two edge-correlated Erdős–Rényi graphs and the hidden vertex map.
///
/// `truth` maps each vertex of `g1` to its counterpart in `g2`: the second
/// graph is sampled aligned with `g1` and then relabelled so that vertex `i`
/// becomes `truth(i)`.
#[derive(Clone, Debug)]
pub struct CorrelatedErPair {
    pub g1: SparseGraph,
    pub g2: SparseGraph,
    pub truth: Permutation,
    pub lambda: f64,
    pub s: f64,
}

impl CorrelatedErPair {
    /// `g2` expressed in `g1`'s labels.
    pub fn g2_aligned(&self) -> SparseGraph {
        self.g2.relabel(&self.truth.inverse()).expect("sizes agree")
    }
}

pub fn check_er_params(n: usize, lambda: f64, s: f64) -> Result<()> {
    if n == 0 {
        return invalid("n must be at least 1");
    }
    if !(lambda.is_finite() && lambda >= 0.0) {
        return invalid(format!("lambda must be finite and >= 0, got {lambda}"));
    }
    if !(0.0..=1.0).contains(&s) {
        return invalid(format!("s must lie in [0,1], got {s}"));
    }
    let p = lambda / n as f64;
    if p * (2.0 - s) > 1.0 {
        return invalid(format!(
            "edge probabilities infeasible: p(2-s) = {} > 1",
            p * (2.0 - s)
        ));
    }
    Ok(())
}

/// Samples the pair with mean degree `lambda` and correlation `s`.
///
/// Pairs `{i,j}` carrying an edge in at least one graph are located by
/// geometric skipping over the `n(n-1)/2` pair sequence with rate
/// `p(2-s)`; each located pair is then assigned to "both" with probability
/// `s/(2-s)` or to either single graph with probability `(1-s)/(2-s)`.
pub fn sample_correlated_er(n: usize, lambda: f64, s: f64, seed: u64) -> Result<CorrelatedErPair> {
    check_er_params(n, lambda, s)?;
    let p = lambda / n as f64;
    let q = p * (2.0 - s);
    let mut rng = rng::rng_from_seed(seed);
    let mut e1 = Vec::new();
    let mut e2 = Vec::new();
    for_each_pair_with_rate(n, q, &mut rng, |u, v, rng| {
        let x = rng::uniform(rng) * (2.0 - s);
        if x < s {
            e1.push((u, v));
            e2.push((u, v));
        } else if x < 1.0 {
            e1.push((u, v));
        } else {
            e2.push((u, v));
        }
    });
    let g1 = SparseGraph::from_distinct_edges(n, &e1);
    let g2_aligned = SparseGraph::from_distinct_edges(n, &e2);
    let truth = Permutation::random(n, &mut rng::substream(seed, 1));
    let g2 = g2_aligned.relabel(&truth)?;
    Ok(CorrelatedErPair {
        g1,
        g2,
        truth,
        lambda,
        s,
    })
}

/// Visits each unordered pair independently with probability `q`, in
/// increasing pair order, in time proportional to the number of hits.
pub(crate) fn for_each_pair_with_rate<R: RngCore>(
    n: usize,
    q: f64,
    rng: &mut R,
    mut f: impl FnMut(u32, u32, &mut R),
) {
    if q <= 0.0 || n < 2 {
        return;
    }
    let total = (n as u64) * (n as u64 - 1) / 2;
    let log_miss = (1.0 - q).ln();
    // Row v holds pairs (w, v) for w < v; `row_start` is the linear index of (0, v).
    let mut v: u64 = 1;
    let mut row_start: u64 = 0;
    let mut next: u64 = 0;
    loop {
        let skip = if q >= 1.0 {
            0.0
        } else {
            ((1.0 - rng::uniform(rng)).ln() / log_miss).floor()
        };
        if skip >= (total - next) as f64 {
            return;
        }
        let k = next + skip as u64;
        while k >= row_start + v {
            row_start += v;
            v += 1;
        }
        let w = k - row_start;
        f(w as u32, v as u32, rng);
        next = k + 1;
        if next >= total {
            return;
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn zero_density_gives_empty_graphs() {
        let pair = sample_correlated_er(4, 0.0, 0.5, 1).unwrap();
        assert_eq!(pair.g1.edge_count(), 0);
        assert_eq!(pair.g2.edge_count(), 0);
    }

    #[test]
    fn infeasible_density_rejected() {
        let err = sample_correlated_er(3, 2.7, 0.1, 1).unwrap_err();
        assert!(err.is_validation());
        assert!(sample_correlated_er(3, -1.0, 0.1, 1).is_err());
        assert!(sample_correlated_er(0, 1.0, 0.1, 1).is_err());
    }

    #[test]
    fn full_rate_visits_every_pair_once() {
        let mut rng = rng::rng_from_seed(0);
        let mut seen = Vec::new();
        for_each_pair_with_rate(6, 1.0, &mut rng, |u, v, _| seen.push((u, v)));
        assert_eq!(seen.len(), 15);
        let mut sorted = seen.clone();
        sorted.sort_unstable();
        sorted.dedup();
        assert_eq!(sorted.len(), 15);
        assert!(seen.iter().all(|&(u, v)| u < v && v < 6));
    }

    #[test]
    fn identical_graphs_at_full_correlation() {
        let pair = sample_correlated_er(300, 3.0, 1.0, 9).unwrap();
        assert_eq!(pair.g2_aligned(), pair.g1);
        pair.g1.validate().unwrap();
        pair.g2.validate().unwrap();
    }

    #[test]
    fn deterministic_given_seed() {
        let a = sample_correlated_er(500, 2.0, 0.7, 42).unwrap();
        let b = sample_correlated_er(500, 2.0, 0.7, 42).unwrap();
        assert_eq!(a.g1, b.g1);
        assert_eq!(a.g2, b.g2);
        assert_eq!(a.truth, b.truth);
    }
}
