use std::collections::{BTreeMap, HashMap};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{invalid, Result};
use crate::models::{
    neighborhood, sample_correlated_er, sample_correlated_tree_pair, sample_independent_tree_pair, RootedTree,
};
use crate::rng::{below, substream};
use crate::tree_enum::canonical_form;

type PairLaw = HashMap<(String, String), usize>;

/// Tree-model samples drawn per parallel chunk; chunk `k` uses its own
/// substream, so results do not depend on the worker count.
const CHUNK: usize = 10_000;

/// Total-variation distances between the law of depth-`d` neighbourhood
/// pairs in a correlated graph pair and the tree-model law, for true pairs
/// `(i, truth(i))` against correlated trees and for random pairs against
/// independent trees. Both laws are conditioned on the two trees having at
/// most `max_vertices` vertices in total. `tv_control` compares the true
/// pairs against independent trees and shows the distance is able to
/// detect correlation.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct LocalLimitReport {
    pub tv_matched: f64,
    pub tv_unmatched: f64,
    pub tv_control: f64,
    pub graph_pairs_matched: usize,
    pub graph_pairs_unmatched: usize,
    pub tree_pairs_matched: usize,
    pub tree_pairs_unmatched: usize,
}

#[derive(Clone, Copy, Debug)]
pub struct LocalLimitParams {
    pub n: usize,
    pub lambda: f64,
    pub s: f64,
    pub d: usize,
    pub max_vertices: usize,
    pub tree_samples: usize,
}

pub fn local_limit_check(p: &LocalLimitParams, seed: u64) -> Result<LocalLimitReport> {
    if p.n < 2 || p.tree_samples == 0 {
        return invalid("local-limit check needs n >= 2 and tree_samples >= 1");
    }
    let pair = sample_correlated_er(p.n, p.lambda, p.s, seed)?;
    let mut pick = substream(seed, 0x10CA1);
    let partners: Vec<usize> = (0..p.n)
        .map(|i| {
            // uniform over the n - 1 wrong partners
            let t = pair.truth.apply(i);
            let u = below(&mut pick, p.n - 1);
            if u >= t {
                u + 1
            } else {
                u
            }
        })
        .collect();
    let keys: Vec<(Option<(String, String)>, Option<(String, String)>)> = (0..p.n)
        .into_par_iter()
        .map(|i| -> Result<_> {
            let t1 = neighborhood(&pair.g1, i, p.d)?;
            let matched = neighborhood(&pair.g2, pair.truth.apply(i), p.d)?;
            let unmatched = neighborhood(&pair.g2, partners[i], p.d)?;
            Ok((key(t1.as_ref(), matched.as_ref(), p.max_vertices), key(t1.as_ref(), unmatched.as_ref(), p.max_vertices)))
        })
        .collect::<Result<_>>()?;
    let mut graph_matched = PairLaw::new();
    let mut graph_unmatched = PairLaw::new();
    for (m, u) in keys {
        if let Some(k) = m {
            *graph_matched.entry(k).or_default() += 1;
        }
        if let Some(k) = u {
            *graph_unmatched.entry(k).or_default() += 1;
        }
    }

    let chunks = p.tree_samples.div_ceil(CHUNK);
    let partial: Vec<(PairLaw, PairLaw)> = (0..chunks)
        .into_par_iter()
        .map(|c| -> Result<_> {
            let mut rng = substream(seed, 0x7EE0_0000 + c as u64);
            let (mut m, mut u) = (PairLaw::new(), PairLaw::new());
            let len = CHUNK.min(p.tree_samples - c * CHUNK);
            for _ in 0..len {
                let tp = sample_correlated_tree_pair(p.lambda, p.s, p.d, &mut rng)?;
                if let Some(k) = key(Some(&tp.t), Some(&tp.tprime), p.max_vertices) {
                    *m.entry(k).or_default() += 1;
                }
                let tp = sample_independent_tree_pair(p.lambda, p.d, &mut rng)?;
                if let Some(k) = key(Some(&tp.t), Some(&tp.tprime), p.max_vertices) {
                    *u.entry(k).or_default() += 1;
                }
            }
            Ok((m, u))
        })
        .collect::<Result<_>>()?;
    let mut tree_matched = PairLaw::new();
    let mut tree_unmatched = PairLaw::new();
    for (m, u) in partial {
        for (k, c) in m {
            *tree_matched.entry(k).or_default() += c;
        }
        for (k, c) in u {
            *tree_unmatched.entry(k).or_default() += c;
        }
    }
    Ok(LocalLimitReport {
        tv_matched: total_variation(&graph_matched, &tree_matched),
        tv_unmatched: total_variation(&graph_unmatched, &tree_unmatched),
        tv_control: total_variation(&graph_matched, &tree_unmatched),
        graph_pairs_matched: graph_matched.values().sum(),
        graph_pairs_unmatched: graph_unmatched.values().sum(),
        tree_pairs_matched: tree_matched.values().sum(),
        tree_pairs_unmatched: tree_unmatched.values().sum(),
    })
}

fn key(a: Option<&RootedTree>, b: Option<&RootedTree>, max_vertices: usize) -> Option<(String, String)> {
    let (a, b) = (a?, b?);
    (a.len() + b.len() <= max_vertices).then(|| (canonical_form(a).code, canonical_form(b).code))
}

/// `1/2 sum |p - q|` of two normalised count tables; 1 when either is empty.
pub fn total_variation<K: Ord + std::hash::Hash + Clone>(p: &HashMap<K, usize>, q: &HashMap<K, usize>) -> f64 {
    let (np, nq) = (p.values().sum::<usize>(), q.values().sum::<usize>());
    if np == 0 || nq == 0 {
        return 1.0;
    }
    // sorted keys keep the floating-point sum order fixed
    let mut joint: BTreeMap<&K, (usize, usize)> = BTreeMap::new();
    for (k, &c) in p {
        joint.entry(k).or_default().0 = c;
    }
    for (k, &c) in q {
        joint.entry(k).or_default().1 = c;
    }
    0.5 * joint
        .values()
        .map(|&(a, b)| (a as f64 / np as f64 - b as f64 / nq as f64).abs())
        .sum::<f64>()
}
