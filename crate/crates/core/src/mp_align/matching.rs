use std::io::Write;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::models::{neighborhood, Permutation, SparseGraph};

use super::messages::{MessageTable, TreePolicy};

/// Pairs `(i, u)` returned by the aligner. A vertex may appear in several
/// pairs; nothing forces the collection to be injective.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MatchSet {
    pub pairs: Vec<(usize, usize)>,
    pub lambda: f64,
    pub s: f64,
    pub d: usize,
    pub tau: f64,
}

impl MatchSet {
    pub fn len(&self) -> usize {
        self.pairs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.pairs.is_empty()
    }

    /// CSV with columns `i,u,is_correct`.
    pub fn write_csv(&self, mut w: impl Write, truth: &Permutation) -> Result<()> {
        let io = |e| Error::io("<match csv>", e);
        writeln!(w, "i,u,is_correct").map_err(io)?;
        for &(i, u) in &self.pairs {
            writeln!(w, "{i},{u},{}", (truth.apply(i) == u) as u8).map_err(io)?;
        }
        Ok(())
    }
}

/// `(correct, incorrect)` counts of a match set against the truth.
pub fn score_matches(m: &MatchSet, truth: &Permutation) -> (usize, usize) {
    let correct = m
        .pairs
        .iter()
        .filter(|&&(i, u)| i < truth.len() && truth.apply(i) == u)
        .count();
    (correct, m.pairs.len() - correct)
}

/// Whether the bipartite graph `adj` (rows to column lists) has a matching
/// of size at least `need`.
pub fn has_matching(adj: &[Vec<usize>], n_cols: usize, need: usize) -> bool {
    fn augment(r: usize, adj: &[Vec<usize>], seen: &mut [bool], owner: &mut [usize]) -> bool {
        for &c in &adj[r] {
            if seen[c] {
                continue;
            }
            seen[c] = true;
            if owner[c] == usize::MAX || augment(owner[c], adj, seen, owner) {
                owner[c] = r;
                return true;
            }
        }
        false
    }
    if need == 0 {
        return true;
    }
    let mut owner = vec![usize::MAX; n_cols];
    let mut seen = vec![false; n_cols];
    let mut size = 0;
    for r in 0..adj.len() {
        seen.iter_mut().for_each(|x| *x = false);
        if augment(r, adj, &mut seen, &mut owner) {
            size += 1;
            if size >= need {
                return true;
            }
        }
    }
    false
}

/// Depth-`d` classes of the edges pointing into each eligible vertex.
fn incoming_classes(g: &SparseGraph, msgs: &MessageTable, side: usize) -> Vec<Option<Vec<u32>>> {
    let d = msgs.depth();
    let edges = if side == 1 { msgs.edges1() } else { msgs.edges2() };
    (0..g.n())
        .into_par_iter()
        .map(|i| {
            if g.degree(i) < 3 {
                return None;
            }
            if msgs.tree_policy() == TreePolicy::Skip && !matches!(neighborhood(g, i, d + 1), Ok(Some(_))) {
                return None;
            }
            let classes: Vec<u32> = edges.incoming(i).filter_map(|e| msgs.local_class(side, d, e)).collect();
            (classes.len() >= 3).then_some(classes)
        })
        .collect()
}

/// Matches `i` to `u` when three distinct neighbours of each can be paired
/// one-to-one with every message at least `tau (lambda s)^d`.
pub fn match_vertices(g1: &SparseGraph, g2: &SparseGraph, msgs: &MessageTable, tau: f64) -> MatchSet {
    let d = msgs.depth();
    let threshold = tau * (msgs.lambda() * msgs.s()).powi(d as i32);
    let left = incoming_classes(g1, msgs, 1);
    let right = incoming_classes(g2, msgs, 2);
    let right: Vec<(usize, &Vec<u32>)> = right
        .iter()
        .enumerate()
        .filter_map(|(u, c)| c.as_ref().map(|c| (u, c)))
        .collect();
    let pairs: Vec<Vec<(usize, usize)>> = left
        .par_iter()
        .enumerate()
        .map(|(i, ci)| {
            let Some(ci) = ci else { return Vec::new() };
            let mut out = Vec::new();
            let mut adj: Vec<Vec<usize>> = vec![Vec::new(); ci.len()];
            for &(u, cu) in &right {
                let mut rows_hit = 0;
                for (r, &a) in ci.iter().enumerate() {
                    adj[r].clear();
                    for (c, &b) in cu.iter().enumerate() {
                        if msgs.class_value(d, a, b) >= threshold {
                            adj[r].push(c);
                        }
                    }
                    rows_hit += !adj[r].is_empty() as usize;
                }
                if rows_hit >= 3 && has_matching(&adj, cu.len(), 3) {
                    out.push((i, u));
                }
            }
            out
        })
        .collect();
    MatchSet {
        pairs: pairs.into_iter().flatten().collect(),
        lambda: msgs.lambda(),
        s: msgs.s(),
        d,
        tau,
    }
}
