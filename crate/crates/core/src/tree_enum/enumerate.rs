use std::collections::HashSet;

use crate::error::{invalid, Result};

use super::canonical::{canonical_form, tree_from_code};

/// Largest size accepted by the explicit enumeration.
pub const MAX_ENUMERATION_SIZE: usize = 20;

/// Rooted unlabeled trees generated explicitly, grouped by size.
#[derive(Clone, Debug)]
pub struct EnumeratedTrees {
    /// `by_size[n - 1]` holds `(code, height)` for every class with `n` vertices.
    pub by_size: Vec<Vec<(String, usize)>>,
}

impl EnumeratedTrees {
    /// Number of classes with `n` vertices and height at most `d`.
    pub fn count(&self, n: usize, d: usize) -> u64 {
        self.by_size[n - 1].iter().filter(|(_, h)| *h <= d).count() as u64
    }

    /// `[A_{d,1}, ..., A_{d,n_max}]`.
    pub fn counts_at_depth(&self, d: usize) -> Vec<u64> {
        (1..=self.by_size.len()).map(|n| self.count(n, d)).collect()
    }

    /// `[A_1, ..., A_{n_max}]`.
    pub fn counts(&self) -> Vec<u64> {
        self.by_size.iter().map(|v| v.len() as u64).collect()
    }
}

/// Generates every rooted unlabeled tree with at most `n_max` vertices by
/// attaching a leaf to each vertex of each smaller tree and deduplicating
/// by canonical code.
pub fn enumerate_trees(n_max: usize) -> Result<EnumeratedTrees> {
    if n_max == 0 {
        return invalid("n_max must be at least 1");
    }
    if n_max > MAX_ENUMERATION_SIZE {
        return invalid(format!(
            "explicit enumeration limited to n_max <= {MAX_ENUMERATION_SIZE}, got {n_max}"
        ));
    }
    let mut by_size = vec![vec![("()".to_string(), 0usize)]];
    for _ in 1..n_max {
        let prev = by_size.last().unwrap();
        let mut seen = HashSet::new();
        let mut next = Vec::new();
        for (code, _) in prev {
            let base = tree_from_code(code)?;
            for v in 0..base.len() {
                let mut t = base.clone();
                t.push_child(v);
                let c = canonical_form(&t);
                if seen.insert(c.code.clone()) {
                    next.push((c.code, c.depth));
                }
            }
        }
        next.sort_unstable();
        by_size.push(next);
    }
    Ok(EnumeratedTrees { by_size })
}

/// `[A_1, ..., A_{n_max}]` by explicit generation.
pub fn enumerate_rooted_trees(n_max: usize) -> Result<Vec<u64>> {
    Ok(enumerate_trees(n_max)?.counts())
}
