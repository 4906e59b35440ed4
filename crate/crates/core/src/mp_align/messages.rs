use std::collections::HashMap;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::likelihood::{ClassTable, Combiner, LikelihoodParams, Side, DEFAULT_DEGREE_CAP};
use crate::models::SparseGraph;

use super::edges::OrientedEdges;

/// Whether `d ln(lambda (2 - s)) < ln(n) / 2`, the regime in which radius-`d`
/// neighbourhoods are trees with high probability.
pub fn validate_depth(n: usize, lambda: f64, s: f64, d: usize) -> bool {
    if d == 0 {
        return true;
    }
    (d as f64) * (lambda * (2.0 - s)).ln() < (n as f64).ln() / 2.0
}

/// Handling of oriented neighbourhoods that contain cycles.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TreePolicy {
    /// Pairs whose neighbourhoods are not trees carry no message and
    /// vertices whose balls are not trees are never matched.
    Skip,
    /// Run the recursion on the non-backtracking unfolding regardless of
    /// cycles.
    Unfold,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct MpAlignConfig {
    pub tau: f64,
    pub tree_policy: TreePolicy,
    /// When set, pairs with value below `-prune_factor (lambda s)^delta`
    /// are dropped before the next depth.
    pub prune_factor: Option<f64>,
    pub memory_budget_bytes: u64,
    pub degree_cap: u32,
}

impl Default for MpAlignConfig {
    fn default() -> Self {
        Self {
            tau: 1.0,
            tree_policy: TreePolicy::Unfold,
            prune_factor: Some(10.0),
            memory_budget_bytes: 2 << 30,
            degree_cap: DEFAULT_DEGREE_CAP,
        }
    }
}

const ABSENT: u32 = u32::MAX;

/// Per-graph class assignment of oriented edges at every depth.
#[derive(Clone, Debug)]
struct EdgeClasses {
    edges: OrientedEdges,
    /// `local[delta][e]`: row (or column) of edge `e` in the depth-`delta`
    /// table, `ABSENT` when its neighbourhood is not a tree.
    local: Vec<Vec<u32>>,
    /// `global[delta][r]`: interned class of local index `r`.
    global: Vec<Vec<u32>>,
    /// Inverse of `global`, per depth.
    index: Vec<HashMap<u32, u32>>,
}

impl EdgeClasses {
    fn build(g: &SparseGraph, d: usize, policy: TreePolicy, table: &mut ClassTable) -> Self {
        let edges = OrientedEdges::new(g);
        let m = edges.len();
        let tree_depth = match policy {
            TreePolicy::Skip => edges.tree_depths(g, d),
            TreePolicy::Unfold => vec![d; m],
        };
        let mut local = vec![vec![0u32; m]];
        let mut global = vec![vec![0u32]];
        let mut index = vec![HashMap::from([(0u32, 0u32)])];
        let mut class_prev = vec![0u32; m];
        let mut scratch = Vec::new();
        for delta in 1..=d {
            let mut class_cur = vec![ABSENT; m];
            let mut loc = vec![ABSENT; m];
            let mut to_local: HashMap<u32, u32> = HashMap::new();
            let mut glob = Vec::new();
            for e in 0..m {
                if tree_depth[e] < delta {
                    continue;
                }
                scratch.clear();
                scratch.extend(edges.children(e).map(|f| class_prev[f]));
                debug_assert!(scratch.iter().all(|&c| c != ABSENT));
                let c = table.intern(delta, &mut scratch);
                class_cur[e] = c;
                loc[e] = *to_local.entry(c).or_insert_with(|| {
                    glob.push(c);
                    glob.len() as u32 - 1
                });
            }
            local.push(loc);
            global.push(glob);
            index.push(to_local);
            class_prev = class_cur;
        }
        Self {
            edges,
            local,
            global,
            index,
        }
    }

    fn rows(&self, delta: usize) -> usize {
        self.global[delta].len()
    }
}

/// Messages `ln L_delta` between oriented edges of two graphs for
/// `delta = 0..=depth`. Edges whose neighbourhoods are isomorphic share a
/// row, so each depth is stored as a dense table over class pairs.
#[derive(Clone, Debug)]
pub struct MessageTable {
    depth: usize,
    lambda: f64,
    s: f64,
    side1: EdgeClasses,
    side2: EdgeClasses,
    /// `values[delta]`, row-major over local classes; `-inf` marks pruned.
    values: Vec<Vec<f64>>,
    tree_policy: TreePolicy,
    /// Whether the depth fell outside the tree-like regime.
    pub depth_warning: bool,
    /// Number of class pairs whose evaluation hit the degree cap.
    pub capped_pairs: usize,
}

impl MessageTable {
    pub fn depth(&self) -> usize {
        self.depth
    }

    pub fn lambda(&self) -> f64 {
        self.lambda
    }

    pub fn s(&self) -> f64 {
        self.s
    }

    pub fn tree_policy(&self) -> TreePolicy {
        self.tree_policy
    }

    pub fn edges1(&self) -> &OrientedEdges {
        &self.side1.edges
    }

    pub fn edges2(&self) -> &OrientedEdges {
        &self.side2.edges
    }

    /// Message between oriented-edge ids at depth `delta`, `None` when
    /// absent (non-tree neighbourhood or pruned).
    pub fn get_by_id(&self, delta: usize, e1: usize, e2: usize) -> Option<f64> {
        if delta == 0 {
            return Some(0.0);
        }
        let a = self.side1.local[delta][e1];
        let b = self.side2.local[delta][e2];
        if a == ABSENT || b == ABSENT {
            return None;
        }
        let v = self.values[delta][a as usize * self.side2.rows(delta) + b as usize];
        v.is_finite().then_some(v)
    }

    /// Message between `(j -> i)` in `g1` and `(v -> u)` in `g2`.
    pub fn get(&self, g1: &SparseGraph, g2: &SparseGraph, delta: usize, (j, i): (usize, usize), (v, u): (usize, usize)) -> Option<f64> {
        let e1 = self.side1.edges.id(g1, j, i)?;
        let e2 = self.side2.edges.id(g2, v, u)?;
        self.get_by_id(delta, e1, e2)
    }

    /// Distinct neighbourhood classes on each side at `delta`.
    pub fn class_counts(&self, delta: usize) -> (usize, usize) {
        (self.side1.rows(delta), self.side2.rows(delta))
    }

    pub(crate) fn local_class(&self, side: usize, delta: usize, e: usize) -> Option<u32> {
        let v = if side == 1 {
            self.side1.local[delta][e]
        } else {
            self.side2.local[delta][e]
        };
        (v != ABSENT).then_some(v)
    }

    pub(crate) fn class_value(&self, delta: usize, a: u32, b: u32) -> f64 {
        self.values[delta][a as usize * self.side2.rows(delta) + b as usize]
    }
}

/// Runs the message recursion for `delta = 1..=p.d`.
pub fn compute_messages(g1: &SparseGraph, g2: &SparseGraph, p: &LikelihoodParams, cfg: &MpAlignConfig) -> Result<MessageTable> {
    p.validate()?;
    let mut table = ClassTable::new();
    let side1 = EdgeClasses::build(g1, p.d, cfg.tree_policy, &mut table);
    let side2 = EdgeClasses::build(g2, p.d, cfg.tree_policy, &mut table);
    let needed: u64 = (1..=p.d)
        .map(|delta| (side1.rows(delta) as u64) * (side2.rows(delta) as u64) * 8)
        .sum();
    if needed > cfg.memory_budget_bytes {
        return Err(Error::MemoryBudget {
            needed,
            budget: cfg.memory_budget_bytes,
        });
    }
    let state_cap = 1usize << cfg.degree_cap.clamp(1, 30);
    let mut values: Vec<Vec<f64>> = vec![vec![0.0]];
    let mut capped_pairs = 0usize;
    // children of each local class, as (local child class, multiplicity, size)
    let split = |side: &EdgeClasses, delta: usize| -> Vec<(Vec<u32>, Vec<u32>, Vec<u64>)> {
        side.global[delta]
            .iter()
            .map(|&c| {
                let def = table.class(delta, c);
                let mut rows = Vec::new();
                let mut mult = Vec::new();
                let mut size = Vec::new();
                for &(child, m) in def.children.iter() {
                    rows.push(side.index[delta - 1][&child]);
                    mult.push(m);
                    size.push(table.class(delta - 1, child).size);
                }
                (rows, mult, size)
            })
            .collect()
    };
    for delta in 1..=p.d {
        let kids1 = split(&side1, delta);
        let kids2 = split(&side2, delta);
        let cols = side2.rows(delta);
        let prev_cols = side2.rows(delta - 1);
        let prev = &values[delta - 1];
        let floor = cfg.prune_factor.map(|f| -f * (p.lambda * p.s).powi(delta as i32));
        let mut level = vec![0.0f64; side1.rows(delta) * cols];
        let capped: usize = level
            .par_chunks_mut(cols.max(1))
            .enumerate()
            .map_init(
                || (Combiner::new(), Vec::new()),
                |(comb, logw), (a, row)| {
                    let (ra, ma, sa) = &kids1[a];
                    let mut capped = 0;
                    for (b, out) in row.iter_mut().enumerate() {
                        let (rb, mb, sb) = &kids2[b];
                        logw.clear();
                        for &x in ra {
                            for &y in rb {
                                logw.push(prev[x as usize * prev_cols + y as usize]);
                            }
                        }
                        let v = comb.combine(
                            p.lambda,
                            p.s,
                            Side { mult: ma, size: sa },
                            Side { mult: mb, size: sb },
                            logw,
                            state_cap,
                        );
                        capped += v.capped as usize;
                        *out = match floor {
                            Some(f) if v.log_ratio < f => f64::NEG_INFINITY,
                            _ => v.log_ratio,
                        };
                    }
                    capped
                },
            )
            .sum();
        capped_pairs += capped;
        values.push(level);
    }
    Ok(MessageTable {
        depth: p.d,
        lambda: p.lambda,
        s: p.s,
        tree_policy: cfg.tree_policy,
        depth_warning: !validate_depth(g1.n().max(g2.n()), p.lambda, p.s, p.d),
        side1,
        side2,
        values,
        capped_pairs,
    })
}
