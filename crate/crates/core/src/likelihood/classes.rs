use std::collections::HashMap;

use crate::models::RootedTree;

/// Isomorphism class of a depth-`delta` truncated rooted tree, stored as the
/// multiset of its children's depth-`(delta-1)` classes.
#[derive(Clone, Debug)]
pub struct ClassDef {
    /// `(child class, multiplicity)`, sorted by class id.
    pub children: Box<[(u32, u32)]>,
    pub degree: u32,
    /// Vertex count of the truncated tree.
    pub size: u64,
}

#[derive(Clone, Debug, Default)]
struct Level {
    index: HashMap<Box<[(u32, u32)]>, u32>,
    classes: Vec<ClassDef>,
}

/// Interner of truncated-tree classes, one id space per depth. Depth 0 has
/// the single class `0`: every tree is a bare root once truncated at depth 0.
#[derive(Clone, Debug)]
pub struct ClassTable {
    levels: Vec<Level>,
}

impl Default for ClassTable {
    fn default() -> Self {
        Self::new()
    }
}

impl ClassTable {
    pub fn new() -> Self {
        let mut root = Level::default();
        root.index.insert(Box::new([]), 0);
        root.classes.push(ClassDef {
            children: Box::new([]),
            degree: 0,
            size: 1,
        });
        Self { levels: vec![root] }
    }

    /// Class at `depth` whose children have the given depth-`(depth-1)`
    /// classes (in any order; the slice is sorted in place).
    pub fn intern(&mut self, depth: usize, children: &mut [u32]) -> u32 {
        assert!(depth > 0, "depth-0 trees all share class 0");
        while self.levels.len() <= depth {
            self.levels.push(Level::default());
        }
        children.sort_unstable();
        let mut runs: Vec<(u32, u32)> = Vec::new();
        for &c in children.iter() {
            match runs.last_mut() {
                Some((last, m)) if *last == c => *m += 1,
                _ => runs.push((c, 1)),
            }
        }
        let key: Box<[(u32, u32)]> = runs.into_boxed_slice();
        if let Some(&id) = self.levels[depth].index.get(&key) {
            return id;
        }
        let size = 1 + key
            .iter()
            .map(|&(c, m)| m as u64 * self.levels[depth - 1].classes[c as usize].size)
            .sum::<u64>();
        let level = &mut self.levels[depth];
        let id = level.classes.len() as u32;
        level.classes.push(ClassDef {
            degree: children.len() as u32,
            children: key.clone(),
            size,
        });
        level.index.insert(key, id);
        id
    }

    pub fn class(&self, depth: usize, id: u32) -> &ClassDef {
        &self.levels[depth].classes[id as usize]
    }

    pub fn count(&self, depth: usize) -> usize {
        self.levels.get(depth).map_or(0, |l| l.classes.len())
    }

    /// Class of `t` truncated at `depth`.
    pub fn classify(&mut self, t: &RootedTree, depth: usize) -> u32 {
        let height = t.depths();
        let mut prev = vec![0u32; t.len()];
        let mut cur = vec![0u32; t.len()];
        let mut scratch = Vec::new();
        for delta in 1..=depth {
            // only vertices at tree depth <= depth - delta are needed
            for v in (0..t.len()).rev() {
                if height[v] + delta > depth {
                    continue;
                }
                scratch.clear();
                scratch.extend(t.children(v).iter().map(|&c| prev[c]));
                cur[v] = self.intern(delta, &mut scratch);
            }
            std::mem::swap(&mut prev, &mut cur);
        }
        prev[0]
    }
}

/// Reusable buffers for [`Combiner::combine`].
#[derive(Clone, Debug, Default)]
pub struct Combiner {
    mult: Vec<u32>,
    stride: Vec<usize>,
    drop_rank: Vec<(u64, usize)>,
    weights: Vec<f64>,
    ks: Vec<u32>,
    dp: Vec<f64>,
    digits: Vec<u32>,
}

/// Outcome of one recursion step.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct StepValue {
    pub log_ratio: f64,
    pub capped: bool,
}

/// One side of a recursion step: child multiplicities and the size used to
/// decide which children a capped evaluation drops first.
pub struct Side<'a> {
    pub mult: &'a [u32],
    pub size: &'a [u64],
}

fn ln_add(a: f64, b: f64) -> f64 {
    if a == f64::NEG_INFINITY {
        return b;
    }
    if b == f64::NEG_INFINITY {
        return a;
    }
    let (hi, lo) = if a > b { (a, b) } else { (b, a) };
    hi + (lo - hi).exp().ln_1p()
}

/// Largest dynamic range (in log units, times matching size) handled by the
/// rescaled linear-space recursion before switching to log space.
const LINEAR_RANGE: f64 = 600.0;

impl Combiner {
    pub fn new() -> Self {
        Self::default()
    }

    /// `ln L` at a pair of roots from the child-pair log ratios `logw`
    /// (row-major, `a.mult.len()` rows by `b.mult.len()` columns).
    ///
    /// The injection sum is a sum over partial matchings between the two
    /// child lists. Children of one class are interchangeable, so the state
    /// records only how many children of each class are already matched.
    /// `state_cap` bounds the number of states; past it, the largest
    /// children of the smaller side are dropped and the result is flagged.
    pub fn combine(&mut self, lambda: f64, s: f64, a: Side<'_>, b: Side<'_>, logw: &[f64], state_cap: usize) -> StepValue {
        let (ra, rb) = (a.mult.len(), b.mult.len());
        debug_assert_eq!(logw.len(), ra * rb);
        let states = |m: &[u32]| m.iter().fold(1usize, |acc, &x| acc.saturating_mul(x as usize + 1));
        let swap = states(b.mult) < states(a.mult);
        let (small, large) = if swap { (&b, &a) } else { (&a, &b) };
        let (rs, rl) = (small.mult.len(), large.mult.len());

        self.mult.clear();
        self.mult.extend_from_slice(small.mult);
        let mut capped = false;
        if states(&self.mult) > state_cap {
            capped = true;
            self.drop_rank.clear();
            self.drop_rank.extend(small.size.iter().enumerate().map(|(i, &sz)| (sz, i)));
            self.drop_rank.sort_unstable_by(|x, y| y.cmp(x));
            let mut next = 0;
            while states(&self.mult) > state_cap {
                let i = self.drop_rank[next].1;
                if self.mult[i] == 0 {
                    next += 1;
                    continue;
                }
                self.mult[i] -= 1;
            }
        }
        let c_small: usize = self.mult.iter().map(|&m| m as usize).sum();
        let c_large: usize = large.mult.iter().map(|&m| m as usize).sum();

        let (base, lx) = if s >= 1.0 {
            if c_small != c_large {
                return StepValue {
                    log_ratio: f64::NEG_INFINITY,
                    capped,
                };
            }
            // only perfect matchings survive; weights enter unscaled
            (lambda - xlny_f(c_small, lambda.ln()), 0.0)
        } else {
            let l1s = (-s).ln_1p();
            (
                lambda * s + (c_small + c_large) as f64 * l1s,
                s.ln() - lambda.ln() - 2.0 * l1s,
            )
        };
        if lx == f64::NEG_INFINITY || c_small == 0 || c_large == 0 {
            // only the empty matching contributes
            let ok = s < 1.0 || c_small == 0;
            return StepValue {
                log_ratio: if ok { base } else { f64::NEG_INFINITY },
                capped,
            };
        }
        self.weights.clear();
        let mut hi = f64::NEG_INFINITY;
        let mut lo = f64::INFINITY;
        for i in 0..rs {
            for j in 0..rl {
                let w = if swap { logw[j * rb + i] } else { logw[i * rb + j] };
                let w = w + lx;
                if w.is_finite() {
                    hi = hi.max(w);
                    lo = lo.min(w);
                }
                self.weights.push(w);
            }
        }
        if hi == f64::NEG_INFINITY {
            let ok = s < 1.0 || c_small == 0;
            return StepValue {
                log_ratio: if ok { base } else { f64::NEG_INFINITY },
                capped,
            };
        }

        self.stride.clear();
        let mut total = 1usize;
        for &m in &self.mult {
            self.stride.push(total);
            total *= m as usize + 1;
        }
        self.ks.clear();
        self.ks.resize(total, 0);
        self.digits.clear();
        self.digits.resize(rs, 0);
        for t in 1..total {
            // mixed-radix increment
            let mut i = 0;
            loop {
                self.digits[i] += 1;
                if self.digits[i] <= self.mult[i] {
                    break;
                }
                self.digits[i] = 0;
                i += 1;
            }
            self.ks[t] = self.digits.iter().sum();
        }

        let k_max = c_small.min(c_large) as f64;
        let linear = (hi - lo) * k_max < LINEAR_RANGE;
        self.dp.clear();
        if linear {
            for w in self.weights.iter_mut() {
                *w = (*w - hi).exp();
            }
            self.dp.resize(total, 0.0);
            self.dp[0] = 1.0;
        } else {
            self.dp.resize(total, f64::NEG_INFINITY);
            self.dp[0] = 0.0;
        }

        for j in 0..rl {
            for _ in 0..large.mult[j] {
                for t in (1..total).rev() {
                    let mut rem = t;
                    let mut acc = if linear { 0.0 } else { f64::NEG_INFINITY };
                    for i in (0..rs).rev() {
                        let u = rem / self.stride[i];
                        rem %= self.stride[i];
                        if u == 0 {
                            continue;
                        }
                        let w = self.weights[i * rl + j];
                        // (m_i - (u_i - 1)) interchangeable children are free
                        let free = self.mult[i] - (u as u32 - 1);
                        let src = self.dp[t - self.stride[i]];
                        if linear {
                            acc += src * free as f64 * w;
                        } else if src > f64::NEG_INFINITY && w > f64::NEG_INFINITY {
                            acc = ln_add(acc, src + (free as f64).ln() + w);
                        }
                    }
                    if linear {
                        self.dp[t] += acc;
                    } else {
                        self.dp[t] = ln_add(self.dp[t], acc);
                    }
                }
            }
        }

        let mut sum = f64::NEG_INFINITY;
        for t in 0..total {
            let k = self.ks[t] as usize;
            if s >= 1.0 && k != c_small {
                continue;
            }
            let v = if linear {
                if self.dp[t] <= 0.0 {
                    continue;
                }
                self.dp[t].ln() + k as f64 * hi
            } else {
                self.dp[t]
            };
            sum = ln_add(sum, v);
        }
        StepValue {
            log_ratio: base + sum,
            capped,
        }
    }
}

fn xlny_f(k: usize, ln_v: f64) -> f64 {
    super::params::xlny(k, ln_v)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::tree_enum::tree_from_code;

    #[test]
    fn isomorphic_trees_share_classes() {
        let mut table = ClassTable::new();
        let a = tree_from_code("((())())").unwrap();
        let b = tree_from_code("(()(()))").unwrap();
        let c = tree_from_code("((()()))").unwrap();
        let (ia, ib, ic) = (table.classify(&a, 2), table.classify(&b, 2), table.classify(&c, 2));
        assert_eq!(ia, ib);
        assert_ne!(ia, ic);
        assert_eq!(table.class(2, ia).size, 4);
        // truncated at depth 1 they are stars with 2 and 1 leaves
        assert_ne!(table.classify(&a, 1), table.classify(&c, 1));
    }
}
