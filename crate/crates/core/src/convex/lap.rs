use std::collections::VecDeque;

use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};
use crate::models::Permutation;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Sense {
    Minimize,
    Maximize,
}

/// Optimal assignment `i -> pi(i)` for a dense row-major `n x n` cost matrix.
///
/// Among optimal assignments the lexicographically smallest
/// `(pi(0), pi(1), ...)` is returned, so ties resolve the same way on every
/// platform (`J/n` maximised gives the identity).
pub fn lap_solve(cost: &[f64], n: usize, sense: Sense) -> Result<Permutation> {
    LapSolver::new().solve(cost, n, sense)
}

/// Assignment solver that keeps its column potentials between calls, so a
/// sequence of similar cost matrices (as in Frank–Wolfe) starts each solve
/// from nearly optimal duals. Results equal those of [`lap_solve`].
#[derive(Clone, Debug, Default)]
pub struct LapSolver {
    v: Vec<f64>,
}

impl LapSolver {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn solve(&mut self, cost: &[f64], n: usize, sense: Sense) -> Result<Permutation> {
        if cost.len() != n * n {
            return Err(Error::DimensionMismatch {
                expected: n * n,
                got: cost.len(),
            });
        }
        if let Some(k) = cost.iter().position(|x| !x.is_finite()) {
            return invalid(format!("non-finite cost at ({}, {})", k / n, k % n));
        }
        if n == 0 {
            return Ok(Permutation::identity(0));
        }
        let c: Vec<f64> = match sense {
            Sense::Minimize => cost.to_vec(),
            Sense::Maximize => cost.iter().map(|x| -x).collect(),
        };
        if self.v.len() != n {
            self.v = vec![0.0; n];
        }
        let (mut assign, u) = hungarian(&c, n, &mut self.v);
        let scale = c.iter().fold(0.0f64, |m, x| m.max(x.abs())).max(1.0);
        let eps = 1e-10 * scale;
        lexicographic_refine(&c, n, &u, &self.v, eps, &mut assign);
        Permutation::new(assign)
    }
}

/// Shortest augmenting path Hungarian method from the column potentials
/// `v` (any values; row potentials are derived so the duals are feasible).
/// Returns the assignment and the row potentials, and leaves optimal column
/// potentials in `v`: `c(i,j) - u(i) - v(j) >= 0`, tight on the assignment.
fn hungarian(c: &[f64], n: usize, v_cols: &mut [f64]) -> (Vec<usize>, Vec<f64>) {
    // 1-based with a virtual column 0, as in the classical formulation
    let mut u = vec![0.0; n + 1];
    let mut v = vec![0.0; n + 1];
    v[1..].copy_from_slice(v_cols);
    let mut owner = vec![0usize; n + 1];
    let mut row_col = vec![0usize; n + 1];
    // row reduction, then keep every tight edge that lands on a free column
    for i in 1..=n {
        let row = &c[(i - 1) * n..i * n];
        let mut best = 1;
        let mut best_val = f64::INFINITY;
        for j in 1..=n {
            let r = row[j - 1] - v[j];
            if r < best_val {
                best_val = r;
                best = j;
            }
        }
        u[i] = best_val;
        if owner[best] == 0 {
            owner[best] = i;
            row_col[i] = best;
        }
    }
    let mut way = vec![0usize; n + 1];
    let mut minv = vec![0.0; n + 1];
    let mut used = vec![false; n + 1];
    for i in 1..=n {
        if row_col[i] != 0 {
            continue;
        }
        owner[0] = i;
        let mut j0 = 0;
        minv.fill(f64::INFINITY);
        used.fill(false);
        loop {
            used[j0] = true;
            let i0 = owner[j0];
            let row = &c[(i0 - 1) * n..i0 * n];
            let mut delta = f64::INFINITY;
            let mut j1 = 0;
            for j in 1..=n {
                if used[j] {
                    continue;
                }
                let cur = row[j - 1] - u[i0] - v[j];
                if cur < minv[j] {
                    minv[j] = cur;
                    way[j] = j0;
                }
                if minv[j] < delta {
                    delta = minv[j];
                    j1 = j;
                }
            }
            for j in 0..=n {
                if used[j] {
                    u[owner[j]] += delta;
                    v[j] -= delta;
                } else {
                    minv[j] -= delta;
                }
            }
            j0 = j1;
            if owner[j0] == 0 {
                break;
            }
        }
        loop {
            let j1 = way[j0];
            owner[j0] = owner[j1];
            j0 = j1;
            if j0 == 0 {
                break;
            }
        }
        for j in 1..=n {
            row_col[owner[j]] = j;
        }
    }
    let mut assign = vec![0; n];
    for j in 1..=n {
        assign[owner[j] - 1] = j - 1;
    }
    v_cols.copy_from_slice(&v[1..]);
    (assign, u[1..].to_vec())
}

/// Every optimal assignment uses only edges that are tight for an optimal
/// dual, so the lexicographically smallest one is found by moving each row,
/// in order, to its smallest tight column that still admits a perfect
/// matching of the later rows (an alternating path in the tight graph).
fn lexicographic_refine(c: &[f64], n: usize, u: &[f64], v: &[f64], eps: f64, assign: &mut [usize]) {
    let tight = |i: usize, j: usize| c[i * n + j] - u[i] - v[j] <= eps;
    let mut owner = vec![0usize; n];
    for (i, &j) in assign.iter().enumerate() {
        owner[j] = i;
    }
    let mut from = vec![usize::MAX; n];
    let mut queue = VecDeque::new();
    for i in 0..n {
        for target in 0..assign[i] {
            // columns of earlier rows are fixed
            if owner[target] < i || !tight(i, target) {
                continue;
            }
            // look for a path that hands the owner of `target` a
            // replacement, ending at the column i gives up
            let freed = assign[i];
            from.fill(usize::MAX);
            queue.clear();
            let start = owner[target];
            queue.push_back(start);
            let mut found = None;
            'bfs: while let Some(x) = queue.pop_front() {
                for y in 0..n {
                    if y == target || from[y] != usize::MAX || !tight(x, y) {
                        continue;
                    }
                    if y == freed {
                        from[y] = x;
                        found = Some(y);
                        break 'bfs;
                    }
                    let r = owner[y];
                    if r > i {
                        from[y] = x;
                        queue.push_back(r);
                    }
                }
            }
            let Some(mut y) = found else { continue };
            // rotate along the path back to `start`
            loop {
                let x = from[y];
                let prev = assign[x];
                assign[x] = y;
                owner[y] = x;
                if x == start {
                    break;
                }
                y = prev;
            }
            assign[i] = target;
            owner[target] = i;
            break;
        }
    }
}

/// Total cost of `pi` under a row-major cost matrix.
pub fn assignment_cost(cost: &[f64], n: usize, pi: &Permutation) -> f64 {
    (0..n).map(|i| cost[i * n + pi.apply(i)]).sum()
}
