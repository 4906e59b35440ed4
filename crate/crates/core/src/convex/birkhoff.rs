use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};
use crate::models::{Permutation, SymMatrix};

use super::lap::{lap_solve, LapSolver, Sense};

pub const DEFAULT_MAX_ITERS: usize = 2000;

/// Default Frank–Wolfe stopping gap, scaled with the dimension.
pub fn default_gap_tol(n: usize) -> f64 {
    1e-6 * n as f64
}

/// Row and column sums must be within this of one.
const SUM_TOL: f64 = 1e-8;

/// Dense `n x n` doubly stochastic matrix, row-major. Row `i` is a vertex
/// of the first matrix, column `u` a vertex of the second.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DoublyStochastic {
    n: usize,
    entries: Vec<f64>,
}

impl DoublyStochastic {
    /// Validates the sums; entries down to `-1e-12` are clipped to zero.
    pub fn new(n: usize, mut entries: Vec<f64>) -> Result<Self> {
        if entries.len() != n * n {
            return Err(Error::DimensionMismatch {
                expected: n * n,
                got: entries.len(),
            });
        }
        for x in &mut entries {
            if !(x.is_finite() && *x >= -1e-12) {
                return invalid(format!("entry {x} is not a nonnegative real"));
            }
            *x = x.max(0.0);
        }
        let mut cols = vec![0.0; n];
        for i in 0..n {
            let row = &entries[i * n..(i + 1) * n];
            let sum: f64 = row.iter().sum();
            if (sum - 1.0).abs() > SUM_TOL {
                return invalid(format!("row {i} sums to {sum}"));
            }
            for (c, x) in cols.iter_mut().zip(row) {
                *c += x;
            }
        }
        if let Some(j) = cols.iter().position(|c| (c - 1.0).abs() > SUM_TOL) {
            return invalid(format!("column {j} sums to {}", cols[j]));
        }
        Ok(Self { n, entries })
    }

    /// `J / n`, the barycentre of the polytope.
    pub fn uniform(n: usize) -> Self {
        Self {
            n,
            entries: vec![1.0 / n as f64; n * n],
        }
    }

    /// The matrix with ones at `(i, pi(i))`.
    pub fn from_permutation(pi: &Permutation) -> Self {
        let n = pi.len();
        let mut entries = vec![0.0; n * n];
        for i in 0..n {
            entries[i * n + pi.apply(i)] = 1.0;
        }
        Self { n, entries }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.entries[i * self.n + j]
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.entries
    }

    pub fn row(&self, i: usize) -> &[f64] {
        &self.entries[i * self.n..(i + 1) * self.n]
    }
}

/// Outcome of [`fw_birkhoff`].
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct SolveReport {
    pub x: DoublyStochastic,
    /// `|X A2 - A1 X|_F^2` at the returned iterate.
    pub objective: f64,
    /// Frank–Wolfe duality gap at the returned iterate.
    pub fw_gap: f64,
    pub iterations: usize,
    pub converged: bool,
}

/// State handed to the observer of [`fw_birkhoff_observed`] before each step.
#[derive(Debug)]
pub struct FwIterate<'a> {
    pub iteration: usize,
    pub x: &'a [f64],
    pub objective: f64,
    pub gap: f64,
}

/// `c = alpha * a b + beta * c` for square row-major matrices.
fn gemm(n: usize, alpha: f64, a: &[f64], b: &[f64], beta: f64, c: &mut [f64]) {
    let s = n as isize;
    // SAFETY: all three slices hold n*n elements in row-major order, and `c`
    // does not alias `a` or `b` (it is borrowed mutably).
    unsafe {
        matrixmultiply::dgemm(
            n,
            n,
            n,
            alpha,
            a.as_ptr(),
            s,
            1,
            b.as_ptr(),
            s,
            1,
            beta,
            c.as_mut_ptr(),
            s,
            1,
        );
    }
}

/// `X B - A X` into `out`.
fn commutator(n: usize, x: &[f64], a: &[f64], b: &[f64], out: &mut [f64]) {
    gemm(n, 1.0, x, b, 0.0, out);
    gemm(n, -1.0, a, x, 1.0, out);
}

fn frob_dot(x: &[f64], y: &[f64]) -> f64 {
    x.iter().zip(y).map(|(a, b)| a * b).sum()
}

/// `|X A2 - A1 X|_F^2`. With `X` the matrix of the truth (ones at
/// `(i, truth(i))`) and `A2(truth(i), truth(j)) = A1(i, j)`, this vanishes.
pub fn birkhoff_objective(a1: &SymMatrix, a2: &SymMatrix, x: &DoublyStochastic) -> Result<f64> {
    check_dims(a1, a2)?;
    if x.n() != a1.n() {
        return Err(Error::DimensionMismatch {
            expected: a1.n(),
            got: x.n(),
        });
    }
    let n = a1.n();
    let mut r = vec![0.0; n * n];
    commutator(n, x.as_slice(), a1.as_slice(), a2.as_slice(), &mut r);
    Ok(frob_dot(&r, &r))
}

/// Gradient `2 (R A2 - A1 R)` of [`birkhoff_objective`] at a dense `x`,
/// with `R = X A2 - A1 X`.
pub fn birkhoff_gradient(a1: &SymMatrix, a2: &SymMatrix, x: &[f64]) -> Result<Vec<f64>> {
    check_dims(a1, a2)?;
    let n = a1.n();
    if x.len() != n * n {
        return Err(Error::DimensionMismatch {
            expected: n * n,
            got: x.len(),
        });
    }
    let mut r = vec![0.0; n * n];
    let mut g = vec![0.0; n * n];
    commutator(n, x, a1.as_slice(), a2.as_slice(), &mut r);
    commutator(n, &r, a1.as_slice(), a2.as_slice(), &mut g);
    g.iter_mut().for_each(|v| *v *= 2.0);
    Ok(g)
}

fn check_dims(a1: &SymMatrix, a2: &SymMatrix) -> Result<()> {
    if a1.n() != a2.n() {
        return Err(Error::DimensionMismatch {
            expected: a1.n(),
            got: a2.n(),
        });
    }
    Ok(())
}

/// Frank–Wolfe on the Birkhoff polytope for `min |X A2 - A1 X|_F^2`,
/// starting from `J/n`. The linear oracle is an assignment problem and the
/// step is an exact line search, since the objective is quadratic.
pub fn fw_birkhoff(a1: &SymMatrix, a2: &SymMatrix, max_iters: usize, gap_tol: f64) -> Result<SolveReport> {
    fw_birkhoff_observed(a1, a2, max_iters, gap_tol, |_| {})
}

/// `P A2 - A1 P` for the matrix `P` of `pi`, in O(n^2).
fn vertex_commutator(a1: &SymMatrix, a2: &SymMatrix, pi: &Permutation, out: &mut [f64]) {
    let n = pi.len();
    let inverse = pi.inverse();
    for i in 0..n {
        let row2 = a2.row(pi.apply(i));
        let row1 = a1.row(i);
        let o = &mut out[i * n..(i + 1) * n];
        for j in 0..n {
            o[j] = row2[j] - row1[inverse.apply(j)];
        }
    }
}

/// [`fw_birkhoff`] calling `observe` with every iterate, including the last.
pub fn fw_birkhoff_observed(
    a1: &SymMatrix,
    a2: &SymMatrix,
    max_iters: usize,
    gap_tol: f64,
    mut observe: impl FnMut(&FwIterate<'_>),
) -> Result<SolveReport> {
    check_dims(a1, a2)?;
    if !(gap_tol >= 0.0) {
        return invalid(format!("gap tolerance must be >= 0, got {gap_tol}"));
    }
    let n = a1.n();
    if n == 0 {
        return invalid("empty matrices");
    }
    let (m1, m2) = (a1.as_slice(), a2.as_slice());
    let mut x = vec![1.0 / n as f64; n * n];
    let mut r = vec![0.0; n * n];
    let mut g = vec![0.0; n * n];
    let mut e = vec![0.0; n * n];
    commutator(n, &x, m1, m2, &mut r);
    let mut oracle = LapSolver::new();
    let mut iteration = 0;
    let (gap, converged) = loop {
        // the residual is updated in place; refresh it now and then
        if iteration > 0 && iteration % 32 == 0 {
            commutator(n, &x, m1, m2, &mut r);
        }
        commutator(n, &r, m1, m2, &mut g);
        let toward = oracle.solve(&g, n, Sense::Minimize)?;
        // <G, X - P> = 2 <R, (X A2 - A1 X) - (P A2 - A1 P)>
        vertex_commutator(a1, a2, &toward, &mut e);
        let gap = (2.0 * (frob_dot(&r, &r) - frob_dot(&r, &e))).max(0.0);
        let objective = frob_dot(&r, &r);
        observe(&FwIterate {
            iteration,
            x: &x,
            objective,
            gap,
        });
        if gap <= gap_tol {
            break (gap, true);
        }
        if iteration == max_iters {
            break (gap, false);
        }
        // E = (P A2 - A1 P) - R is the change of R along P - X
        for (ei, ri) in e.iter_mut().zip(&r) {
            *ei -= ri;
        }
        let re = frob_dot(&r, &e);
        let ee = frob_dot(&e, &e);
        let step = if ee > 0.0 { (-re / ee).clamp(0.0, 1.0) } else { 0.0 };
        if step == 0.0 {
            break (gap, false);
        }
        x.iter_mut().for_each(|v| *v *= 1.0 - step);
        for i in 0..n {
            x[i * n + toward.apply(i)] += step;
        }
        for (ri, ei) in r.iter_mut().zip(&e) {
            *ri += step * ei;
        }
        iteration += 1;
    };
    commutator(n, &x, m1, m2, &mut r);
    Ok(SolveReport {
        x: DoublyStochastic::new(n, x)?,
        objective: frob_dot(&r, &r),
        fw_gap: gap,
        iterations: iteration,
        converged,
    })
}

/// Per-row argmax, ties to the smallest column. Not necessarily a bijection.
pub fn round_argmax(x: &DoublyStochastic) -> Vec<usize> {
    (0..x.n())
        .map(|i| {
            let row = x.row(i);
            let mut best = 0;
            for (j, &v) in row.iter().enumerate() {
                if v > row[best] {
                    best = j;
                }
            }
            best
        })
        .collect()
}

/// The permutation maximising `sum_i X(i, pi(i))`.
pub fn round_lap(x: &DoublyStochastic) -> Permutation {
    lap_solve(x.as_slice(), x.n(), Sense::Maximize).expect("doubly stochastic entries are finite")
}

/// `|X - P|_F^2` for `P` the matrix of `truth`.
pub fn frobenius_gap(x: &DoublyStochastic, truth: &Permutation) -> Result<f64> {
    if truth.len() != x.n() {
        return Err(Error::DimensionMismatch {
            expected: x.n(),
            got: truth.len(),
        });
    }
    let mut total = 0.0;
    for i in 0..x.n() {
        for (j, &v) in x.row(i).iter().enumerate() {
            let p = if truth.apply(i) == j { 1.0 } else { 0.0 };
            total += (v - p) * (v - p);
        }
    }
    Ok(total)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn doubly_stochastic_checks() {
        assert!(DoublyStochastic::new(2, vec![0.5, 0.5, 0.5, 0.5]).is_ok());
        assert!(DoublyStochastic::new(2, vec![1.0, 0.0, 1.0, 0.0]).is_err());
        assert!(DoublyStochastic::new(2, vec![1.1, -0.1, -0.1, 1.1]).is_err());
        let x = DoublyStochastic::new(2, vec![1.0 + 1e-13, -1e-13, -1e-13, 1.0 + 1e-13]).unwrap();
        assert_eq!(x.get(0, 1), 0.0);
    }

    #[test]
    fn rounding_examples() {
        let pi = Permutation::new(vec![2, 0, 1]).unwrap();
        let x = DoublyStochastic::from_permutation(&pi);
        assert_eq!(round_argmax(&x), vec![2, 0, 1]);
        assert_eq!(round_lap(&x), pi);
        let j = DoublyStochastic::uniform(4);
        assert_eq!(round_argmax(&j), vec![0; 4]);
        assert_eq!(round_lap(&j), Permutation::identity(4));
        let x = DoublyStochastic::new(3, vec![0.6, 0.4, 0.0, 0.4, 0.6, 0.0, 0.0, 0.0, 1.0]).unwrap();
        assert_eq!(round_argmax(&x)[0], 0);
    }

    #[test]
    fn frobenius_gap_examples() {
        let pi = Permutation::new(vec![1, 2, 0, 3]).unwrap();
        let x = DoublyStochastic::from_permutation(&pi);
        assert_eq!(frobenius_gap(&x, &pi).unwrap(), 0.0);
        let swapped = Permutation::new(vec![2, 1, 0, 3]).unwrap();
        assert_eq!(frobenius_gap(&DoublyStochastic::from_permutation(&swapped), &pi).unwrap(), 4.0);
    }

    #[test]
    fn zero_matrices_stop_immediately() {
        let z = SymMatrix::zeros(5);
        let rep = fw_birkhoff(&z, &z, 100, 1e-9).unwrap();
        assert_eq!(rep.iterations, 0);
        assert_eq!(rep.objective, 0.0);
        assert!(rep.converged);
        assert_eq!(rep.x, DoublyStochastic::uniform(5));
    }
}
