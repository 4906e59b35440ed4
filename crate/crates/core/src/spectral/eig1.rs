use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::models::{dot, Permutation, SymMatrix};

use super::lanczos::{leading_eigenvector, LeadingEig};

fn check_dims(a1: &SymMatrix, a2: &SymMatrix) -> Result<()> {
    if a1.n() != a2.n() {
        return Err(Error::DimensionMismatch {
            expected: a1.n(),
            got: a2.n(),
        });
    }
    Ok(())
}

/// `sum_{i,j} A1(i,j) A2(pi(i), pi(j))`.
pub fn quadratic_objective(a1: &SymMatrix, a2: &SymMatrix, pi: &Permutation) -> Result<f64> {
    check_dims(a1, a2)?;
    if pi.len() != a1.n() {
        return Err(Error::DimensionMismatch {
            expected: a1.n(),
            got: pi.len(),
        });
    }
    let p = pi.as_slice();
    let mut gathered = vec![0.0; a1.n()];
    let mut total = 0.0;
    for i in 0..a1.n() {
        let row2 = a2.row(p[i]);
        for (g, &pj) in gathered.iter_mut().zip(p) {
            *g = row2[pj];
        }
        total += dot(a1.row(i), &gathered);
    }
    Ok(total)
}

/// Indices sorted by decreasing entry; equal entries keep index order.
fn descending_order(v: &[f64]) -> Vec<usize> {
    let mut idx: Vec<usize> = (0..v.len()).collect();
    idx.sort_by(|&x, &y| v[y].total_cmp(&v[x]));
    idx
}

/// The two order-matching candidates of EIG1.
pub fn eig1_candidates(v1: &[f64], v2: &[f64]) -> Result<(Permutation, Permutation)> {
    let n = v1.len();
    if v2.len() != n {
        return Err(Error::DimensionMismatch { expected: n, got: v2.len() });
    }
    let t1 = descending_order(v1);
    let t2 = descending_order(v2);
    let mut plus = vec![0; n];
    let mut minus = vec![0; n];
    for j in 0..n {
        plus[t1[j]] = t2[j];
        minus[t1[j]] = t2[n - 1 - j];
    }
    Ok((Permutation::new(plus)?, Permutation::new(minus)?))
}

/// Result of [`eig1_align`] with the eigen-decompositions behind it.
#[derive(Clone, Debug)]
pub struct Eig1Result {
    pub permutation: Permutation,
    pub eig1: LeadingEig,
    pub eig2: LeadingEig,
    /// Whether the order-reversing candidate won.
    pub reversed: bool,
}

/// EIG1: match the entries of the two leading eigenvectors by rank, in the
/// same or the reversed order, whichever gives the larger quadratic
/// objective (ties go to the same order).
pub fn eig1_align(a1: &SymMatrix, a2: &SymMatrix, tol: f64) -> Result<Eig1Result> {
    check_dims(a1, a2)?;
    let eig1 = leading_eigenvector(a1, tol)?;
    let eig2 = leading_eigenvector(a2, tol)?;
    let (permutation, reversed) = eig1_select(a1, a2, &eig1.vector, &eig2.vector)?;
    Ok(Eig1Result {
        permutation,
        eig1,
        eig2,
        reversed,
    })
}

/// The EIG1 choice for given eigenvectors: the better of the two rank
/// matchings under [`quadratic_objective`], and whether it is the reversed one.
pub fn eig1_select(a1: &SymMatrix, a2: &SymMatrix, v1: &[f64], v2: &[f64]) -> Result<(Permutation, bool)> {
    check_dims(a1, a2)?;
    if v1.len() != a1.n() || v2.len() != a1.n() {
        return Err(Error::DimensionMismatch {
            expected: a1.n(),
            got: if v1.len() != a1.n() { v1.len() } else { v2.len() },
        });
    }
    let (plus, minus) = eig1_candidates(v1, v2)?;
    let reversed = quadratic_objective(a1, a2, &minus)? > quadratic_objective(a1, a2, &plus)?;
    Ok(if reversed { (minus, true) } else { (plus, false) })
}

/// Decomposition of the noisy leading eigenvector against the clean one.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct PerturbStats {
    pub sigma: f64,
    /// `|v2' - <v1,v2'> v1| / |<v1,v2'>|`.
    pub s_magnitude: f64,
    /// `|<v1, v2'>|`.
    pub alignment: f64,
    pub degenerate: bool,
}

/// Compares the leading eigenvectors of `a1` and of the unscrambled noisy
/// matrix `a2_aligned` (noise level `sigma`, recorded as given).
pub fn perturbation_stats(a1: &SymMatrix, a2_aligned: &SymMatrix, sigma: f64, tol: f64) -> Result<PerturbStats> {
    check_dims(a1, a2_aligned)?;
    let e1 = leading_eigenvector(a1, tol)?;
    let e2 = leading_eigenvector(a2_aligned, tol)?;
    let c = dot(&e1.vector, &e2.vector);
    let orth: f64 = e2
        .vector
        .iter()
        .zip(&e1.vector)
        .map(|(y, x)| (y - c * x).powi(2))
        .sum::<f64>()
        .sqrt();
    Ok(PerturbStats {
        sigma,
        s_magnitude: orth / c.abs(),
        alignment: c.abs().min(1.0),
        degenerate: e1.degenerate || e2.degenerate,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn objective_examples() {
        let a = SymMatrix::from_upper(4, |i, j| (i * 3 + j) as f64 * 0.1 - 0.4);
        let id = Permutation::identity(4);
        assert!((quadratic_objective(&a, &a, &id).unwrap() - a.frobenius_sq()).abs() < 1e-12);
        let z = SymMatrix::zeros(4);
        let p = Permutation::new(vec![2, 0, 3, 1]).unwrap();
        assert_eq!(quadratic_objective(&a, &z, &p).unwrap(), 0.0);
    }

    #[test]
    fn candidates_follow_ranks() {
        let v1 = [0.3, -0.1, 0.9];
        let v2 = [0.9, 0.3, -0.1];
        let (plus, minus) = eig1_candidates(&v1, &v2).unwrap();
        assert_eq!(plus.as_slice(), &[1, 2, 0]);
        assert_eq!(minus.as_slice(), &[1, 0, 2]);
    }
}
