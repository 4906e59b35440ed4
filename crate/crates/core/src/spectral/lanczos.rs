use nalgebra::{DMatrix, SymmetricEigen};

use crate::error::{invalid, Error, Result};
use crate::models::{dot, SymMatrix};
use crate::rng::{gaussian_pair, rng_from_seed};

/// Default residual tolerance of [`leading_eigenvector`].
pub const DEFAULT_EIG_TOL: f64 = 1e-10;

/// Largest eigenpair of a symmetric matrix.
#[derive(Clone, Debug, PartialEq)]
pub struct LeadingEig {
    pub value: f64,
    /// Unit norm, largest-magnitude entry positive.
    pub vector: Vec<f64>,
    /// `value` minus the second Ritz value at convergence.
    pub gap: f64,
    pub iterations: usize,
    pub residual: f64,
    /// Set when `gap < 10 tol`.
    pub degenerate: bool,
}

fn norm(x: &[f64]) -> f64 {
    dot(x, x).sqrt()
}

fn orthogonalize(w: &mut [f64], basis: &[Vec<f64>]) {
    // two passes keep the basis orthogonal to rounding
    for _ in 0..2 {
        for q in basis {
            let c = dot(w, q);
            for (wi, qi) in w.iter_mut().zip(q) {
                *wi -= c * qi;
            }
        }
    }
}

fn random_unit(n: usize, seed: u64, basis: &[Vec<f64>]) -> Option<Vec<f64>> {
    let mut rng = rng_from_seed(seed);
    let mut v: Vec<f64> = (0..n.div_ceil(2))
        .flat_map(|_| {
            let (a, b) = gaussian_pair(&mut rng);
            [a, b]
        })
        .take(n)
        .collect();
    orthogonalize(&mut v, basis);
    let nv = norm(&v);
    if nv < 1e-8 {
        return None;
    }
    v.iter_mut().for_each(|x| *x /= nv);
    Some(v)
}

/// Lanczos iteration with full reorthogonalisation on `a + c I`, where `c`
/// bounds the spectral radius, so the wanted eigenvalue is the dominant one.
/// A breakdown (invariant subspace found) restarts from a fresh direction
/// orthogonal to the basis, so repeated top eigenvalues are still resolved.
pub fn leading_eigenvector(a: &SymMatrix, tol: f64) -> Result<LeadingEig> {
    let n = a.n();
    if n < 2 {
        return invalid("leading_eigenvector needs n >= 2");
    }
    if !(tol > 0.0) {
        return invalid(format!("tolerance must be positive, got {tol}"));
    }
    let shift = a.norm_inf();
    let scale = shift.max(f64::MIN_POSITIVE);
    let max_steps = n.min(10 * n);
    let mut basis: Vec<Vec<f64>> = Vec::new();
    let mut alpha: Vec<f64> = Vec::new();
    let mut beta: Vec<f64> = Vec::new();
    let mut q = random_unit(n, 0x1a2c_05e5, &[]).expect("nonzero start");
    let mut w = vec![0.0; n];
    let mut best = f64::INFINITY;
    let mut restarts = 0u64;
    let mut steps = 0;
    loop {
        a.matvec(&q, &mut w);
        for (wi, qi) in w.iter_mut().zip(&q) {
            *wi += shift * qi;
        }
        alpha.push(dot(&w, &q));
        basis.push(q);
        orthogonalize(&mut w, &basis);
        let b = norm(&w);
        steps += 1;
        let full = basis.len() == n;
        let check = full || steps % 8 == 0 || b <= 1e-12 * scale;
        if check && basis.len() >= 2 {
            let m = basis.len();
            let t = DMatrix::from_fn(m, m, |i, j| {
                if i == j {
                    alpha[i]
                } else if i + 1 == j {
                    beta[i]
                } else if j + 1 == i {
                    beta[j]
                } else {
                    0.0
                }
            });
            let eig = SymmetricEigen::new(t);
            let mut order: Vec<usize> = (0..m).collect();
            order.sort_by(|&x, &y| eig.eigenvalues[y].total_cmp(&eig.eigenvalues[x]));
            let top = order[0];
            let y = eig.eigenvectors.column(top);
            let mut v = vec![0.0; n];
            for (k, qk) in basis.iter().enumerate() {
                let c = y[k];
                for (vi, qi) in v.iter_mut().zip(qk) {
                    *vi += c * qi;
                }
            }
            let nv = norm(&v);
            v.iter_mut().for_each(|x| *x /= nv);
            let mut av = vec![0.0; n];
            a.matvec(&v, &mut av);
            let value = dot(&v, &av);
            let residual = av.iter().zip(&v).map(|(x, y)| (x - value * y).powi(2)).sum::<f64>().sqrt();
            best = best.min(residual);
            if residual <= tol {
                let second = eig.eigenvalues[order[1]] - shift;
                let gap = value - second;
                let imax = (0..n).max_by(|&x, &y| v[x].abs().total_cmp(&v[y].abs()).then(y.cmp(&x))).unwrap();
                if v[imax] < 0.0 {
                    v.iter_mut().for_each(|x| *x = -*x);
                }
                return Ok(LeadingEig {
                    value,
                    vector: v,
                    gap,
                    iterations: steps,
                    residual,
                    degenerate: gap < 10.0 * tol,
                });
            }
        }
        if full || steps >= max_steps {
            return Err(Error::NoConvergence {
                iterations: steps,
                residual: best,
            });
        }
        if b <= 1e-12 * scale {
            // invariant subspace: continue from a new orthogonal direction
            beta.push(0.0);
            loop {
                restarts += 1;
                if let Some(v) = random_unit(n, 0x1a2c_05e5 ^ restarts.wrapping_mul(0x9e37_79b9), &basis) {
                    q = v;
                    break;
                }
            }
        } else {
            beta.push(b);
            q = w.iter().map(|x| x / b).collect();
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn diagonal_example() {
        let a = SymMatrix::from_diagonal(&[3.0, 1.0]);
        let e = leading_eigenvector(&a, 1e-12).unwrap();
        assert!((e.value - 3.0).abs() < 1e-12);
        assert!((e.vector[0] - 1.0).abs() < 1e-12 && e.vector[1].abs() < 1e-12);
        assert!((e.gap - 2.0).abs() < 1e-10);
        assert!(!e.degenerate);
    }

    #[test]
    fn identity_is_flagged() {
        let e = leading_eigenvector(&SymMatrix::identity(50), 1e-10).unwrap();
        assert!((e.value - 1.0).abs() < 1e-12);
        assert!(e.degenerate);
    }

    #[test]
    fn rejects_tiny_inputs() {
        assert!(leading_eigenvector(&SymMatrix::identity(1), 1e-10).is_err());
    }
}
