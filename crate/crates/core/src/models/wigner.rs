use crate::error::{invalid, Result};
use crate::rng::{self, Gaussian};

use super::{Permutation, SymMatrix};

/// Correlated Gaussian Wigner matrices.
///
/// `a2` is `a1 + sigma * Z` relabelled by `truth`:
/// `a2(truth(i), truth(j)) = (a1 + sigma Z)(i, j)`.
#[derive(Clone, Debug)]
pub struct CorrelatedWignerPair {
    pub a1: SymMatrix,
    pub a2: SymMatrix,
    pub truth: Permutation,
    pub sigma: f64,
}

impl CorrelatedWignerPair {
    /// `a1 + sigma * Z` in `a1`'s labels.
    pub fn a2_aligned(&self) -> SymMatrix {
        self.a2.permuted(&self.truth.inverse()).expect("sizes agree")
    }
}

/// GOE-type sample: off-diagonal variance `1/n`, diagonal variance `2/n`,
/// filled row by row over the upper triangle.
pub fn sample_wigner(n: usize, rng: &mut impl rand::RngCore) -> SymMatrix {
    let off = (1.0 / n as f64).sqrt();
    let diag = (2.0 / n as f64).sqrt();
    let mut g = Gaussian::new();
    SymMatrix::from_upper(n, |i, j| g.sample(rng) * if i == j { diag } else { off })
}

pub fn sample_correlated_wigner(n: usize, sigma: f64, seed: u64) -> Result<CorrelatedWignerPair> {
    if n < 2 {
        return invalid(format!("Wigner dimension must be at least 2, got {n}"));
    }
    if !(sigma.is_finite() && sigma >= 0.0) {
        return invalid(format!("sigma must be finite and >= 0, got {sigma}"));
    }
    let a1 = sample_wigner(n, &mut rng::rng_from_seed(seed));
    let z = sample_wigner(n, &mut rng::substream(seed, 2));
    let truth = Permutation::random(n, &mut rng::substream(seed, 1));
    let a2 = a1.add_scaled(sigma, &z)?.permuted(&truth)?;
    Ok(CorrelatedWignerPair {
        a1,
        a2,
        truth,
        sigma,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn noiseless_pair_is_a_relabelling() {
        let pair = sample_correlated_wigner(50, 0.0, 4).unwrap();
        for i in 0..50 {
            for j in 0..50 {
                assert_eq!(pair.a2.get(pair.truth.apply(i), pair.truth.apply(j)), pair.a1.get(i, j));
            }
        }
    }

    #[test]
    fn rejects_tiny_dimension() {
        assert!(sample_correlated_wigner(1, 0.1, 0).is_err());
        assert!(sample_correlated_wigner(3, -0.1, 0).is_err());
    }

    #[test]
    fn off_diagonal_variance() {
        let n = 1000;
        let pair = sample_correlated_wigner(n, 0.5, 11).unwrap();
        let mut sum = 0.0;
        let mut sq = 0.0;
        let mut count = 0.0;
        for i in 0..n {
            for j in (i + 1)..n {
                let x = pair.a1.get(i, j);
                sum += x;
                sq += x * x;
                count += 1.0;
            }
        }
        let mean = sum / count;
        let var = sq / count - mean * mean;
        assert!((var * n as f64 - 1.0).abs() < 0.1, "var*n = {}", var * n as f64);
        // mean within 4 standard errors of zero
        assert!(mean.abs() < 4.0 * (1.0 / (n as f64 * count)).sqrt());
    }
}
