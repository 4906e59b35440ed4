use crate::error::{Error, Result};
use crate::models::Permutation;

/// Fraction of indices where `estimate` agrees with `truth`. `estimate` may
/// be any mapping, not necessarily a bijection.
pub fn overlap(estimate: &[usize], truth: &Permutation) -> Result<f64> {
    if estimate.len() != truth.len() {
        return Err(Error::DimensionMismatch {
            expected: truth.len(),
            got: estimate.len(),
        });
    }
    if estimate.is_empty() {
        return Ok(0.0);
    }
    let hits = estimate
        .iter()
        .zip(truth.as_slice())
        .filter(|(a, b)| a == b)
        .count();
    Ok(hits as f64 / estimate.len() as f64)
}
