use crate::error::{invalid, Result};

use super::series::{phi_sequence, TruncatedSeries};

/// Default series truncation degree.
pub const DEFAULT_TRUNCATION: usize = 400;

/// `KL_d(infinity, s)` together with the truncation diagnostic.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct KlInfinity {
    pub value: f64,
    /// Set when the last retained series term exceeds `1e-12` of the partial sum.
    pub tail_flag: bool,
}

fn check_s(s: f64) -> Result<()> {
    if !(0.0..1.0).contains(&s) {
        return invalid(format!("s must lie in [0,1), got {s}"));
    }
    Ok(())
}

/// Cached `phi_0..=phi_{d_max}` for repeated divergence evaluations.
#[derive(Clone, Debug)]
pub struct PhiTable {
    phis: Vec<TruncatedSeries>,
}

impl PhiTable {
    pub fn new(d_max: usize, truncation: usize) -> Result<Self> {
        Ok(Self {
            phis: phi_sequence(d_max, truncation)?,
        })
    }

    pub fn d_max(&self) -> usize {
        self.phis.len() - 1
    }

    pub fn phi(&self, d: usize) -> &TruncatedSeries {
        &self.phis[d]
    }

    /// `1/2 ln phi_d(s^2)`.
    pub fn kl_infinity(&self, d: usize, s: f64) -> Result<KlInfinity> {
        check_s(s)?;
        if d > self.d_max() {
            return invalid(format!("depth {d} beyond table depth {}", self.d_max()));
        }
        let (sum, last) = self.phis[d].eval_with_tail(s * s);
        Ok(KlInfinity {
            value: 0.5 * sum.ln(),
            tail_flag: last > 1e-12 * sum,
        })
    }

    /// `sum_{n} A_{d,n} * (-1/2) ln(1 - s^{2n})` over `n <= truncation`.
    pub fn kl_gaussian_sum(&self, d: usize, s: f64) -> Result<f64> {
        check_s(s)?;
        if d > self.d_max() {
            return invalid(format!("depth {d} beyond table depth {}", self.d_max()));
        }
        let phi = &self.phis[d];
        let s2 = s * s;
        let mut total = 0.0;
        let mut power = 1.0;
        for n in 1..=phi.truncation() {
            power *= s2;
            if power == 0.0 {
                break;
            }
            total += phi.coeff(n - 1) * -0.5 * (-power).ln_1p();
        }
        Ok(total)
    }

    /// Classifies the sequence `KL_0(inf,s), ..., KL_{d_max}(inf,s)`.
    pub fn divergence(&self, s: f64) -> Result<Divergence> {
        let values = (0..=self.d_max())
            .map(|d| self.kl_infinity(d, s).map(|k| k.value))
            .collect::<Result<Vec<_>>>()?;
        Ok(classify_curve(&values))
    }
}

/// `KL_d(infinity, s) = 1/2 ln( sum_n A_{d,n} s^{2(n-1)} )`.
pub fn kl_infinity(d: usize, s: f64, truncation: usize) -> Result<KlInfinity> {
    check_s(s)?;
    PhiTable::new(d, truncation)?.kl_infinity(d, s)
}

/// Gaussian-limit divergence summed over trees of depth at most `d`.
pub fn kl_gaussian_sum(d: usize, s: f64, truncation: usize) -> Result<f64> {
    check_s(s)?;
    PhiTable::new(d, truncation)?.kl_gaussian_sum(d, s)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Divergence {
    Divergent,
    Convergent,
    Undecided,
}

/// Value above which a curve is declared divergent.
pub const DIVERGENCE_LEVEL: f64 = 10.0;
/// Increment below which a curve is declared convergent.
pub const CONVERGENCE_INCREMENT: f64 = 1e-6;
/// Consecutive increment growths that declare divergence.
pub const GROWTH_RUN: usize = 3;

/// Scans a curve in increasing depth and reports the first decisive event:
/// a value above [`DIVERGENCE_LEVEL`], [`GROWTH_RUN`] consecutive growing
/// increments, or an increment below [`CONVERGENCE_INCREMENT`].
pub fn classify_curve(values: &[f64]) -> Divergence {
    let mut run = 0;
    let mut prev_inc: Option<f64> = None;
    for (k, &v) in values.iter().enumerate() {
        if !v.is_finite() || v > DIVERGENCE_LEVEL {
            return Divergence::Divergent;
        }
        if k == 0 {
            continue;
        }
        let inc = v - values[k - 1];
        if inc.abs() < CONVERGENCE_INCREMENT {
            return Divergence::Convergent;
        }
        if let Some(p) = prev_inc {
            if inc > p {
                run += 1;
                if run >= GROWTH_RUN {
                    return Divergence::Divergent;
                }
            } else {
                run = 0;
            }
        }
        prev_inc = Some(inc);
    }
    Divergence::Undecided
}

/// Bisection on `s` in `[0, 1]` of the divergence indicator over depths
/// `0..=d_max`; curves that stay undecided count as bounded. Returns the
/// final bracket midpoint.
pub fn threshold_locator(d_max: usize, truncation: usize, tol: f64) -> Result<f64> {
    if !(tol > 0.0) {
        return invalid(format!("tolerance must be positive, got {tol}"));
    }
    let (mut lo, mut hi) = (0.0f64, 1.0f64);
    if hi - lo <= tol {
        return Ok(0.5 * (lo + hi));
    }
    let table = PhiTable::new(d_max, truncation)?;
    while hi - lo > tol {
        let mid = 0.5 * (lo + hi);
        if table.divergence(mid)? == Divergence::Divergent {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    Ok(0.5 * (lo + hi))
}

/// `A_{n-1} / A_n` from the stabilised recursion.
pub fn count_ratio(n: usize) -> Result<f64> {
    if n < 2 {
        return invalid("count ratio needs n >= 2");
    }
    let phi = phi_sequence(n - 1, n - 1)?;
    let last = &phi[n - 1];
    Ok(last.coeff(n - 2) / last.coeff(n - 1))
}

/// Estimate of Otter's constant from `A_{n-1}/A_n` with the
/// `n^{-3/2}` polynomial factor of `A_n ~ C n^{-3/2} alpha^{-n}` removed:
/// `alpha ~ (A_{n-1}/A_n) ((n-1)/n)^{3/2}`.
pub fn otter_estimate(n_max: usize) -> Result<f64> {
    if n_max < 30 {
        return invalid(format!("otter_estimate needs n_max >= 30, got {n_max}"));
    }
    corrected_ratio(n_max)
}

/// `(A_{n-1}/A_n) ((n-1)/n)^{3/2}` for any `n >= 2`.
pub fn corrected_ratio(n: usize) -> Result<f64> {
    let x = n as f64;
    Ok(count_ratio(n)? * ((x - 1.0) / x).powf(1.5))
}
