use crate::error::{invalid, Result};

/// Coefficients `a_0..=a_N` of a truncated formal power series.
#[derive(Clone, Debug, PartialEq)]
pub struct TruncatedSeries {
    coeffs: Vec<f64>,
}

impl TruncatedSeries {
    pub fn new(coeffs: Vec<f64>) -> Result<Self> {
        if coeffs.is_empty() {
            return invalid("series needs at least one coefficient");
        }
        if coeffs.iter().any(|c| !c.is_finite()) {
            return invalid("series coefficients must be finite");
        }
        Ok(Self { coeffs })
    }

    /// The constant series 1 truncated at degree `n`.
    pub fn one(n: usize) -> Self {
        let mut coeffs = vec![0.0; n + 1];
        coeffs[0] = 1.0;
        Self { coeffs }
    }

    pub fn truncation(&self) -> usize {
        self.coeffs.len() - 1
    }

    pub fn coeffs(&self) -> &[f64] {
        &self.coeffs
    }

    pub fn coeff(&self, k: usize) -> f64 {
        self.coeffs.get(k).copied().unwrap_or(0.0)
    }

    /// `sum_k a_k x^k` together with the last retained term.
    pub fn eval_with_tail(&self, x: f64) -> (f64, f64) {
        let mut sum = 0.0;
        let mut power = 1.0;
        let mut last = 0.0;
        for &a in &self.coeffs {
            last = a * power;
            sum += last;
            power *= x;
        }
        (sum, last)
    }

    pub fn eval(&self, x: f64) -> f64 {
        self.eval_with_tail(x).0
    }

    /// `exp(g)` for `g` with zero constant term, from `n h_n = sum_k k g_k h_{n-k}`.
    pub fn exp(&self) -> Result<Self> {
        if self.coeffs[0] != 0.0 {
            return invalid("series exponential needs a zero constant term");
        }
        let n = self.truncation();
        let g = &self.coeffs;
        let mut h = vec![0.0; n + 1];
        h[0] = 1.0;
        for m in 1..=n {
            let mut acc = 0.0;
            for k in 1..=m {
                acc += k as f64 * g[k] * h[m - k];
            }
            h[m] = acc / m as f64;
        }
        Ok(Self { coeffs: h })
    }

    /// Rounds every coefficient after checking it is integral to a relative 1e-6.
    pub fn rounded_counts(&self) -> Result<Vec<f64>> {
        self.coeffs
            .iter()
            .enumerate()
            .map(|(k, &c)| {
                let r = c.round();
                if c < 0.0 || (c - r).abs() > 1e-6 * r.abs().max(1.0) {
                    invalid(format!("coefficient {k} = {c} is not a non-negative integer"))
                } else {
                    Ok(r)
                }
            })
            .collect()
    }
}

/// One depth step of the rooted-tree generating function:
/// `phi_{d+1}(x) = exp( sum_{j>=1} x^j phi_d(x^j) / j )`, truncated at degree `n`.
pub fn phi_step(phi: &TruncatedSeries, n: usize) -> Result<TruncatedSeries> {
    if phi.coeff(0) < 1.0 {
        return invalid("phi_d must have constant coefficient >= 1");
    }
    let mut g = vec![0.0; n + 1];
    for j in 1..=n {
        // x^j phi(x^j) / j contributes phi_m / j at degree j (m + 1)
        let inv_j = 1.0 / j as f64;
        for m in 0.. {
            let deg = j * (m + 1);
            if deg > n {
                break;
            }
            g[deg] += phi.coeff(m) * inv_j;
        }
    }
    TruncatedSeries { coeffs: g }.exp()
}

/// `[phi_0, ..., phi_{d_max}]` truncated at degree `n`; the coefficient of
/// `x^{k}` in `phi_d` is the number of rooted trees with `k + 1` vertices
/// and height at most `d`.
pub fn phi_sequence(d_max: usize, n: usize) -> Result<Vec<TruncatedSeries>> {
    let mut out = vec![TruncatedSeries::one(n)];
    for _ in 0..d_max {
        let next = phi_step(out.last().unwrap(), n)?;
        out.push(next);
    }
    Ok(out)
}

/// Height-restricted counts `A_{d,n}` for one depth.
#[derive(Clone, Debug, PartialEq)]
pub struct TreeCountTable {
    pub d: usize,
    /// `counts[n - 1] = A_{d,n}`.
    pub counts: Vec<f64>,
}

impl TreeCountTable {
    pub fn from_series(d: usize, phi: &TruncatedSeries) -> Result<Self> {
        Ok(Self {
            d,
            counts: phi.rounded_counts()?,
        })
    }

    pub fn get(&self, n: usize) -> f64 {
        self.counts[n - 1]
    }
}

/// Exact `A_{d,n}` for `n <= n_max <= 64` by the Euler transform
/// `n a_{d+1,n+1} = sum_{k=1}^{n} (sum_{m | k} m a_{d,m}) a_{d+1,n-k+1}`.
pub fn exact_counts(d: usize, n_max: usize) -> Result<Vec<u128>> {
    if n_max == 0 || n_max > 64 {
        return invalid(format!("exact counts support 1 <= n_max <= 64, got {n_max}"));
    }
    let overflow = || crate::Error::InvalidInput("exact tree count overflowed u128".into());
    // index by vertex count, slot 0 unused
    let mut prev = vec![0u128; n_max + 1];
    prev[1] = 1;
    for _ in 0..d {
        let mut weighted = vec![0u128; n_max + 1];
        for (k, w) in weighted.iter_mut().enumerate().skip(1) {
            for m in (1..=k).filter(|m| k % m == 0) {
                *w = w
                    .checked_add((m as u128).checked_mul(prev[m]).ok_or_else(overflow)?)
                    .ok_or_else(overflow)?;
            }
        }
        let mut next = vec![0u128; n_max + 1];
        next[1] = 1;
        for n in 1..n_max {
            let mut acc: u128 = 0;
            for k in 1..=n {
                acc = acc
                    .checked_add(weighted[k].checked_mul(next[n - k + 1]).ok_or_else(overflow)?)
                    .ok_or_else(overflow)?;
            }
            next[n + 1] = acc / n as u128;
        }
        prev = next;
    }
    Ok(prev[1..].to_vec())
}
