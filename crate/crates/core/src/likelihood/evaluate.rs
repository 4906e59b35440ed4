use std::collections::HashMap;
use std::sync::Mutex;

use crate::error::{invalid, Result};
use crate::models::RootedTree;

use super::classes::{ClassTable, Combiner, Side, StepValue};
use super::params::LikelihoodParams;

/// Default bound on the number of children per side entering one recursion
/// step, expressed as `2^DEFAULT_DEGREE_CAP` matching states.
pub const DEFAULT_DEGREE_CAP: u32 = 16;

/// `ln L_d(t, t')` with the capped-evaluation flag.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct LikelihoodValue {
    pub log_ratio: f64,
    pub capped: bool,
}

/// Memoised evaluation of `ln L_delta` on pairs of interned classes.
#[derive(Clone, Debug)]
pub struct PairEvaluator {
    lambda: f64,
    s: f64,
    state_cap: usize,
    memo: Vec<HashMap<(u32, u32), StepValue>>,
    combiner: Combiner,
}

impl PairEvaluator {
    pub fn new(lambda: f64, s: f64, degree_cap: u32) -> Result<Self> {
        LikelihoodParams::new(lambda, s, 0)?;
        if degree_cap == 0 || degree_cap > 30 {
            return invalid(format!("degree cap must lie in 1..=30, got {degree_cap}"));
        }
        Ok(Self {
            lambda,
            s,
            state_cap: 1usize << degree_cap,
            memo: Vec::new(),
            combiner: Combiner::new(),
        })
    }

    pub fn lambda(&self) -> f64 {
        self.lambda
    }

    pub fn s(&self) -> f64 {
        self.s
    }

    /// `ln L_depth` between classes `a` and `b` of `table` at `depth`.
    pub fn evaluate(&mut self, table: &ClassTable, depth: usize, a: u32, b: u32) -> StepValue {
        if depth == 0 {
            return StepValue {
                log_ratio: 0.0,
                capped: false,
            };
        }
        while self.memo.len() <= depth {
            self.memo.push(HashMap::new());
        }
        if let Some(&v) = self.memo[depth].get(&(a, b)) {
            return v;
        }
        let (ca, cb) = (table.class(depth, a), table.class(depth, b));
        let mut logw = Vec::with_capacity(ca.children.len() * cb.children.len());
        let mut capped = false;
        for &(x, _) in ca.children.iter() {
            for &(y, _) in cb.children.iter() {
                let v = self.evaluate(table, depth - 1, x, y);
                capped |= v.capped;
                logw.push(v.log_ratio);
            }
        }
        let split = |children: &[(u32, u32)]| -> (Vec<u32>, Vec<u64>) {
            children
                .iter()
                .map(|&(c, m)| (m, table.class(depth - 1, c).size))
                .unzip()
        };
        let (ma, sa) = split(&ca.children);
        let (mb, sb) = split(&cb.children);
        let mut v = self.combiner.combine(
            self.lambda,
            self.s,
            Side { mult: &ma, size: &sa },
            Side { mult: &mb, size: &sb },
            &logw,
            self.state_cap,
        );
        v.capped |= capped;
        self.memo[depth].insert((a, b), v);
        v
    }

    pub fn memo_len(&self) -> usize {
        self.memo.iter().map(HashMap::len).sum()
    }
}

/// `ln L_d(t, t')` together with the capped-evaluation flag. Only the
/// depth-`d` truncations of the trees matter.
pub fn log_likelihood_ratio_flagged(
    t: &RootedTree,
    t_prime: &RootedTree,
    p: &LikelihoodParams,
    degree_cap: u32,
) -> Result<LikelihoodValue> {
    p.validate()?;
    let mut table = ClassTable::new();
    let mut eval = PairEvaluator::new(p.lambda, p.s, degree_cap)?;
    let a = table.classify(t, p.d);
    let b = table.classify(t_prime, p.d);
    let v = eval.evaluate(&table, p.d, a, b);
    Ok(LikelihoodValue {
        log_ratio: v.log_ratio,
        capped: v.capped,
    })
}

/// `ln L_d(t, t')` with the default degree cap.
pub fn log_likelihood_ratio(t: &RootedTree, t_prime: &RootedTree, p: &LikelihoodParams) -> Result<f64> {
    log_likelihood_ratio_flagged(t, t_prime, p, DEFAULT_DEGREE_CAP).map(|v| v.log_ratio)
}

/// Likelihood evaluator whose class interner and pair memo persist across
/// calls and may be shared between threads.
#[derive(Debug)]
pub struct SharedLikelihood {
    params: LikelihoodParams,
    inner: Mutex<(ClassTable, PairEvaluator)>,
}

impl SharedLikelihood {
    pub fn new(params: LikelihoodParams, degree_cap: u32) -> Result<Self> {
        params.validate()?;
        let eval = PairEvaluator::new(params.lambda, params.s, degree_cap)?;
        Ok(Self {
            params,
            inner: Mutex::new((ClassTable::new(), eval)),
        })
    }

    pub fn params(&self) -> &LikelihoodParams {
        &self.params
    }

    pub fn evaluate(&self, t: &RootedTree, t_prime: &RootedTree) -> LikelihoodValue {
        let mut guard = self.inner.lock().unwrap_or_else(|e| e.into_inner());
        let (table, eval) = &mut *guard;
        let a = table.classify(t, self.params.d);
        let b = table.classify(t_prime, self.params.d);
        let v = eval.evaluate(table, self.params.d, a, b);
        LikelihoodValue {
            log_ratio: v.log_ratio,
            capped: v.capped,
        }
    }

    pub fn memo_len(&self) -> usize {
        self.inner.lock().unwrap_or_else(|e| e.into_inner()).1.memo_len()
    }
}

/// One-sided correlation test: accept iff `ln L_d >= tau (lambda s)^d`.
pub fn one_sided_test(t: &RootedTree, t_prime: &RootedTree, p: &LikelihoodParams, tau: f64) -> Result<bool> {
    p.validate()?;
    if !(p.lambda * p.s > 0.0) {
        return invalid("one-sided test needs lambda * s > 0");
    }
    let l = log_likelihood_ratio(t, t_prime, p)?;
    Ok(l >= tau * (p.lambda * p.s).powi(p.d as i32))
}
