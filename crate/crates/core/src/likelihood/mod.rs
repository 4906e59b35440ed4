//! Likelihood ratio of the correlated tree-pair law against the independent
//! one, the divergence between them, and the one-sided correlation test.
//!
//! Evaluation works on interned isomorphism classes of truncated trees
//! ([`ClassTable`]); the likelihood ratio depends on a tree pair only
//! through those classes, which is also what lets the message-passing
//! aligner share work across edges.

mod classes;
mod estimate;
mod evaluate;
mod params;

pub use classes::{ClassDef, ClassTable, Combiner, Side, StepValue};
pub use estimate::{
    kl_monte_carlo, null_likelihood_mean, s_star_scan, sample_log_ratios, KlEstimate, SStarScan, ScanRow,
};
pub use evaluate::{
    log_likelihood_ratio, log_likelihood_ratio_flagged, one_sided_test, LikelihoodValue, PairEvaluator,
    SharedLikelihood, DEFAULT_DEGREE_CAP,
};
pub use params::{ln_factorial, ln_poisson_pmf, log_psi, psi, LikelihoodParams};
