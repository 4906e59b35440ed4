//! Rooted unlabeled trees: canonical forms, explicit enumeration, the
//! height-restricted generating functions `phi_d`, and the divergence
//! series built from them.

mod canonical;
mod enumerate;
mod kl;
mod series;

pub use canonical::{canonical_form, tree_from_code, CanonicalTree};
pub use enumerate::{enumerate_rooted_trees, enumerate_trees, EnumeratedTrees, MAX_ENUMERATION_SIZE};
pub use kl::{
    classify_curve, corrected_ratio, count_ratio, kl_gaussian_sum, kl_infinity, otter_estimate, threshold_locator,
    Divergence, KlInfinity, PhiTable, CONVERGENCE_INCREMENT, DEFAULT_TRUNCATION,
    DIVERGENCE_LEVEL, GROWTH_RUN,
};
pub use series::{exact_counts, phi_sequence, phi_step, TreeCountTable, TruncatedSeries};
