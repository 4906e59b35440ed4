//! Leading-eigenvector alignment of correlated symmetric matrices.

mod eig1;
mod lanczos;

pub use eig1::{eig1_align, eig1_candidates, eig1_select, perturbation_stats, quadratic_objective, Eig1Result, PerturbStats};
pub use lanczos::{leading_eigenvector, LeadingEig, DEFAULT_EIG_TOL};
