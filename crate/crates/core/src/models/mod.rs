//! Random models: correlated Erdős–Rényi pairs, correlated Wigner pairs,
//! Galton–Watson trees and correlated tree pairs, plus neighbourhood
//! extraction.
//!
//! Gaussian entries use variance `1/n` off the diagonal and `2/n` on it, so
//! the spectral norm of a Wigner sample concentrates at 2.

mod er;
mod graph;
mod matrix;
mod neighborhood;
mod permutation;
mod tree;
mod wigner;

pub use er::{check_er_params, sample_correlated_er, CorrelatedErPair};
pub use graph::SparseGraph;
pub(crate) use matrix::dot;
pub use matrix::SymMatrix;
pub(crate) use neighborhood::unrolls_as_tree;
pub use neighborhood::{neighborhood, oriented_neighborhood};
pub use permutation::Permutation;
pub use tree::{
    sample_correlated_tree_pair, sample_gw_tree, sample_gw_tree_seeded,
    sample_independent_tree_pair, RootedTree, TreeNode, TreePair,
};
pub use wigner::{sample_correlated_wigner, sample_wigner, CorrelatedWignerPair};
