//! Graph alignment workbench.
//!
//! * [`models`]: random graph, matrix and tree models.
//! * [`tree_enum`]: rooted tree canonical forms, counts and the
//!   large-degree divergence series.
//! * [`likelihood`]: tree-pair likelihood ratios and divergence estimates.
//! * [`mp_align`]: message-passing alignment of sparse graphs.
//! * [`spectral`]: leading-eigenvector alignment of Wigner matrices.
//! * [`convex`]: Birkhoff-polytope relaxation with Frank–Wolfe.
//! * [`experiment`]: seeded sweeps and result emission.

pub mod convex;
pub mod error;
pub mod experiment;
pub mod likelihood;
pub mod models;
pub mod mp_align;
pub mod rng;
pub mod spectral;
pub mod tree_enum;

pub use error::{Error, Result};
pub use models::{Permutation, RootedTree, SparseGraph, SymMatrix};
