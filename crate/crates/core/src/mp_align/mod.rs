//! Message-passing alignment of correlated sparse graphs.
//!
//! Messages are log likelihood ratios between oriented neighbourhoods of the
//! two graphs, computed depth by depth; a vertex pair is matched when three
//! neighbour pairs on each side carry strong enough messages.

mod edges;
mod matching;
mod messages;

pub use edges::OrientedEdges;
pub use matching::{has_matching, match_vertices, score_matches, MatchSet};
pub use messages::{compute_messages, validate_depth, MessageTable, MpAlignConfig, TreePolicy};

use crate::error::Result;
use crate::likelihood::LikelihoodParams;
use crate::models::SparseGraph;

/// Messages followed by matching, with the configured threshold.
pub fn mp_align(g1: &SparseGraph, g2: &SparseGraph, p: &LikelihoodParams, cfg: &MpAlignConfig) -> Result<MatchSet> {
    let msgs = compute_messages(g1, g2, p, cfg)?;
    Ok(match_vertices(g1, g2, &msgs, cfg.tau))
}
