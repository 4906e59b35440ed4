use serde::{Deserialize, Serialize};

use super::config::{Axis, CellParams, Kind};

/// Version tag written into every record.
pub const VERSION: &str = concat!("galign-core ", env!("CARGO_PKG_VERSION"));

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Metrics {
    ErMpalign {
        n_pairs: usize,
        n_correct: usize,
        n_incorrect: usize,
        /// Fraction of vertices whose true partner is among the pairs.
        overlap: f64,
        capped_pairs: usize,
        depth_warning: bool,
    },
    WignerEig1 {
        overlap: f64,
        eig_gap: f64,
        s_magnitude: f64,
        alignment: f64,
        reversed: bool,
        degenerate: bool,
    },
    WignerBirkhoff {
        objective: f64,
        fw_gap: f64,
        iterations: usize,
        converged: bool,
        frob_gap: f64,
        overlap_argmax: f64,
        overlap_lap: f64,
    },
    TreeKl {
        kl_mean: f64,
        kl_stderr: f64,
        n_samples: usize,
        capped_fraction: f64,
        /// The `lambda -> infinity` value at the same `(s, d)`.
        kl_limit: f64,
        kl_limit_tail: bool,
    },
    Otter {
        /// `A_n`, the number of rooted unlabeled trees on `n` vertices.
        count: u128,
        ratio: f64,
        alpha_estimate: f64,
    },
    LocalLimitCheck {
        tv_matched: f64,
        tv_unmatched: f64,
        tv_control: f64,
        graph_pairs_matched: usize,
        graph_pairs_unmatched: usize,
        tree_pairs_matched: usize,
        tree_pairs_unmatched: usize,
    },
}

impl Metrics {
    pub fn kind(&self) -> Kind {
        match self {
            Metrics::ErMpalign { .. } => Kind::ErMpalign,
            Metrics::WignerEig1 { .. } => Kind::WignerEig1,
            Metrics::WignerBirkhoff { .. } => Kind::WignerBirkhoff,
            Metrics::TreeKl { .. } => Kind::TreeKl,
            Metrics::Otter { .. } => Kind::Otter,
            Metrics::LocalLimitCheck { .. } => Kind::LocalLimitCheck,
        }
    }

    /// Metric column names of a kind, in CSV order.
    pub fn columns(kind: Kind) -> &'static [&'static str] {
        match kind {
            Kind::ErMpalign => &["n_pairs", "n_correct", "n_incorrect", "overlap", "capped_pairs", "depth_warning"],
            Kind::WignerEig1 => &["overlap", "eig_gap", "s_magnitude", "alignment", "reversed", "degenerate"],
            Kind::WignerBirkhoff => &[
                "objective",
                "fw_gap",
                "iterations",
                "converged",
                "frob_gap",
                "overlap_argmax",
                "overlap_lap",
            ],
            Kind::TreeKl => &["kl_mean", "kl_stderr", "n_samples", "capped_fraction", "kl_limit", "kl_limit_tail"],
            Kind::Otter => &["count", "ratio", "alpha_estimate"],
            Kind::LocalLimitCheck => &[
                "tv_matched",
                "tv_unmatched",
                "tv_control",
                "graph_pairs_matched",
                "graph_pairs_unmatched",
                "tree_pairs_matched",
                "tree_pairs_unmatched",
            ],
        }
    }

    pub(crate) fn fields(&self) -> Vec<Field> {
        use Field::*;
        match *self {
            Metrics::ErMpalign {
                n_pairs,
                n_correct,
                n_incorrect,
                overlap,
                capped_pairs,
                depth_warning,
            } => vec![
                Int(n_pairs as u128),
                Int(n_correct as u128),
                Int(n_incorrect as u128),
                Real(overlap),
                Int(capped_pairs as u128),
                Flag(depth_warning),
            ],
            Metrics::WignerEig1 {
                overlap,
                eig_gap,
                s_magnitude,
                alignment,
                reversed,
                degenerate,
            } => vec![
                Real(overlap),
                Real(eig_gap),
                Real(s_magnitude),
                Real(alignment),
                Flag(reversed),
                Flag(degenerate),
            ],
            Metrics::WignerBirkhoff {
                objective,
                fw_gap,
                iterations,
                converged,
                frob_gap,
                overlap_argmax,
                overlap_lap,
            } => vec![
                Real(objective),
                Real(fw_gap),
                Int(iterations as u128),
                Flag(converged),
                Real(frob_gap),
                Real(overlap_argmax),
                Real(overlap_lap),
            ],
            Metrics::TreeKl {
                kl_mean,
                kl_stderr,
                n_samples,
                capped_fraction,
                kl_limit,
                kl_limit_tail,
            } => vec![
                Real(kl_mean),
                Real(kl_stderr),
                Int(n_samples as u128),
                Real(capped_fraction),
                Real(kl_limit),
                Flag(kl_limit_tail),
            ],
            Metrics::Otter {
                count,
                ratio,
                alpha_estimate,
            } => vec![Int(count), Real(ratio), Real(alpha_estimate)],
            Metrics::LocalLimitCheck {
                tv_matched,
                tv_unmatched,
                tv_control,
                graph_pairs_matched,
                graph_pairs_unmatched,
                tree_pairs_matched,
                tree_pairs_unmatched,
            } => vec![
                Real(tv_matched),
                Real(tv_unmatched),
                Real(tv_control),
                Int(graph_pairs_matched as u128),
                Int(graph_pairs_unmatched as u128),
                Int(tree_pairs_matched as u128),
                Int(tree_pairs_unmatched as u128),
            ],
        }
    }

    /// First non-finite real, if any.
    pub(crate) fn non_finite(&self) -> Option<(&'static str, f64)> {
        let cols = Metrics::columns(self.kind());
        self.fields().into_iter().zip(cols).find_map(|(f, &c)| match f {
            Field::Real(x) if !x.is_finite() => Some((c, x)),
            _ => None,
        })
    }
}

#[derive(Clone, Copy, Debug)]
pub(crate) enum Field {
    Int(u128),
    Real(f64),
    Flag(bool),
}

/// One (cell, rep) of a sweep. Exactly one of `metrics` and `error` is set.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ResultRecord {
    pub kind: Kind,
    pub cell: usize,
    pub rep: usize,
    pub seed: u64,
    pub params: CellParams,
    pub metrics: Option<Metrics>,
    pub error: Option<String>,
    /// Wall-clock time, only when timing was requested.
    pub runtime_ms: Option<f64>,
    pub version: String,
}

impl ResultRecord {
    pub fn is_error(&self) -> bool {
        self.error.is_some()
    }

    /// Full CSV header of a kind.
    pub fn columns(kind: Kind) -> Vec<&'static str> {
        let mut cols = vec!["cell", "rep", "seed"];
        cols.extend(kind.axes().iter().map(|a| a.name()));
        cols.extend(Metrics::columns(kind));
        cols.extend(["runtime_ms", "error", "version"]);
        cols
    }

    pub(crate) fn param_fields(&self) -> Vec<Option<Field>> {
        let p = &self.params;
        self.kind
            .axes()
            .iter()
            .map(|a| match a {
                Axis::N => p.n.map(|x| Field::Int(x as u128)),
                Axis::Lambda => p.lambda.map(Field::Real),
                Axis::S => p.s.map(Field::Real),
                Axis::Sigma => p.sigma.map(Field::Real),
                Axis::D => p.d.map(|x| Field::Int(x as u128)),
            })
            .collect()
    }
}
