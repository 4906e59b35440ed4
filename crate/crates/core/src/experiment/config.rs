use std::fmt;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};
use crate::mp_align::MpAlignConfig;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Kind {
    ErMpalign,
    WignerEig1,
    WignerBirkhoff,
    TreeKl,
    Otter,
    LocalLimitCheck,
}

impl Kind {
    pub const ALL: [Kind; 6] = [
        Kind::ErMpalign,
        Kind::WignerEig1,
        Kind::WignerBirkhoff,
        Kind::TreeKl,
        Kind::Otter,
        Kind::LocalLimitCheck,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            Kind::ErMpalign => "er_mpalign",
            Kind::WignerEig1 => "wigner_eig1",
            Kind::WignerBirkhoff => "wigner_birkhoff",
            Kind::TreeKl => "tree_kl",
            Kind::Otter => "otter",
            Kind::LocalLimitCheck => "local_limit_check",
        }
    }

    /// Grid axes the kind reads, in cell enumeration order.
    pub fn axes(self) -> &'static [Axis] {
        use Axis::*;
        match self {
            Kind::ErMpalign | Kind::LocalLimitCheck => &[N, Lambda, S, D],
            Kind::WignerEig1 | Kind::WignerBirkhoff => &[N, Sigma],
            Kind::TreeKl => &[Lambda, S, D],
            Kind::Otter => &[N],
        }
    }
}

impl fmt::Display for Kind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Kind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Kind::ALL
            .into_iter()
            .find(|k| k.as_str() == s)
            .ok_or_else(|| Error::InvalidInput(format!("unknown experiment kind `{s}`")))
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Axis {
    N,
    Lambda,
    S,
    Sigma,
    D,
}

impl Axis {
    pub fn name(self) -> &'static str {
        match self {
            Axis::N => "n",
            Axis::Lambda => "lambda",
            Axis::S => "s",
            Axis::Sigma => "sigma",
            Axis::D => "d",
        }
    }
}

/// Parameter lists; a kind uses the axes in [`Kind::axes`] and nothing else.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Grid {
    pub n: Vec<usize>,
    pub lambda: Vec<f64>,
    pub s: Vec<f64>,
    pub sigma: Vec<f64>,
    pub d: Vec<usize>,
}

impl Grid {
    fn len_of(&self, axis: Axis) -> usize {
        match axis {
            Axis::N => self.n.len(),
            Axis::Lambda => self.lambda.len(),
            Axis::S => self.s.len(),
            Axis::Sigma => self.sigma.len(),
            Axis::D => self.d.len(),
        }
    }
}

/// Parameters of one grid cell; axes the kind does not use are `None`.
#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct CellParams {
    pub n: Option<usize>,
    pub lambda: Option<f64>,
    pub s: Option<f64>,
    pub sigma: Option<f64>,
    pub d: Option<usize>,
}

/// Algorithm settings shared by all cells of a run.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Options {
    pub mp_align: MpAlignConfig,
    /// Eigensolver residual tolerance.
    pub eig_tol: f64,
    pub max_iters: usize,
    /// Frank–Wolfe stopping gap; `1e-6 n` when absent.
    pub gap_tol: Option<f64>,
    /// Monte Carlo pairs per tree KL cell.
    pub n_samples: usize,
    /// Series truncation for the large-degree reference value.
    pub truncation: usize,
    /// Largest total vertex count of a neighbourhood pair in the
    /// local-limit comparison.
    pub max_vertices: usize,
    /// Tree-model pairs drawn for the local-limit comparison.
    pub tree_samples: usize,
    /// Record wall-clock time per cell; off by default so reruns are
    /// byte-identical.
    pub record_timing: bool,
}

impl Default for Options {
    fn default() -> Self {
        Self {
            mp_align: MpAlignConfig::default(),
            eig_tol: crate::spectral::DEFAULT_EIG_TOL,
            max_iters: crate::convex::DEFAULT_MAX_ITERS,
            gap_tol: None,
            n_samples: 1000,
            truncation: crate::tree_enum::DEFAULT_TRUNCATION,
            max_vertices: 8,
            tree_samples: 1_000_000,
            record_timing: false,
        }
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Format {
    #[default]
    Csv,
    Json,
}

impl Format {
    /// `json` for a `.json` path, CSV otherwise.
    pub fn from_path(path: &Path) -> Self {
        match path.extension().and_then(|e| e.to_str()) {
            Some(e) if e.eq_ignore_ascii_case("json") => Format::Json,
            _ => Format::Csv,
        }
    }
}

impl FromStr for Format {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "csv" => Ok(Format::Csv),
            "json" => Ok(Format::Json),
            _ => invalid(format!("unknown format `{s}` (expected csv or json)")),
        }
    }
}

/// A sweep: every grid cell is run `reps` times with seeds derived from
/// `seed`, the kind and the (cell, rep) indices.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub kind: Kind,
    pub grid: Grid,
    #[serde(default = "one")]
    pub reps: usize,
    #[serde(default)]
    pub seed: u64,
    #[serde(default)]
    pub options: Options,
    #[serde(default)]
    pub output: Option<PathBuf>,
    #[serde(default)]
    pub format: Option<Format>,
}

fn one() -> usize {
    1
}

impl ExperimentConfig {
    pub fn new(kind: Kind, grid: Grid) -> Self {
        Self {
            kind,
            grid,
            reps: 1,
            seed: 0,
            options: Options::default(),
            output: None,
            format: None,
        }
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let cfg: Self = serde_json::from_str(text)?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn from_file(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Self::from_json(&text)
    }

    pub fn validate(&self) -> Result<()> {
        if self.reps == 0 {
            return invalid("reps must be at least 1");
        }
        let used = self.kind.axes();
        for axis in [Axis::N, Axis::Lambda, Axis::S, Axis::Sigma, Axis::D] {
            let len = self.grid.len_of(axis);
            if used.contains(&axis) && len == 0 {
                return invalid(format!("{} needs a nonempty `{}` grid", self.kind, axis.name()));
            }
            if !used.contains(&axis) && len > 0 {
                return invalid(format!("{} does not use a `{}` grid", self.kind, axis.name()));
            }
        }
        let finite = |name: &str, xs: &[f64]| match xs.iter().find(|x| !x.is_finite()) {
            Some(x) => invalid(format!("`{name}` grid contains {x}")),
            None => Ok(()),
        };
        finite("lambda", &self.grid.lambda)?;
        finite("s", &self.grid.s)?;
        finite("sigma", &self.grid.sigma)?;
        let o = &self.options;
        if !(o.eig_tol > 0.0) {
            return invalid("eig_tol must be positive");
        }
        if o.gap_tol.is_some_and(|g| !(g >= 0.0)) {
            return invalid("gap_tol must be >= 0");
        }
        if self.kind == Kind::TreeKl && o.n_samples < 100 {
            return invalid("tree_kl needs n_samples >= 100");
        }
        if self.kind == Kind::LocalLimitCheck && (o.tree_samples == 0 || o.max_vertices < 2) {
            return invalid("local_limit_check needs tree_samples >= 1 and max_vertices >= 2");
        }
        Ok(())
    }

    /// Cartesian product of the used axes, the first axis varying slowest.
    pub fn cells(&self) -> Vec<CellParams> {
        let mut cells = vec![CellParams::default()];
        for &axis in self.kind.axes() {
            let mut next = Vec::new();
            for c in &cells {
                for k in 0..self.grid.len_of(axis) {
                    let mut c = *c;
                    match axis {
                        Axis::N => c.n = Some(self.grid.n[k]),
                        Axis::Lambda => c.lambda = Some(self.grid.lambda[k]),
                        Axis::S => c.s = Some(self.grid.s[k]),
                        Axis::Sigma => c.sigma = Some(self.grid.sigma[k]),
                        Axis::D => c.d = Some(self.grid.d[k]),
                    }
                    next.push(c);
                }
            }
            cells = next;
        }
        cells
    }

    /// Output format: explicit, else from the output extension, else CSV.
    pub fn resolved_format(&self) -> Format {
        self.format
            .or_else(|| self.output.as_deref().map(Format::from_path))
            .unwrap_or_default()
    }
}
