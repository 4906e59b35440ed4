use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

mod commands;

/// Graph alignment workbench.
#[derive(Parser, Debug)]
#[command(name = "galign", version, propagate_version = true)]
struct Cli {
    /// Master seed (samplers use it directly; sweeps derive per-cell seeds from it).
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Output file, or directory for `gen`.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Worker threads; 1 runs serially.
    #[arg(long, global = true)]
    threads: Option<usize>,
    /// JSON experiment config (read by `sweep`).
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Sample a correlated pair and write it to the `--out` directory.
    Gen {
        #[command(subcommand)]
        model: GenModel,
    },
    /// Message-passing alignment of two sparse graphs.
    Mpalign(MpalignArgs),
    /// Leading-eigenvector alignment of two symmetric matrices.
    Eig1(WignerArgs),
    /// Birkhoff relaxation solved by Frank–Wolfe, rounded to a permutation.
    Birkhoff(BirkhoffArgs),
    /// Monte Carlo divergence between correlated and independent tree pairs.
    Treekl(TreeklArgs),
    /// Rooted tree counts and the estimate of Otter's constant.
    Otter(OtterArgs),
    /// Run the experiment given by `--config`.
    Sweep,
    /// Compare neighbourhood-pair laws of a sampled graph pair with the tree model.
    CheckLocalLimit(LocalLimitArgs),
}

#[derive(Subcommand, Debug)]
enum GenModel {
    /// Correlated Erdős–Rényi graphs: g1.txt, g2.txt, truth.txt.
    Er {
        #[arg(long)]
        n: usize,
        #[arg(long)]
        lambda: f64,
        #[arg(long)]
        s: f64,
    },
    /// Correlated Wigner matrices: a1.bin, a2.bin, truth.txt.
    Wigner {
        #[arg(long)]
        n: usize,
        #[arg(long)]
        sigma: f64,
    },
}

#[derive(ValueEnum, Clone, Copy, Debug)]
enum Policy {
    Skip,
    Unfold,
}

#[derive(Args, Debug)]
struct MpalignArgs {
    /// First graph (edge list); sample a pair with `--n` instead.
    #[arg(long, requires = "g2", conflicts_with = "n")]
    g1: Option<PathBuf>,
    #[arg(long, requires = "g1")]
    g2: Option<PathBuf>,
    /// Ground truth for scoring file inputs.
    #[arg(long, requires = "g1")]
    truth: Option<PathBuf>,
    #[arg(long, required_unless_present = "g1")]
    n: Option<usize>,
    #[arg(long)]
    lambda: f64,
    #[arg(long)]
    s: f64,
    #[arg(long)]
    d: usize,
    #[arg(long, default_value_t = 1.0)]
    tau: f64,
    #[arg(long, value_enum, default_value_t = Policy::Unfold)]
    policy: Policy,
    /// Drop pairs below `-prune (lambda s)^delta`.
    #[arg(long, default_value_t = 10.0, conflicts_with = "no_prune")]
    prune: f64,
    #[arg(long)]
    no_prune: bool,
}

#[derive(Args, Debug)]
struct WignerArgs {
    /// First matrix (binary); sample a pair with `--n` instead.
    #[arg(long, requires = "a2", conflicts_with = "n")]
    a1: Option<PathBuf>,
    #[arg(long, requires = "a1")]
    a2: Option<PathBuf>,
    #[arg(long, requires = "a1")]
    truth: Option<PathBuf>,
    #[arg(long, required_unless_present = "a1", requires = "sigma")]
    n: Option<usize>,
    #[arg(long)]
    sigma: Option<f64>,
    /// Eigensolver residual tolerance.
    #[arg(long, default_value_t = galign_core::spectral::DEFAULT_EIG_TOL)]
    tol: f64,
}

#[derive(Args, Debug)]
struct BirkhoffArgs {
    #[command(flatten)]
    input: WignerArgs,
    #[arg(long, default_value_t = galign_core::convex::DEFAULT_MAX_ITERS)]
    max_iters: usize,
    /// Stopping duality gap (default 1e-6 n).
    #[arg(long)]
    gap_tol: Option<f64>,
}

#[derive(Args, Debug)]
struct TreeklArgs {
    #[arg(long, value_delimiter = ',', required = true)]
    lambda: Vec<f64>,
    #[arg(long, value_delimiter = ',', required = true)]
    s: Vec<f64>,
    #[arg(long, value_delimiter = ',', required = true)]
    d: Vec<usize>,
    #[arg(long, default_value_t = 1000)]
    samples: usize,
    #[arg(long, default_value_t = galign_core::tree_enum::DEFAULT_TRUNCATION)]
    truncation: usize,
}

#[derive(Args, Debug)]
struct OtterArgs {
    /// Largest tree size, between 30 and 64.
    #[arg(long, default_value_t = 40)]
    nmax: usize,
}

#[derive(Args, Debug)]
struct LocalLimitArgs {
    #[arg(long, default_value_t = 100_000)]
    n: usize,
    #[arg(long, default_value_t = 2.0)]
    lambda: f64,
    #[arg(long, default_value_t = 0.8)]
    s: f64,
    #[arg(long, default_value_t = 2)]
    d: usize,
    #[arg(long, default_value_t = 8)]
    max_vertices: usize,
    #[arg(long, default_value_t = 1_000_000)]
    tree_samples: usize,
    /// Largest acceptable total-variation distance.
    #[arg(long, default_value_t = 0.05)]
    tol: f64,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match commands::run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            eprintln!("galign: {}", f.message());
            ExitCode::from(f.code())
        }
    }
}
