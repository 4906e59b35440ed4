use std::fs::File;
use std::io::{self, BufReader, BufWriter, Write};
use std::path::{Path, PathBuf};

use galign_core::convex::{default_gap_tol, frobenius_gap, fw_birkhoff, round_argmax, round_lap};
use galign_core::experiment::{
    overlap, run_experiment, write_csv, write_json, write_results, ExperimentConfig, Format, Grid, Kind, Metrics,
    ResultRecord,
};
use galign_core::likelihood::LikelihoodParams;
use galign_core::models::{sample_correlated_er, sample_correlated_wigner};
use galign_core::mp_align::{compute_messages, match_vertices, score_matches, MpAlignConfig, TreePolicy};
use galign_core::spectral::eig1_align;
use galign_core::tree_enum::{count_ratio, exact_counts, otter_estimate};
use galign_core::{Permutation, SparseGraph, SymMatrix};

use super::{BirkhoffArgs, Cli, Command, GenModel, LocalLimitArgs, MpalignArgs, OtterArgs, Policy, TreeklArgs, WignerArgs};

/// A failed command: validation problems exit with 2, runtime failures with 1.
pub enum Failure {
    Usage(String),
    Runtime(String),
}

impl Failure {
    pub fn code(&self) -> u8 {
        match self {
            Failure::Usage(_) => 2,
            Failure::Runtime(_) => 1,
        }
    }

    pub fn message(&self) -> &str {
        match self {
            Failure::Usage(m) | Failure::Runtime(m) => m,
        }
    }
}

impl From<galign_core::Error> for Failure {
    fn from(e: galign_core::Error) -> Self {
        if e.is_validation() {
            Failure::Usage(e.to_string())
        } else {
            Failure::Runtime(e.to_string())
        }
    }
}

type Outcome = Result<(), Failure>;

fn io_failure(path: &Path, e: io::Error) -> Failure {
    Failure::Runtime(format!("{}: {e}", path.display()))
}

fn create(path: &Path) -> Result<BufWriter<File>, Failure> {
    File::create(path)
        .map(BufWriter::new)
        .map_err(|e| io_failure(path, e))
}

fn open(path: &Path) -> Result<BufReader<File>, Failure> {
    File::open(path)
        .map(BufReader::new)
        .map_err(|e| io_failure(path, e))
}

/// Reads an input file; parse errors are reported with the path.
fn load<T>(path: &Path, parse: impl FnOnce(BufReader<File>) -> galign_core::Result<T>) -> Result<T, Failure> {
    parse(open(path)?).map_err(|e| {
        let f = Failure::from(e);
        match f {
            Failure::Usage(m) => Failure::Usage(format!("{}: {m}", path.display())),
            Failure::Runtime(m) => Failure::Runtime(format!("{}: {m}", path.display())),
        }
    })
}

fn write_with(path: &Path, f: impl FnOnce(&mut BufWriter<File>) -> io::Result<()>) -> Outcome {
    let mut w = create(path)?;
    f(&mut w).and_then(|_| w.flush()).map_err(|e| io_failure(path, e))
}

pub fn run(cli: Cli) -> Outcome {
    if cli.config.is_some() && !matches!(cli.command, Command::Sweep) {
        return Err(Failure::Usage("--config is only read by `sweep`".into()));
    }
    if cli.threads == Some(0) {
        return Err(Failure::Usage("--threads must be at least 1".into()));
    }
    if let (Some(t), false) = (cli.threads, matches!(cli.command, Command::Sweep)) {
        rayon::ThreadPoolBuilder::new()
            .num_threads(t)
            .build_global()
            .map_err(|e| Failure::Runtime(format!("worker pool: {e}")))?;
    }
    let seed = cli.seed.unwrap_or(0);
    let out = cli.out.as_deref();
    match cli.command {
        Command::Gen { model } => gen(model, seed, out),
        Command::Mpalign(a) => mpalign(a, seed, out),
        Command::Eig1(a) => eig1(a, seed, out),
        Command::Birkhoff(a) => birkhoff(a, seed, out),
        Command::Treekl(a) => treekl(a, seed, out, cli.threads),
        Command::Otter(a) => otter(a, out),
        Command::Sweep => sweep(cli.config, cli.seed, cli.out, cli.threads),
        Command::CheckLocalLimit(a) => check_local_limit(a, seed, out, cli.threads),
    }
}

fn gen(model: GenModel, seed: u64, out: Option<&Path>) -> Outcome {
    let dir = out.ok_or_else(|| Failure::Usage("gen needs --out <directory>".into()))?;
    std::fs::create_dir_all(dir).map_err(|e| io_failure(dir, e))?;
    let truth = match model {
        GenModel::Er { n, lambda, s } => {
            let pair = sample_correlated_er(n, lambda, s, seed)?;
            write_with(&dir.join("g1.txt"), |w| pair.g1.write_edge_list(w))?;
            write_with(&dir.join("g2.txt"), |w| pair.g2.write_edge_list(w))?;
            println!("edges_g1 {}", pair.g1.edge_count());
            println!("edges_g2 {}", pair.g2.edge_count());
            pair.truth
        }
        GenModel::Wigner { n, sigma } => {
            let pair = sample_correlated_wigner(n, sigma, seed)?;
            write_with(&dir.join("a1.bin"), |w| pair.a1.write_binary(w))?;
            write_with(&dir.join("a2.bin"), |w| pair.a2.write_binary(w))?;
            pair.truth
        }
    };
    write_with(&dir.join("truth.txt"), |w| truth.write_text(w))?;
    println!("wrote {}", dir.display());
    Ok(())
}

fn mpalign(a: MpalignArgs, seed: u64, out: Option<&Path>) -> Outcome {
    let (g1, g2, truth) = match (&a.g1, &a.g2, a.n) {
        (Some(p1), Some(p2), _) => (
            load(p1, SparseGraph::read_edge_list)?,
            load(p2, SparseGraph::read_edge_list)?,
            a.truth.as_deref().map(|t| load(t, Permutation::read_text)).transpose()?,
        ),
        (_, _, Some(n)) => {
            let pair = sample_correlated_er(n, a.lambda, a.s, seed)?;
            (pair.g1, pair.g2, Some(pair.truth))
        }
        _ => return Err(Failure::Usage("give --g1/--g2 or --n".into())),
    };
    if g1.n() != g2.n() {
        return Err(Failure::Usage(format!("graphs have {} and {} vertices", g1.n(), g2.n())));
    }
    let cfg = MpAlignConfig {
        tau: a.tau,
        tree_policy: match a.policy {
            Policy::Skip => TreePolicy::Skip,
            Policy::Unfold => TreePolicy::Unfold,
        },
        prune_factor: (!a.no_prune).then_some(a.prune),
        ..MpAlignConfig::default()
    };
    let p = LikelihoodParams::new(a.lambda, a.s, a.d)?;
    let msgs = compute_messages(&g1, &g2, &p, &cfg)?;
    let matches = match_vertices(&g1, &g2, &msgs, cfg.tau);
    println!("pairs {}", matches.len());
    if let Some(t) = &truth {
        if t.len() != g1.n() {
            return Err(Failure::Usage(format!("truth has {} entries for {} vertices", t.len(), g1.n())));
        }
        let (correct, incorrect) = score_matches(&matches, t);
        println!("correct {correct}");
        println!("incorrect {incorrect}");
    }
    if msgs.depth_warning {
        println!("depth_warning true");
    }
    if let Some(path) = out {
        match &truth {
            Some(t) => {
                let mut w = create(path)?;
                matches.write_csv(&mut w, t)?;
                w.flush().map_err(|e| io_failure(path, e))?;
            }
            None => write_with(path, |w| {
                writeln!(w, "i,u")?;
                matches.pairs.iter().try_for_each(|(i, u)| writeln!(w, "{i},{u}"))
            })?,
        }
    }
    Ok(())
}

fn wigner_input(a: &WignerArgs, seed: u64) -> Result<(SymMatrix, SymMatrix, Option<Permutation>), Failure> {
    match (&a.a1, &a.a2, a.n) {
        (Some(p1), Some(p2), _) => {
            let a1 = load(p1, SymMatrix::read_binary)?;
            let a2 = load(p2, SymMatrix::read_binary)?;
            if a1.n() != a2.n() {
                return Err(Failure::Usage(format!("matrices have sizes {} and {}", a1.n(), a2.n())));
            }
            let truth = a.truth.as_deref().map(|t| load(t, Permutation::read_text)).transpose()?;
            if truth.as_ref().is_some_and(|t| t.len() != a1.n()) {
                return Err(Failure::Usage("truth size differs from the matrices".into()));
            }
            Ok((a1, a2, truth))
        }
        (_, _, Some(n)) => {
            let sigma = a.sigma.ok_or_else(|| Failure::Usage("--n needs --sigma".into()))?;
            let pair = sample_correlated_wigner(n, sigma, seed)?;
            Ok((pair.a1, pair.a2, Some(pair.truth)))
        }
        _ => Err(Failure::Usage("give --a1/--a2 or --n/--sigma".into())),
    }
}

fn eig1(a: WignerArgs, seed: u64, out: Option<&Path>) -> Outcome {
    let (a1, a2, truth) = wigner_input(&a, seed)?;
    let r = eig1_align(&a1, &a2, a.tol)?;
    if let Some(t) = &truth {
        println!("overlap {:?}", overlap(r.permutation.as_slice(), t)?);
    }
    println!("eigenvalue_1 {:?}", r.eig1.value);
    println!("eigenvalue_2 {:?}", r.eig2.value);
    println!("reversed {}", r.reversed);
    if r.eig1.degenerate || r.eig2.degenerate {
        println!("degenerate true");
    }
    if let Some(path) = out {
        write_with(path, |w| r.permutation.write_text(w))?;
    }
    Ok(())
}

fn birkhoff(a: BirkhoffArgs, seed: u64, out: Option<&Path>) -> Outcome {
    let (a1, a2, truth) = wigner_input(&a.input, seed)?;
    let tol = a.gap_tol.unwrap_or_else(|| default_gap_tol(a1.n()));
    let r = fw_birkhoff(&a1, &a2, a.max_iters, tol)?;
    let pi = round_lap(&r.x);
    println!("objective {:?}", r.objective);
    println!("fw_gap {:?}", r.fw_gap);
    println!("iterations {}", r.iterations);
    println!("converged {}", r.converged);
    if let Some(t) = &truth {
        println!("frob_gap {:?}", frobenius_gap(&r.x, t)?);
        println!("overlap_argmax {:?}", overlap(&round_argmax(&r.x), t)?);
        println!("overlap_lap {:?}", overlap(pi.as_slice(), t)?);
    }
    if let Some(path) = out {
        write_with(path, |w| pi.write_text(w))?;
    }
    Ok(())
}

fn emit(records: &[ResultRecord], kind: Kind, format: Format, out: Option<&Path>) -> Outcome {
    match out {
        Some(path) => Ok(write_results(records, kind, format, path)?),
        None => {
            let stdout = io::stdout();
            let mut w = stdout.lock();
            match format {
                Format::Csv => write_csv(&mut w, kind, records)?,
                Format::Json => write_json(&mut w, kind, records)?,
            }
            w.flush().map_err(|e| io_failure(Path::new("<stdout>"), e))
        }
    }
}

fn treekl(a: TreeklArgs, seed: u64, out: Option<&Path>, threads: Option<usize>) -> Outcome {
    let mut cfg = ExperimentConfig::new(
        Kind::TreeKl,
        Grid {
            lambda: a.lambda,
            s: a.s,
            d: a.d,
            ..Grid::default()
        },
    );
    cfg.seed = seed;
    cfg.options.n_samples = a.samples;
    cfg.options.truncation = a.truncation;
    let records = run_experiment(&cfg, threads)?;
    println!("lambda s d kl_mean kl_stderr capped_fraction kl_limit");
    for r in &records {
        let p = &r.params;
        let (l, s, d) = (p.lambda.unwrap_or_default(), p.s.unwrap_or_default(), p.d.unwrap_or_default());
        match &r.metrics {
            Some(Metrics::TreeKl {
                kl_mean,
                kl_stderr,
                capped_fraction,
                kl_limit,
                ..
            }) => println!("{l} {s} {d} {kl_mean:.6} {kl_stderr:.6} {capped_fraction:.4} {kl_limit:.6}"),
            _ => println!("{l} {s} {d} error: {}", r.error.as_deref().unwrap_or("?")),
        }
    }
    if let Some(path) = out {
        emit(&records, Kind::TreeKl, Format::from_path(path), Some(path))?;
    }
    Ok(())
}

fn otter(a: OtterArgs, out: Option<&Path>) -> Outcome {
    if !(30..=64).contains(&a.nmax) {
        return Err(Failure::Usage(format!("--nmax must be in 30..=64, got {}", a.nmax)));
    }
    let alpha = otter_estimate(a.nmax)?;
    let counts = exact_counts(a.nmax - 1, a.nmax)?;
    println!("alpha_estimate {alpha:.6}");
    println!("ratio {:.6}", count_ratio(a.nmax)?);
    let path: PathBuf = out.map(Path::to_path_buf).unwrap_or_else(|| "otter_counts.csv".into());
    write_with(&path, |w| {
        writeln!(w, "n,count")?;
        counts
            .iter()
            .enumerate()
            .try_for_each(|(k, c)| writeln!(w, "{},{c}", k + 1))
    })?;
    println!("counts {}", path.display());
    Ok(())
}

fn sweep(config: Option<PathBuf>, seed: Option<u64>, out: Option<PathBuf>, threads: Option<usize>) -> Outcome {
    let path = config.ok_or_else(|| Failure::Usage("sweep needs --config <json>".into()))?;
    let text = std::fs::read_to_string(&path).map_err(|e| io_failure(&path, e))?;
    let mut cfg = ExperimentConfig::from_json(&text).map_err(|e| Failure::Usage(format!("{}: {e}", path.display())))?;
    if let Some(s) = seed {
        cfg.seed = s;
    }
    if out.is_some() {
        cfg.output = out;
    }
    let records = run_experiment(&cfg, threads)?;
    let errors = records.iter().filter(|r| r.is_error()).count();
    emit(&records, cfg.kind, cfg.resolved_format(), cfg.output.as_deref())?;
    eprintln!("{} records, {errors} errors", records.len());
    Ok(())
}

fn check_local_limit(a: LocalLimitArgs, seed: u64, out: Option<&Path>, threads: Option<usize>) -> Outcome {
    let mut cfg = ExperimentConfig::new(
        Kind::LocalLimitCheck,
        Grid {
            n: vec![a.n],
            lambda: vec![a.lambda],
            s: vec![a.s],
            d: vec![a.d],
            ..Grid::default()
        },
    );
    cfg.seed = seed;
    cfg.options.max_vertices = a.max_vertices;
    cfg.options.tree_samples = a.tree_samples;
    let records = run_experiment(&cfg, threads)?;
    let r = &records[0];
    let Some(Metrics::LocalLimitCheck {
        tv_matched,
        tv_unmatched,
        tv_control,
        ..
    }) = r.metrics
    else {
        return Err(Failure::Runtime(r.error.clone().unwrap_or_default()));
    };
    println!("tv_matched {tv_matched:.6}");
    println!("tv_unmatched {tv_unmatched:.6}");
    println!("tv_control {tv_control:.6}");
    let pass = tv_matched <= a.tol && tv_unmatched <= a.tol;
    println!("{} (tolerance {})", if pass { "pass" } else { "fail" }, a.tol);
    if let Some(path) = out {
        emit(&records, Kind::LocalLimitCheck, Format::from_path(path), Some(path))?;
    }
    Ok(())
}
