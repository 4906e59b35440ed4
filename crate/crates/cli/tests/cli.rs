use std::path::Path;
use std::process::{Command, Output};

fn galign(args: &[&str], cwd: &Path) -> Output {
    Command::new(env!("CARGO_BIN_EXE_galign"))
        .args(args)
        .current_dir(cwd)
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn value(text: &str, key: &str) -> f64 {
    text.lines()
        .find_map(|l| l.strip_prefix(key)?.strip_prefix(' ')?.parse().ok())
        .unwrap_or_else(|| panic!("no `{key}` in\n{text}"))
}

#[test]
fn help_on_every_subcommand() {
    let dir = tempfile::tempdir().unwrap();
    let o = galign(&["--help"], dir.path());
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).contains("Usage: galign"));
    for sub in ["gen", "mpalign", "eig1", "birkhoff", "treekl", "otter", "sweep", "check-local-limit"] {
        let o = galign(&[sub, "--help"], dir.path());
        assert_eq!(o.status.code(), Some(0), "{sub}");
        assert!(stdout(&o).contains("--seed"), "{sub}");
    }
}

#[test]
fn unknown_flags_and_bad_values_exit_two() {
    let dir = tempfile::tempdir().unwrap();
    let o = galign(&["eig1", "--frobnicate"], dir.path());
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("Usage"));
    assert_eq!(galign(&["otter", "--nmax", "10"], dir.path()).status.code(), Some(2));
    assert_eq!(galign(&["sweep"], dir.path()).status.code(), Some(2));
    assert_eq!(galign(&["eig1", "--n", "10", "--sigma", "-1"], dir.path()).status.code(), Some(2));
    assert_eq!(galign(&["--config", "x.json", "otter"], dir.path()).status.code(), Some(2));
}

#[test]
fn runtime_failures_exit_one() {
    let dir = tempfile::tempdir().unwrap();
    let o = galign(&["eig1", "--a1", "missing.bin", "--a2", "missing.bin"], dir.path());
    assert_eq!(o.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&o.stderr).contains("missing.bin"));
}

#[test]
fn noiseless_eig1_prints_full_overlap() {
    let dir = tempfile::tempdir().unwrap();
    let o = galign(&["eig1", "--n", "300", "--sigma", "0", "--seed", "7"], dir.path());
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).lines().any(|l| l == "overlap 1.0"), "{}", stdout(&o));
}

#[test]
fn otter_prints_constant_and_writes_counts() {
    let dir = tempfile::tempdir().unwrap();
    let o = galign(&["otter", "--nmax", "40"], dir.path());
    assert_eq!(o.status.code(), Some(0));
    let alpha = value(&stdout(&o), "alpha_estimate");
    assert!((0.331..=0.345).contains(&alpha), "{alpha}");
    let csv = std::fs::read_to_string(dir.path().join("otter_counts.csv")).unwrap();
    let lines: Vec<&str> = csv.lines().collect();
    assert_eq!(lines.len(), 41);
    assert_eq!(lines[0], "n,count");
    assert_eq!(lines[10], "10,719");
}

#[test]
fn generated_files_feed_the_aligners() {
    let dir = tempfile::tempdir().unwrap();
    let p = dir.path();
    let o = galign(&["gen", "wigner", "--n", "40", "--sigma", "0", "--seed", "3", "--out", "w"], p);
    assert_eq!(o.status.code(), Some(0));
    for args in [
        vec!["eig1", "--a1", "w/a1.bin", "--a2", "w/a2.bin", "--truth", "w/truth.txt", "--out", "pi.txt"],
        vec!["birkhoff", "--a1", "w/a1.bin", "--a2", "w/a2.bin", "--truth", "w/truth.txt", "--out", "pi.txt"],
    ] {
        let o = galign(&args, p);
        assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
        let text = stdout(&o);
        let key = if args[0] == "eig1" { "overlap" } else { "overlap_lap" };
        assert_eq!(value(&text, key), 1.0);
        assert_eq!(std::fs::read(p.join("pi.txt")).unwrap(), std::fs::read(p.join("w/truth.txt")).unwrap());
    }

    let o = galign(&["gen", "er", "--n", "500", "--lambda", "2", "--s", "0.9", "--out", "g"], p);
    assert_eq!(o.status.code(), Some(0));
    let o = galign(
        &[
            "mpalign", "--g1", "g/g1.txt", "--g2", "g/g2.txt", "--truth", "g/truth.txt", "--lambda", "2", "--s", "0.9",
            "--d", "2", "--out", "m.csv",
        ],
        p,
    );
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    let text = stdout(&o);
    let pairs = value(&text, "pairs") as usize;
    assert_eq!(value(&text, "correct") as usize + value(&text, "incorrect") as usize, pairs);
    let csv = std::fs::read_to_string(p.join("m.csv")).unwrap();
    assert!(csv.starts_with("i,u,is_correct\n"));
    assert_eq!(csv.lines().count(), pairs + 1);
}

#[test]
fn sweep_is_identical_across_thread_counts_and_flags_override_config() {
    let dir = tempfile::tempdir().unwrap();
    let p = dir.path();
    std::fs::write(
        p.join("sweep.json"),
        r#"{"kind": "wigner_eig1", "grid": {"n": [60], "sigma": [0.0, 0.01]}, "reps": 2, "seed": 1, "output": "from_config.csv"}"#,
    )
    .unwrap();
    let o = galign(&["sweep", "--config", "sweep.json", "--threads", "1"], p);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    let serial = std::fs::read(p.join("from_config.csv")).unwrap();
    let o = galign(&["sweep", "--config", "sweep.json", "--threads", "3", "--out", "flag.csv"], p);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(std::fs::read(p.join("flag.csv")).unwrap(), serial);
    let o = galign(&["sweep", "--config", "sweep.json", "--seed", "2", "--out", "other.csv"], p);
    assert_eq!(o.status.code(), Some(0));
    assert_ne!(std::fs::read(p.join("other.csv")).unwrap(), serial);
    let text = String::from_utf8(serial).unwrap();
    assert!(text.starts_with("# schema=galign/1 kind=wigner_eig1\n"));
    assert_eq!(text.lines().count(), 2 + 4);

    std::fs::write(p.join("bad.json"), r#"{"kind": "wigner_eig1", "grid": {}}"#).unwrap();
    assert_eq!(galign(&["sweep", "--config", "bad.json"], p).status.code(), Some(2));
}

#[test]
fn treekl_and_local_limit_run_small() {
    let dir = tempfile::tempdir().unwrap();
    let p = dir.path();
    let o = galign(&["treekl", "--lambda", "2", "--s", "0.5,0.9", "--d", "1", "--samples", "200", "--out", "kl.json"], p);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    assert_eq!(stdout(&o).lines().count(), 3);
    let json: serde_json::Value = serde_json::from_slice(&std::fs::read(p.join("kl.json")).unwrap()).unwrap();
    assert_eq!(json["records"].as_array().unwrap().len(), 2);

    let o = galign(&["check-local-limit", "--n", "3000", "--tree-samples", "20000", "--tol", "1"], p);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    let text = stdout(&o);
    assert!(value(&text, "tv_matched") < 1.0);
    assert!(text.contains("pass"));
}
