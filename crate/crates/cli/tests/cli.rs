use std::path::Path;
use std::process::{Command, Output};

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_dunkl-strichartz"))
}

fn run_in(dir: &Path, args: &[&str]) -> Output {
    let cfg = dir.join("run.toml");
    std::fs::write(
        &cfg,
        format!(
            "d = 1\nkappa = [0.5]\nn = 8\ntime_nodes = 64\nseeds = [3, 4]\noutput = {:?}\n",
            dir.join("out").display().to_string()
        ),
    )
    .unwrap();
    let mut c = bin();
    c.arg("--config").arg(&cfg).args(args);
    c.output().unwrap()
}

fn code(o: &Output) -> i32 {
    o.status.code().unwrap()
}

#[test]
fn help_and_usage_errors() {
    assert_eq!(code(&bin().arg("--help").output().unwrap()), 0);
    assert_eq!(code(&bin().arg("no-such-command").output().unwrap()), 64);
    assert_eq!(code(&bin().args(["strichartz", "--J", "x"]).output().unwrap()), 64);
}

#[test]
fn config_errors_exit_64() {
    let dir = tempfile::tempdir().unwrap();
    let bad = dir.path().join("bad.toml");
    std::fs::write(&bad, "d = 1\nkappa = [-1.0]\nn = 4\n").unwrap();
    let o = bin().arg("--config").arg(&bad).arg("verify-kernels").output().unwrap();
    assert_eq!(code(&o), 64);
    let missing = bin().args(["--config", "/nonexistent.toml", "mhls"]).output().unwrap();
    assert_eq!(code(&missing), 64);
    // p and q off the admissible line
    let o = run_in(dir.path(), &["strichartz", "--p", "4", "--q", "1.2"]);
    assert_eq!(code(&o), 64, "{}", String::from_utf8_lossy(&o.stderr));
}

#[test]
fn verify_kernels_passes_and_echoes_config() {
    let dir = tempfile::tempdir().unwrap();
    let o = run_in(dir.path(), &["verify-kernels"]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stdout));
    let json = std::fs::read_to_string(dir.path().join("out/verify_kernels_summary.json")).unwrap();
    let v: serde_json::Value = serde_json::from_str(&json).unwrap();
    assert_eq!(v["all_passed"], true);
    assert!(v["config_echo"].as_str().unwrap().contains("kappa = [0.5]"));
    assert!(dir.path().join("out/verify_kernels.csv").exists());
}

#[test]
fn strichartz_from_p_writes_full_row() {
    let dir = tempfile::tempdir().unwrap();
    // d_eff = 2: p = 4 gives q = 4/3
    let o = run_in(dir.path(), &["strichartz", "--p", "4", "--J", "3", "--seed", "9"]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    let mut r = csv::Reader::from_path(dir.path().join("out/strichartz.csv")).unwrap();
    let headers = r.headers().unwrap().clone();
    for h in ["kappa", "n", "grid_order", "q", "p", "d_eff", "admissible", "scaling_defect", "j", "lhs", "rhs", "ratio"] {
        assert!(headers.iter().any(|x| x == h), "missing {h}");
    }
    let row = r.records().next().unwrap().unwrap();
    let q: f64 = row[headers.iter().position(|h| h == "q").unwrap()].parse().unwrap();
    assert!((q - 4.0 / 3.0).abs() < 1e-12);
}

#[test]
fn q_one_is_checked() {
    let dir = tempfile::tempdir().unwrap();
    let o = run_in(dir.path(), &["strichartz", "--q", "1", "--J", "4", "--group", "Z2^1", "--kappa", "0.5"]);
    assert_eq!(code(&o), 0);
    assert!(String::from_utf8_lossy(&o.stdout).contains("PASS q=1 triangle bound"));
}

#[test]
fn sweep_writes_csv_json_and_curves() {
    let dir = tempfile::tempdir().unwrap();
    let o = run_in(
        dir.path(),
        &["sweep", "--q-min", "1", "--q-max", "1.5", "--steps", "3", "--J", "1,2"],
    );
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    let out = dir.path().join("out");
    let rows = csv::Reader::from_path(out.join("sweep.csv")).unwrap().records().count();
    assert_eq!(rows, 3 * 2 * 2);
    let curve = std::fs::read_to_string(out.join("sweep_ratio_max.dat")).unwrap();
    assert_eq!(curve.lines().filter(|l| !l.starts_with('#')).count(), 3);
    assert!(out.join("sweep_summary.json").exists());
}

#[test]
fn remaining_subcommands_run() {
    let dir = tempfile::tempdir().unwrap();
    for args in [
        vec!["dual-schatten"],
        vec!["inhomogeneous", "--q", "1.5"],
        vec!["kss", "--alpha", "1", "--beta", "-0.5", "--gamma", "0.2", "--delta", "1"],
        vec!["mhls", "--factors", "3", "--r", "1.8"],
        vec!["hartree", "--coupling", "0.5", "--T", "0.1", "--steps", "8"],
    ] {
        let o = run_in(dir.path(), &args);
        assert_eq!(code(&o), 0, "{args:?}: {}{}", String::from_utf8_lossy(&o.stdout), String::from_utf8_lossy(&o.stderr));
    }
    let out = dir.path().join("out");
    assert!(out.join("hartree.csv").exists());
    assert_eq!(code(&run_in(dir.path(), &["mhls", "--factors", "4"])), 64);
}
