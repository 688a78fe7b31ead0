use std::path::Path;
use std::process::{Command, Output};
use std::time::Instant;

use serde_json::Value;

fn tempest(args: &[&str], dir: &Path, env: &[(&str, &str)]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_tempest"))
        .args(args)
        .current_dir(dir)
        .env_clear()
        .envs(env.iter().copied())
        .output()
        .expect("run tempest")
}

fn ok(args: &[&str], dir: &Path) -> String {
    let out = tempest(args, dir, &[]);
    assert!(out.status.success(), "{args:?}: {}", String::from_utf8_lossy(&out.stderr));
    String::from_utf8(out.stdout).unwrap()
}

fn json(s: &str) -> Value {
    serde_json::from_str(s).unwrap()
}

/// Writes a dependent pair as `x.csv` and `y.csv`.
fn pair_files(dir: &Path, n: usize) {
    let gen = ok(&["generate", "--process", "vec-pair", "--n", &n.to_string(), "--seed", "1"], dir);
    let (mut x, mut y) = (String::new(), String::new());
    for line in gen.lines() {
        let (a, b) = line.split_once(',').unwrap();
        x += &format!("{a}\n");
        y += &format!("{b}\n");
    }
    std::fs::write(dir.join("x.csv"), x).unwrap();
    std::fs::write(dir.join("y.csv"), y).unwrap();
}

#[test]
fn report_keys_follow_fixed_order() {
    let dir = tempfile::tempdir().unwrap();
    pair_files(dir.path(), 200);
    let out = ok(&["hsic-test", "--x", "x.csv", "--y", "y.csv"], dir.path());
    let keys: Vec<&str> = out
        .lines()
        .filter(|l| l.starts_with("  \""))
        .map(|l| l.trim().split('"').nth(1).unwrap())
        .collect();
    let expected = [
        "method", "statistic", "threshold", "p_value", "reject", "alpha", "n", "B", "l_n", "seed",
        "factor_applied", "notes",
    ];
    assert_eq!(keys, expected);
    let v = json(&out);
    assert_eq!(v["method"], "hsic-wild-vb2");
    assert_eq!(v["B"], 300);
    assert_eq!(v["l_n"], 20.0);
    assert_eq!(v["factor_applied"], true);
}

#[test]
fn every_test_subcommand_runs_in_both_formats() {
    let dir = tempfile::tempdir().unwrap();
    pair_files(dir.path(), 150);
    for cmd in [
        vec!["mmd-test", "--method", "wild"],
        vec!["mmd-test", "--method", "paired"],
        vec!["mmd-test", "--method", "permutation"],
        vec!["hsic-test", "--method", "wild", "--variant", "vb1"],
        vec!["hsic-test", "--method", "shift"],
        vec!["lag-hsic", "--lags", "3"],
    ] {
        let mut args = cmd.clone();
        args.extend(["--x", "x.csv", "--y", "y.csv"]);
        let j = json(&ok(&args, dir.path()));
        let p = j["p_value"].as_f64().unwrap();
        assert!(p > 0.0 && p <= 1.0, "{cmd:?}");
        args.extend(["--format", "csv"]);
        let csv = ok(&args, dir.path());
        assert_eq!(csv.lines().count(), 2, "{cmd:?}");
        assert!(csv.starts_with("method,statistic,threshold,p_value,reject"));
    }
}

#[test]
fn lag_hsic_detects_lagged_dependence() {
    let dir = tempfile::tempdir().unwrap();
    pair_files(dir.path(), 800);
    let v = json(&ok(&["lag-hsic", "--x", "x.csv", "--y", "y.csv", "--seed", "3"], dir.path()));
    assert_eq!(v["method"], "lag-hsic-vb2");
    assert_eq!(v["reject"], true);
}

#[test]
fn flag_overrides_environment_which_overrides_default() {
    let dir = tempfile::tempdir().unwrap();
    pair_files(dir.path(), 100);
    let base = ["mmd-test", "--x", "x.csv", "--y", "y.csv"];
    let alpha = |args: &[&str], env: &[(&str, &str)]| {
        let out = tempest(args, dir.path(), env);
        assert!(out.status.success());
        json(std::str::from_utf8(&out.stdout).unwrap())["alpha"].as_f64().unwrap()
    };
    assert_eq!(alpha(&base, &[]), 0.05);
    assert_eq!(alpha(&base, &[("TEMPEST_ALPHA", "0.1")]), 0.1);
    let mut with_flag = base.to_vec();
    with_flag.extend(["--alpha", "0.2"]);
    assert_eq!(alpha(&with_flag, &[("TEMPEST_ALPHA", "0.1")]), 0.2);

    let out = tempest(&base, dir.path(), &[("TEMPEST_REPLICATES", "50"), ("TEMPEST_FORMAT", "json")]);
    assert_eq!(json(std::str::from_utf8(&out.stdout).unwrap())["B"], 50);
}

#[test]
fn same_seed_same_bytes_different_seed_differs() {
    let dir = tempfile::tempdir().unwrap();
    pair_files(dir.path(), 120);
    let args = |seed: &'static str| ["hsic-test", "--x", "x.csv", "--y", "y.csv", "--seed", seed];
    let a = ok(&args("9"), dir.path());
    assert_eq!(a, ok(&args("9"), dir.path()));
    assert_ne!(json(&a)["threshold"], json(&ok(&args("10"), dir.path()))["threshold"]);
}

#[test]
fn bad_csv_cell_names_its_row() {
    let dir = tempfile::tempdir().unwrap();
    std::fs::write(dir.path().join("x.csv"), "1.0\nabc\n3.0\n").unwrap();
    std::fs::write(dir.path().join("y.csv"), "1.0\n2.0\n3.0\n").unwrap();
    let out = tempest(&["mmd-test", "--x", "x.csv", "--y", "y.csv"], dir.path(), &[]);
    assert_eq!(out.status.code(), Some(2));
    let err = json(std::str::from_utf8(&out.stderr).unwrap());
    assert_eq!(err["error"]["code"], "csv");
    assert!(err["error"]["message"].as_str().unwrap().contains("row 2"), "{err}");
}

#[test]
fn invalid_settings_are_rejected() {
    let dir = tempfile::tempdir().unwrap();
    pair_files(dir.path(), 50);
    let out = tempest(&["mmd-test", "--x", "x.csv", "--y", "y.csv", "--alpha", "1.5"], dir.path(), &[]);
    assert_eq!(out.status.code(), Some(2));
    assert_eq!(json(std::str::from_utf8(&out.stderr).unwrap())["error"]["code"], "invalid_alpha");
    let out = tempest(&["mmd-test", "--x", "missing.csv", "--y", "y.csv"], dir.path(), &[]);
    assert_eq!(json(std::str::from_utf8(&out.stderr).unwrap())["error"]["code"], "io");
    let out = tempest(&["hsic-test", "--x", "x.csv", "--y", "y.csv", "--bandwidth", "-1"], dir.path(), &[]);
    assert_eq!(out.status.code(), Some(2));
    let out = tempest(&["generate", "--process", "vec-pair", "--n", "10", "--param", "nope=1"], dir.path(), &[]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn generate_writes_header_and_file() {
    let dir = tempfile::tempdir().unwrap();
    ok(
        &["generate", "--process", "gibbs-normal", "--n", "40", "--header", "--out", "g.csv", "--param", "thin=2"],
        dir.path(),
    );
    let text = std::fs::read_to_string(dir.path().join("g.csv")).unwrap();
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("v1,v2"));
    assert_eq!(lines.count(), 40);
}

#[test]
fn repeated_trials_report_rejection_rate() {
    let dir = tempfile::tempdir().unwrap();
    pair_files(dir.path(), 100);
    let v = json(&ok(&["mmd-test", "--x", "x.csv", "--y", "y.csv", "--trials", "4"], dir.path()));
    assert_eq!(v["trials"], 4);
    assert_eq!(v["records"].as_array().unwrap().len(), 4);
}

#[test]
fn bench_smoke_runs_every_preset_quickly() {
    let dir = tempfile::tempdir().unwrap();
    for preset in ["table1-mcmc", "table1-audio", "fig1-extinct", "fig2-vec", "fig2-osc"] {
        let start = Instant::now();
        ok(&["bench", "--preset", preset, "--trials", "1", "--out-dir", "out"], dir.path());
        let secs = start.elapsed().as_secs_f64();
        assert!(secs < 10.0, "{preset} took {secs:.1}s");
        let csv = std::fs::read_to_string(dir.path().join(format!("out/{preset}.csv"))).unwrap();
        assert!(csv.lines().count() > 1);
        let j = json(&std::fs::read_to_string(dir.path().join(format!("out/{preset}.json"))).unwrap());
        assert_eq!(j["preset"], preset);
    }
}

#[test]
fn bench_wide_table_has_method_columns() {
    let dir = tempfile::tempdir().unwrap();
    let out = ok(&["bench", "--preset", "table1-mcmc", "--trials", "1", "--format", "csv", "--wide"], dir.path());
    let header = out.lines().next().unwrap();
    assert!(header.ends_with("permutation,MMD_kb,Vb1,Vb2"), "{header}");
}
