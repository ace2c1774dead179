//! End-to-end runs of the `hlmax` subcommands.

use std::fs;
use std::path::Path;
use std::process::Command;

use hlmax_cli::catalog::FunctionSpec;
use hlmax_cli::{run_cli, EXIT_RESOLUTION, EXIT_USAGE};
use hlmax_core::Profile;
use proptest::prelude::*;
use serde_json::Value;

fn run(args: &[&str], out: &Path) -> i32 {
    let mut full = vec!["hlmax"];
    full.extend_from_slice(args);
    full.extend_from_slice(&["--out", out.to_str().unwrap()]);
    run_cli(full)
}

/// Parses a CSV written by the tool into its header and numeric rows.
fn table(path: &Path) -> (Vec<String>, Vec<Vec<String>>) {
    let mut r = csv::Reader::from_path(path).unwrap();
    let header = r.headers().unwrap().iter().map(String::from).collect();
    let rows = r
        .records()
        .map(|x| x.unwrap().iter().map(String::from).collect())
        .collect();
    (header, rows)
}

fn number(s: &str) -> f64 {
    s.parse().unwrap()
}

#[test]
fn compute_hl_of_one_is_one() {
    let dir = tempfile::tempdir().unwrap();
    let code = run(
        &["compute", "--set", "f=indicator:radius=100", "--radii-max", "2"],
        dir.path(),
    );
    assert_eq!(code, 0);
    let (header, rows) = table(&dir.path().join("maximal.csv"));
    assert_eq!(header, ["x", "value", "good_radii"]);
    assert_eq!(rows.len(), 801);
    assert!(rows.iter().all(|r| number(&r[1]) == 1.0));
    for name in ["input_f.csv", "gradient.csv"] {
        assert!(dir.path().join(name).exists(), "{name}");
    }
}

/// Continuous `sup_R |I ∩ [-R, R]| / 2R` where `I` is the set of `y` with
/// `|x + y| <= 1` and `|x - y - 1| <= 1`.
fn indicator_pair_oracle(x: f64, radii: &[f64]) -> f64 {
    let (lo, hi) = ((-1.0 - x).max(x - 2.0), (1.0 - x).min(x));
    radii
        .iter()
        .map(|&r| ((hi.min(r) - lo.max(-r)).max(0.0)) / (2.0 * r))
        .fold(0.0, f64::max)
}

#[test]
fn compute_bilinear_on_indicator_pair_matches_closed_form() {
    let dir = tempfile::tempdir().unwrap();
    let args = [
        "compute",
        "--set",
        "operator=bilinear",
        "--set",
        "f=indicator",
        "--set",
        "g=indicator:center=1",
        "--set",
        "include_zero=false",
        "--radii-max",
        "4",
        "--radii-count",
        "16",
    ];
    assert_eq!(run(&args, dir.path()), 0);
    let radii: Vec<f64> = (1..=16).map(|j| 0.25 * j as f64).collect();
    let (_, rows) = table(&dir.path().join("maximal.csv"));
    assert!(rows.iter().any(|r| number(&r[1]) > 0.9));
    // Counting error is at most one node per ball end, relative to the smallest ball.
    let tol = 2.0 * 0.01 / (2.0 * 0.25);
    for r in &rows {
        let (x, v) = (number(&r[0]), number(&r[1]));
        let want = indicator_pair_oracle(x, &radii);
        assert!((v - want).abs() <= tol, "x = {x}: {v} vs {want}");
    }
}

#[test]
fn p_equal_one_is_a_usage_error() {
    let dir = tempfile::tempdir().unwrap();
    let out = Command::new(env!("CARGO_BIN_EXE_hlmax"))
        .args(["compute", "--p", "1", "--out"])
        .arg(dir.path())
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(EXIT_USAGE));
    let msg = String::from_utf8_lossy(&out.stderr);
    assert!(msg.contains("p > 1"), "{msg}");
}

fn verify_document(dir: &Path) -> Value {
    serde_json::from_slice(&fs::read(dir.join("verify.json")).unwrap()).unwrap()
}

#[test]
fn gradient_suite_passes_on_default_pair() {
    let dir = tempfile::tempdir().unwrap();
    assert_eq!(
        run(&["verify", "--suite", "gradient-bound", "--per-point"], dir.path()),
        0
    );
    let doc = verify_document(dir.path());
    let suite = &doc["suites"][0];
    assert_eq!(suite["name"], "gradient-bound");
    assert_eq!(suite["summary"]["verdict"], "pass");
    assert_eq!(suite["summary"]["violations"], 0);
    assert!(!suite["per_point"].as_array().unwrap().is_empty());
    assert_eq!(doc["config"]["tol_factor"], 10.0);
    assert_eq!(doc["summary"]["verdict"], "pass");
}

#[test]
fn unresolved_weak_global_exits_with_resolution_code() {
    let dir = tempfile::tempdir().unwrap();
    let code = run(
        &["verify", "--suite", "weak-global", "--set", "weak_global.n_list=8,256"],
        dir.path(),
    );
    assert_eq!(code, EXIT_RESOLUTION);
    assert_eq!(verify_document(dir.path())["suites"][0]["summary"]["verdict"], "error");
}

#[test]
fn empty_suite_list_passes_with_empty_report() {
    let dir = tempfile::tempdir().unwrap();
    assert_eq!(run(&["verify"], dir.path()), 0);
    let doc = verify_document(dir.path());
    assert_eq!(doc["suites"], Value::Array(vec![]));
    assert_eq!(doc["summary"]["suites"], 0);
}

#[test]
fn bad_arguments_are_usage_errors() {
    let dir = tempfile::tempdir().unwrap();
    assert_eq!(run(&["verify", "--suite", "no-such-suite"], dir.path()), EXIT_USAGE);
    assert_eq!(run(&["repro", "example-7"], dir.path()), EXIT_USAGE);
    assert_eq!(run(&["compute", "--set", "nonsense=1"], dir.path()), EXIT_USAGE);
    assert_eq!(run(&["compute", "--frobnicate"], dir.path()), EXIT_USAGE);
    assert_eq!(run_cli(["hlmax", "--help"]), 0);
}

#[test]
fn config_file_and_flags_combine() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("run.cfg");
    fs::write(
        &cfg,
        "# decay check on a coarser grid\nh = 0.02\nsuites = decay-bound\n",
    )
    .unwrap();
    assert_eq!(run(&["verify", "--config", cfg.to_str().unwrap()], dir.path()), 0);
    let doc = verify_document(dir.path());
    assert_eq!(doc["config"]["h"], 0.02);
    assert_eq!(doc["suites"][0]["grid"]["h"], 0.02);
    assert_eq!(run(&["verify", "--config", "missing.cfg"], dir.path()), 1);
}

#[test]
fn repro_tables_have_plot_ready_columns() {
    let dir = tempfile::tempdir().unwrap();
    assert_eq!(run(&["repro", "example-6-local"], dir.path()), 0);
    let (header, rows) = table(&dir.path().join("example-6-local.csv"));
    assert_eq!(header, ["n", "<u_n,1>", "<1,M_Omega(u_n)>", "lower_bound", "2/pi"]);
    assert_eq!(rows.len(), 4);
    assert!(rows
        .iter()
        .all(|r| (number(&r[4]) - 2.0 / std::f64::consts::PI).abs() < 1e-15));

    assert_eq!(run(&["repro", "example-5-1"], dir.path()), 0);
    let (header, rows) = table(&dir.path().join("example-5-1.csv"));
    assert_eq!(header, ["k", "u_k(2)", "M(u_k)(2)", "floor(2)"]);
    assert_eq!(
        rows.iter().map(|r| number(&r[0])).collect::<Vec<_>>(),
        [1.0, 2.0, 4.0, 8.0, 16.0]
    );
    assert!(rows
        .iter()
        .all(|r| number(&r[1]) == 0.0 && number(&r[2]) >= 0.125 && number(&r[3]) == 0.125));
}

#[test]
fn bench_paths_agree_on_small_inputs() {
    let dir = tempfile::tempdir().unwrap();
    let args = ["bench", "--set", "bench.sizes=300", "--set", "bench.radii=1,40"];
    assert_eq!(run(&args, dir.path()), 0);
    let (header, rows) = table(&dir.path().join("bench.csv"));
    assert_eq!(header, ["N", "J", "t_naive", "t_fast", "max_abs_diff"]);
    assert_eq!(rows.len(), 2);
    assert_eq!(number(&rows[0][4]), 0.0, "J = 1 paths are identical");
    assert!(number(&rows[1][4]) <= 1e-10);
    let two_d = [
        "bench",
        "--set",
        "bench.dim=2",
        "--set",
        "bench.sizes=20",
        "--set",
        "bench.radii=1,6",
    ];
    assert_eq!(run(&two_d, dir.path()), 0);
}

#[test]
fn csv_input_reproduces_catalog_output() {
    let dir = tempfile::tempdir().unwrap();
    let a = dir.path().join("a");
    let b = dir.path().join("b");
    assert_eq!(run(&["compute", "--set", "f=tent:width=2", "--radii-max", "3"], &a), 0);
    let spec = format!("f=csv:path={}", a.join("input_f.csv").display());
    assert_eq!(run(&["compute", "--set", &spec, "--radii-max", "3"], &b), 0);
    for name in ["maximal.csv", "gradient.csv"] {
        assert_eq!(
            fs::read(a.join(name)).unwrap(),
            fs::read(b.join(name)).unwrap(),
            "{name}"
        );
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(100))]

    #[test]
    fn catalog_specs_parse_to_their_profiles(c in -10.0..10.0f64, w in 0.01..10.0f64, k in -20.0..20.0f64) {
        let tent: FunctionSpec = format!("tent:center={c},width={w}").parse().unwrap();
        prop_assert_eq!(tent, FunctionSpec::Catalog(Profile::tent(c, w)));
        let moved: FunctionSpec = format!("translate:k={k},base=bump,width={w}").parse().unwrap();
        prop_assert_eq!(moved, FunctionSpec::Catalog(Profile::bump(0.0, w, 1.0).translated(k)));
    }
}
