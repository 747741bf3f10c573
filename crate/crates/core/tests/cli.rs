use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_multistrand"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn run_in(dir: &Path, args: &[&str]) -> Output {
    let mut all = args.to_vec();
    all.extend(["--out", dir.to_str().unwrap()]);
    let out = run(&all);
    assert!(
        out.status.success(),
        "{args:?} failed: {}",
        String::from_utf8_lossy(&out.stderr)
    );
    out
}

fn report(dir: &Path) -> Value {
    serde_json::from_str(&std::fs::read_to_string(dir.join("report.json")).unwrap()).unwrap()
}

fn csv_rows(dir: &Path, name: &str) -> (Vec<String>, Vec<Vec<String>>) {
    let text = std::fs::read_to_string(dir.join(name)).unwrap();
    assert!(!text.contains('\r'), "{name} must use LF line endings");
    let mut r = csv::Reader::from_reader(text.as_bytes());
    let header = r.headers().unwrap().iter().map(String::from).collect();
    let rows = r
        .records()
        .map(|x| x.unwrap().iter().map(String::from).collect())
        .collect();
    (header, rows)
}

fn num(v: &Value) -> f64 {
    v.as_f64().expect("number")
}

#[test]
fn uniform_chain_homogenizes_to_unit_speed() {
    let dir = tempfile::tempdir().unwrap();
    run_in(dir.path(), &["homogenize", "--preset", "uniform-chain"]);
    let r = report(dir.path());
    assert_eq!(r["command"], "homogenize");
    assert!((num(&r["c"]) - 1.0).abs() < 1e-12);
    let (header, rows) = csv_rows(dir.path(), "alphabeta.csv");
    assert_eq!(header, ["index", "m", "j", "alpha", "beta"]);
    assert_eq!(rows.len(), 1);
}

#[test]
fn fig3_outputs_and_formats() {
    let dir = tempfile::tempdir().unwrap();
    run_in(dir.path(), &["homogenize", "--preset", "paper-2x2-fig3"]);
    let c = num(&report(dir.path())["c"]);
    assert!((c - 0.327169).abs() < 1e-6);

    run_in(dir.path(), &["derive-bc", "--preset", "paper-2x2-fig3"]);
    let r = report(dir.path());
    assert_eq!(r["left"]["kind"], "robin");
    assert!((num(&r["left"]["d"]) + 0.020932).abs() < 1e-6);
    assert!((num(&r["right"]["d"]) + 0.042426).abs() < 1e-6);

    run_in(dir.path(), &["validate", "--preset", "paper-2x2-fig3"]);
    let (header, rows) = csv_rows(dir.path(), "modes.csv");
    assert_eq!(
        header,
        ["n", "x", "micro_avg", "macro_robin", "macro_dirichlet"]
    );
    assert_eq!(rows.len(), 17);

    run_in(
        dir.path(),
        &[
            "dispersion",
            "--preset",
            "paper-2x2-fig3",
            "--k",
            "0.001,0.002",
        ],
    );
    let (header, rows) = csv_rows(dir.path(), "dispersion.csv");
    assert_eq!(header[0], "k");
    assert_eq!(header.len(), 1 + 4);
    let k: f64 = rows[0][0].parse().unwrap();
    let lam: f64 = rows[0][1].parse().unwrap();
    assert!((lam / (k * k) - c).abs() / c < 1e-4);

    // csv format puts the primary table on stdout
    let out = run_in(
        dir.path(),
        &[
            "homogenize",
            "--preset",
            "paper-2x2-fig3",
            "--format",
            "csv",
        ],
    );
    assert!(String::from_utf8(out.stdout)
        .unwrap()
        .starts_with("index,m,j,alpha,beta\n"));
}

#[test]
fn identical_runs_are_byte_identical() {
    let (a, b) = (tempfile::tempdir().unwrap(), tempfile::tempdir().unwrap());
    for dir in [&a, &b] {
        run_in(dir.path(), &["validate", "--preset", "paper-2x2-fig3"]);
    }
    for name in ["report.json", "modes.csv"] {
        assert_eq!(
            std::fs::read(a.path().join(name)).unwrap(),
            std::fs::read(b.path().join(name)).unwrap()
        );
    }
    let text = std::fs::read_to_string(a.path().join("report.json")).unwrap();
    assert!(text.contains("e-"), "floats carry exponents");
}

#[test]
fn config_file_with_flux_ends() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("run.json");
    std::fs::write(
        &cfg,
        r#"{
  "s": 1, "p": 2, "h": 0.5, "N": 8,
  "kappa_long": [[1.0], [3.0]],
  "kappa_cross": [[[0.0]], [[0.0]]],
  "rho": [[1.0], [2.0]],
  "micro_bc_left": {"side": "left", "kind": "flux", "d": [0.0]},
  "micro_bc_right": {"side": "right", "kind": "flux", "d": [0.0]}
}"#,
    )
    .unwrap();
    run_in(
        dir.path(),
        &["derive-bc", "--config", cfg.to_str().unwrap()],
    );
    let r = report(dir.path());
    assert_eq!(r["left"]["kind"], "neumann");
    let w: Vec<f64> = r["left"]["rhs_weights"]
        .as_array()
        .unwrap()
        .iter()
        .map(num)
        .collect();
    // zero flux data gives dU/dx = 0
    assert_eq!(w.len(), 1);
    assert!(w[0].is_finite());
}

#[test]
fn overrides_apply_on_top_of_presets() {
    let dir = tempfile::tempdir().unwrap();
    run_in(
        dir.path(),
        &[
            "homogenize",
            "--preset",
            "paper-2x2-fig3",
            "--h",
            "0.5",
            "--N",
            "20",
            "--tol",
            "residual=1e-13",
        ],
    );
    let r = report(dir.path());
    assert_eq!(r["lattice"]["N"], 20);
    assert!((num(&r["lattice"]["h"]) - 0.5).abs() < 1e-15);
}

#[test]
fn disconnected_cell_warns() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("split.json");
    std::fs::write(
        &cfg,
        r#"{"s": 2, "p": 1, "h": 1.0, "N": 6,
  "kappa_long": [[1.0, 2.0]],
  "kappa_cross": [[[0.0, 0.0], [0.0, 0.0]]],
  "rho": [[1.0, 1.0]]}"#,
    )
    .unwrap();
    let out = run_in(dir.path(), &["spectrum", "--config", cfg.to_str().unwrap()]);
    let err = String::from_utf8(out.stderr).unwrap();
    assert!(err.contains("warning"), "stderr: {err}");
    assert_eq!(report(dir.path())["zero_multiplicity"], 2);
}

fn assert_error_line(out: &Output, code: i32, tag: &str) {
    assert_eq!(out.status.code(), Some(code));
    let err = String::from_utf8_lossy(&out.stderr);
    let lines: Vec<&str> = err.lines().filter(|l| l.starts_with("ERROR ")).collect();
    assert_eq!(lines.len(), 1, "stderr: {err}");
    assert!(
        lines[0].starts_with(&format!("ERROR code={tag} msg=")),
        "got {}",
        lines[0]
    );
}

#[test]
fn errors_are_single_machine_readable_lines() {
    let dir = tempfile::tempdir().unwrap();
    // the five-strand preset has no default spacing
    let out = run(&[
        "homogenize",
        "--preset",
        "paper-5x10-table1",
        "--out",
        dir.path().to_str().unwrap(),
    ]);
    assert_error_line(&out, 2, "PARSE_ERROR");

    let bad = dir.path().join("bad.json");
    std::fs::write(&bad, "{\"s\": 2,\n \"p\": }").unwrap();
    let out = run(&["homogenize", "--config", bad.to_str().unwrap()]);
    assert_error_line(&out, 2, "PARSE_ERROR");

    let neg = dir.path().join("neg.json");
    std::fs::write(
        &neg,
        r#"{"s": 1, "p": 1, "h": 1.0, "N": 4, "kappa_long": [[-1.0]], "kappa_cross": [[[0.0]]], "rho": [[1.0]]}"#,
    )
    .unwrap();
    let out = run(&["homogenize", "--config", neg.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
    assert_error_line(&out, 2, "VALIDATION_ERROR");
}
