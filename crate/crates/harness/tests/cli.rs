use dirikern::report::read_trace;
use std::fs;
use std::path::Path;
use std::process::Command;

fn run_cli(cmd: &str, config: &str, dir: &Path, extra: &[&str]) -> (i32, String, String) {
    let cfg = dir.join(format!("{cmd}.json"));
    fs::write(&cfg, config).unwrap();
    let out = Command::new(env!("CARGO_BIN_EXE_dirikern"))
        .arg(cmd)
        .arg("--config")
        .arg(&cfg)
        .arg("--out")
        .arg(dir.join("out"))
        .args(extra)
        .output()
        .unwrap();
    (
        out.status.code().unwrap(),
        String::from_utf8(out.stdout).unwrap(),
        String::from_utf8(out.stderr).unwrap(),
    )
}

fn csv_lines(dir: &Path, stem: &str) -> Vec<Vec<String>> {
    let text = fs::read_to_string(dir.join("out").join(format!("{stem}.csv"))).unwrap();
    let mut r = csv::ReaderBuilder::new()
        .has_headers(false)
        .from_reader(text.as_bytes());
    r.records()
        .map(|rec| rec.unwrap().iter().map(str::to_string).collect())
        .collect()
}

const SMALL_DOUBLE: &str =
    r#""quadrature":{"double":{"radial_count":8,"angular_count":32,"target_rel_tol":0.1}}"#;

#[test]
fn kernel_sup_identity_exits_zero() {
    let dir = tempfile::tempdir().unwrap();
    let (code, _, err) = run_cli(
        "kernel-sup",
        r#"{"symbol":{"type":"identity"}}"#,
        dir.path(),
        &[],
    );
    assert_eq!(code, 0, "{err}");
    let lines = csv_lines(dir.path(), "kernel-sup");
    assert_eq!(
        lines[0],
        [
            "experiment",
            "input",
            "quantity",
            "value",
            "method",
            "tolerance",
            "verdict",
            "wall_ms"
        ]
    );
    assert_eq!(lines.len(), 2);
    let v: f64 = lines[1][3].parse().unwrap();
    assert!((v - 1.0).abs() < 1e-12);
    assert_eq!(lines[1][6], "Bounded");
    assert!(dir
        .path()
        .join("out/kernel-sup.kernel_sup_trace.dat")
        .exists());
}

#[test]
fn kernel_sup_constant_exits_two() {
    let dir = tempfile::tempdir().unwrap();
    let (code, _, err) = run_cli(
        "kernel-sup",
        r#"{"symbol":{"type":"poly","coeffs":[{"re":0.3}]},"sup":{"interior_samples":0}}"#,
        dir.path(),
        &[],
    );
    assert_eq!(code, 2, "{err}");
    let lines = csv_lines(dir.path(), "kernel-sup");
    assert_eq!(lines[1][6], "Unbounded");
}

#[test]
fn unconverged_quadrature_exits_three() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = r#"{"family":"monomials:8..8","params":{"sigma":1,"tau":1,"beta":0.5},
        "quadrature":{"double":{"radial_count":4,"angular_count":8,"target_rel_tol":1e-6,"max_refinements":1}}}"#;
    let (code, _, err) = run_cli("equivalence", cfg, dir.path(), &[]);
    assert_eq!(code, 3, "{err}");
    let lines = csv_lines(dir.path(), "equivalence");
    assert_eq!(lines[1][6], "E_CONVERGENCE");
    let trace = read_trace(&dir.path().join("out/equivalence.trace.json")).unwrap();
    assert_eq!(trace.rows[0].trace.len(), 2);
}

#[test]
fn config_errors_exit_four() {
    let dir = tempfile::tempdir().unwrap();
    let (code, _, err) = run_cli(
        "kernel-sup",
        r#"{"symbol":{"type":"mobius","a":{"re":"x"}}}"#,
        dir.path(),
        &[],
    );
    assert_eq!(code, 4);
    assert!(err.starts_with("E_CONFIG: symbol"), "{err}");

    let (code, _, err) = run_cli(
        "equivalence",
        r#"{"family":"monomials:1..8","params":{"sigma":1,"tau":1,"beta":2}}"#,
        dir.path(),
        &[],
    );
    assert_eq!(code, 4);
    assert!(
        err.starts_with("E_PARAM") && err.contains("upper bound"),
        "{err}"
    );
    assert!(!dir.path().join("out").exists());

    let missing = Command::new(env!("CARGO_BIN_EXE_dirikern"))
        .args(["norm", "--config", "/nonexistent/config.json"])
        .output()
        .unwrap();
    assert_eq!(missing.status.code(), Some(4));
}

#[test]
fn bound_check_square() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = format!(
        r#"{{"experiment":"bc","symbol":{{"type":"monomial","k":2}},"family":"monomials:1..8",
        "params":{{"sigma":1,"beta":0.5}},{SMALL_DOUBLE}}}"#
    );
    let (code, _, err) = run_cli("bound-check", &cfg, dir.path(), &[]);
    assert_eq!(code, 0, "{err}");
    let lines = csv_lines(dir.path(), "bc");
    assert_eq!(lines.len(), 9);
    let trace = read_trace(&dir.path().join("out/bc.trace.json")).unwrap();
    for (i, row) in trace.rows.iter().enumerate() {
        assert_eq!(row.input, format!("z^{}", i + 1));
        assert_eq!(row.verdict, "ok");
        assert_eq!(row.extra["pointwise_violations"], 0.0);
        assert!((row.extra["kernel_sup"] - 2.0).abs() < 1e-3);
    }
}

#[test]
fn bound_check_unbounded_kernel_exits_two() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = r#"{"symbol":{"type":"poly","coeffs":[{"re":0.3}]},"family":"monomials:1..2",
        "params":{"sigma":1,"beta":0.5},"sup":{"interior_samples":0}}"#;
    let (code, _, err) = run_cli("bound-check", cfg, dir.path(), &[]);
    assert_eq!(code, 2, "{err}");
}

#[test]
fn equivalence_reports_round_trip() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = r#"{"family":"monomials:1..8","params":{"sigma":1,"tau":1,"beta":0.5},
        "quadrature":{"double":{"radial_count":16,"angular_count":64,"target_rel_tol":0.1}}}"#;
    let (code, _, err) = run_cli("equivalence", cfg, dir.path(), &[]);
    assert_eq!(code, 0, "{err}");
    let lines = csv_lines(dir.path(), "equivalence");
    assert_eq!(lines.len(), 9);
    let trace = read_trace(&dir.path().join("out/equivalence.trace.json")).unwrap();
    assert_eq!(trace.rows.len(), 8);
    for (row, line) in trace.rows.iter().zip(&lines[1..]) {
        assert_eq!(row.value.unwrap(), line[3].parse::<f64>().unwrap());
        assert_eq!(row.tolerance, line[5].parse::<f64>().unwrap());
    }
    let again: dirikern::report::TraceMirror =
        serde_json::from_str(&serde_json::to_string(&trace).unwrap()).unwrap();
    assert_eq!(again, trace);
    let dat = fs::read_to_string(dir.path().join("out/equivalence.equivalence_ratio.dat")).unwrap();
    let data: Vec<_> = dat.lines().filter(|l| !l.starts_with('#')).collect();
    assert_eq!(data.len(), 8);
    assert!(data.iter().all(|l| l.split(' ').count() == 2));
}

#[test]
fn identical_configs_give_identical_csv() {
    let strip = |lines: Vec<Vec<String>>| -> Vec<Vec<String>> {
        lines
            .into_iter()
            .map(|mut l| {
                l.pop();
                l
            })
            .collect()
    };
    let cfg = format!(
        r#"{{"family":"geometric:1..3@0.5","params":{{"sigma":1,"tau":0.5,"beta":0.25}},{SMALL_DOUBLE}}}"#
    );
    let a = tempfile::tempdir().unwrap();
    let b = tempfile::tempdir().unwrap();
    assert_eq!(
        run_cli("equivalence", &cfg, a.path(), &["--seed", "7"]).0,
        0
    );
    assert_eq!(
        run_cli("equivalence", &cfg, b.path(), &["--seed", "7"]).0,
        0
    );
    assert_eq!(
        strip(csv_lines(a.path(), "equivalence")),
        strip(csv_lines(b.path(), "equivalence"))
    );

    let sup = r#"{"symbol":{"type":"mobius","a":{"re":0.3,"im":0.2}}}"#;
    assert_eq!(run_cli("kernel-sup", sup, a.path(), &["--seed", "3"]).0, 0);
    assert_eq!(run_cli("kernel-sup", sup, b.path(), &["--seed", "3"]).0, 0);
    assert_eq!(
        strip(csv_lines(a.path(), "kernel-sup")),
        strip(csv_lines(b.path(), "kernel-sup"))
    );
}

#[test]
fn rank_and_selfmap_checks() {
    let dir = tempfile::tempdir().unwrap();
    let (code, _, err) = run_cli(
        "rank-check",
        r#"{"symbol":{"type":"monomial","k":2}}"#,
        dir.path(),
        &[],
    );
    assert_eq!(code, 0, "{err}");
    let lines = csv_lines(dir.path(), "rank-check");
    assert_eq!(lines[1][6], "Pass");
    assert!((lines[1][3].parse::<f64>().unwrap() - 2.0).abs() < 1e-12);

    let (code, _, _) = run_cli(
        "selfmap-check",
        r#"{"symbol":{"type":"poly","coeffs":[{"re":0.5},{"re":0.5}]}}"#,
        dir.path(),
        &[],
    );
    assert_eq!(code, 0);
    let (code, _, _) = run_cli(
        "selfmap-check",
        r#"{"symbol":{"type":"poly","coeffs":[{"re":0.6},{"re":0.6}]}}"#,
        dir.path(),
        &[],
    );
    assert_eq!(code, 2);
    let lines = csv_lines(dir.path(), "selfmap-check");
    assert_eq!(lines[1][6], "Fail");
    assert!((lines[1][3].parse::<f64>().unwrap() - 1.2).abs() < 1e-12);
}

#[test]
fn norm_command_and_refine_flag() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = r#"{"family":"monomials:1..3","params":{"p":1}}"#;
    let (code, _, err) = run_cli("norm", cfg, dir.path(), &[]);
    assert_eq!(code, 0, "{err}");
    let base = read_trace(&dir.path().join("out/norm.trace.json")).unwrap();
    assert_eq!(base.rows.len(), 6);
    assert!(base
        .rows
        .iter()
        .all(|r| r.verdict == "agree" || r.verdict == "exact"));
    let (code, _, _) = run_cli("norm", cfg, dir.path(), &["--refine", "1"]);
    assert_eq!(code, 0);
    let refined = read_trace(&dir.path().join("out/norm.trace.json")).unwrap();
    assert_eq!(refined.rows[1].trace[0].0, 2.0 * base.rows[1].trace[0].0);
}
