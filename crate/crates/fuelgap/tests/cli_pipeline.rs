//! CLI behavioral tests: exit codes, artifact shapes, and the contract that
//! `report` emits byte-identical files to the standalone stages run in
//! sequence with the same root seed.

use std::path::{Path, PathBuf};
use std::process::Command;

fn bin() -> &'static str {
    env!("CARGO_BIN_EXE_fuelgap")
}

fn run_ok(args: &[&str]) {
    let out = Command::new(bin()).args(args).output().unwrap();
    assert!(
        out.status.success(),
        "fuelgap {args:?} failed: {}",
        String::from_utf8_lossy(&out.stderr)
    );
}

fn fixture(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("tests/fixtures").join(name)
}

#[test]
fn usage_errors_exit_2_and_write_nothing() {
    let dir = tempfile::tempdir().unwrap();
    let out = Command::new(bin())
        .args(["select", "--no-such-flag", "--output-dir", dir.path().to_str().unwrap()])
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("code=usage"));
    assert_eq!(std::fs::read_dir(dir.path()).unwrap().count(), 0);

    let out = Command::new(bin()).args(["frobnicate"]).output().unwrap();
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn data_errors_exit_1_with_code_prefix() {
    let out = Command::new(bin())
        .args(["ingest", "--input", "/definitely/not/here.csv"])
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(1));
    let err = String::from_utf8_lossy(&out.stderr);
    assert!(err.starts_with("code="), "stderr: {err}");
}

#[test]
fn ingest_rejects_malformed_rows_with_line_numbers() {
    let dir = tempfile::tempdir().unwrap();
    let input = dir.path().join("bad.csv");
    std::fs::write(
        &input,
        "garage_id,driver_id,reported_mpg,epa_mpg,model_year,fuel_type,transmission\n\
         g1,a,25.0,24.0,1999,Gasoline,Manual\n\
         g1,b,not-a-number,26.0,2004,Gasoline,Automatic\n",
    )
    .unwrap();
    let out = Command::new(bin())
        .args(["ingest", "--input", input.to_str().unwrap()])
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(1));
    let err = String::from_utf8_lossy(&out.stderr);
    assert!(err.contains("code=parse") && err.contains("line 3"), "stderr: {err}");
}

#[test]
fn select_ranks_the_generating_family_first() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path().to_str().unwrap();
    run_ok(&["generate", "--n", "7126", "--seed", "7", "--output-dir", d]);
    run_ok(&[
        "ingest",
        "--input",
        &format!("{d}/records.csv"),
        "--output-dir",
        d,
    ]);
    run_ok(&[
        "select",
        "--input",
        &format!("{d}/pairs.csv"),
        "--output-dir",
        d,
    ]);
    let json: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(format!("{d}/selection.json")).unwrap())
            .unwrap();
    let first = &json["ranking_bic"][0];
    assert_eq!(first["kind"], "StudentT", "ranking head: {first}");
    // csv table carries all 21 rows plus header
    let table = std::fs::read_to_string(format!("{d}/selection.csv")).unwrap();
    assert_eq!(table.lines().count(), 22);
}

#[test]
fn report_matches_standalone_stages() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path().to_str().unwrap();
    run_ok(&["generate", "--n", "900", "--seed", "5", "--output-dir", d]);
    let records = format!("{d}/records.csv");

    let rep = tempfile::tempdir().unwrap();
    let r = rep.path().to_str().unwrap();
    run_ok(&["report", "--input", &records, "--seed", "21", "--output-dir", r]);

    let st = tempfile::tempdir().unwrap();
    let s = st.path().to_str().unwrap();
    run_ok(&["ingest", "--input", &records, "--output-dir", s]);
    run_ok(&["trim", "--input", &format!("{s}/pairs.csv"), "--output-dir", s]);
    let trimmed = format!("{s}/trimmed_pairs.csv");
    run_ok(&["describe", "--input", &trimmed, "--output-dir", s]);
    run_ok(&["select", "--input", &trimmed, "--output-dir", s]);
    // the report's downstream stages run at the BIC winner
    let json: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(format!("{s}/selection.json")).unwrap())
            .unwrap();
    let kind = json["ranking_bic"][0]["kind"].as_str().unwrap();
    let rot = json["ranking_bic"][0]["rotation"].as_str().unwrap();
    let slug = match (kind, rot) {
        ("StudentT", _) => "student-t".to_string(),
        (k, "None") => k.to_lowercase(),
        (k, _) => format!("survival-{}", k.to_lowercase()),
    };
    run_ok(&[
        "gof", "--input", &trimmed, "--family", &slug, "--seed", "21", "--output-dir", s,
    ]);
    run_ok(&[
        "simulate", "--input", &trimmed, "--family", &slug, "--seed", "21", "--output-dir", s,
    ]);
    run_ok(&[
        "crosstab", "--input", &trimmed, "--source", "observed", "--output-dir", s,
    ]);
    run_ok(&[
        "crosstab", "--input", &trimmed, "--source", "simulated", "--family", &slug, "--seed",
        "21", "--output-dir", s,
    ]);

    for name in [
        "pairs.csv",
        "rejections.csv",
        "trimmed_pairs.csv",
        "trim_report.json",
        "descriptive.csv",
        "dependence.json",
        "selection.csv",
        "selection.json",
        "pairwise_tests.csv",
        "lambda.csv",
        "simulated_pairs.csv",
        "prediction_report.json",
        "crosstab_observed.csv",
        "crosstab_simulated.csv",
    ] {
        let a = std::fs::read(rep.path().join(name)).unwrap();
        let b = std::fs::read(st.path().join(name)).unwrap();
        assert_eq!(a, b, "artifact {name} differs between report and standalone run");
    }
}

#[test]
fn json_format_flag_switches_table_output() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path().to_str().unwrap();
    run_ok(&["generate", "--n", "200", "--seed", "9", "--output-dir", d]);
    run_ok(&[
        "ingest",
        "--input",
        &format!("{d}/records.csv"),
        "--format",
        "json",
        "--output-dir",
        d,
    ]);
    assert!(Path::new(&format!("{d}/rejections.json")).exists());
    assert!(!Path::new(&format!("{d}/rejections.csv")).exists());
}

#[test]
fn fit_flags_effectively_gaussian_nu() {
    // Gaussian data pushed through the t family drives nu to its cap
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path().to_str().unwrap();
    run_ok(&[
        "generate", "--n", "4000", "--seed", "31", "--family", "gaussian", "--theta", "0.4",
        "--output-dir", d,
    ]);
    run_ok(&["ingest", "--input", &format!("{d}/records.csv"), "--output-dir", d]);
    run_ok(&[
        "fit", "--input", &format!("{d}/pairs.csv"), "--family", "student-t", "--output-dir", d,
    ]);
    let json: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(format!("{d}/fit_student-t.json")).unwrap())
            .unwrap();
    let nu = json["params"]["nu"].as_f64().unwrap();
    assert!(nu > 15.0, "nu = {nu} should head toward the effectively-Gaussian cap");
}

#[test]
fn crosstab_fixture_grid_shape() {
    let out = tempfile::tempdir().unwrap();
    run_ok(&[
        "crosstab",
        "--input",
        fixture("observed_pairs.csv").to_str().unwrap(),
        "--source",
        "observed",
        "--output-dir",
        out.path().to_str().unwrap(),
    ]);
    let grid = std::fs::read_to_string(out.path().join("crosstab_observed.csv")).unwrap();
    let lines: Vec<&str> = grid.lines().collect();
    assert_eq!(lines.len(), 6); // header + 4 categories + total
    for line in &lines[1..] {
        assert_eq!(line.split(',').count(), 6);
    }
}
