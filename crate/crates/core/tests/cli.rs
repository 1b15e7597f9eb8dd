use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use phasestab::families::gaussian;
use phasestab::grid::{shift, GridSpec, SampledFunction};
use phasestab::io::FunctionFile;
use phasestab::Complex64;

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_phasestab"))
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().expect("binary runs")
}

fn write(dir: &Path, name: &str, f: &SampledFunction) -> PathBuf {
    let path = dir.join(name);
    std::fs::write(&path, serde_json::to_string(&FunctionFile::from_function(f)).unwrap()).unwrap();
    path
}

fn unit_gaussian(grid: &GridSpec) -> SampledFunction {
    gaussian(grid, &[0.0], 1.0, Complex64::new(1.0, 0.0)).unwrap()
}

fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}

#[test]
fn verify_identical_inputs_certifies() {
    let dir = tempfile::tempdir().unwrap();
    let grid = GridSpec::uniform(1, 16.0, 1024).unwrap();
    let f = write(dir.path(), "f.json", &unit_gaussian(&grid));
    let o = run(&["verify", "--f", f.to_str().unwrap(), "--g", f.to_str().unwrap(), "--p", "1.5"]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let report: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    assert!(report["lhs"].as_f64().unwrap() < 1e-14);
    assert!(report["slack"].as_f64().unwrap().abs() < 1e-14);
}

#[test]
fn verify_shifted_gaussian_reports_translation_and_writes_sidecar() {
    let dir = tempfile::tempdir().unwrap();
    let grid = GridSpec::uniform(1, 16.0, 1024).unwrap();
    let f0 = unit_gaussian(&grid);
    let g0 = shift(&f0, &[0.05]).unwrap();
    let f = write(dir.path(), "f.json", &f0);
    let g = write(dir.path(), "g.json", &g0);
    let out = dir.path().join("report.json");
    let o = run(&[
        "verify",
        "--f",
        f.to_str().unwrap(),
        "--g",
        g.to_str().unwrap(),
        "--p",
        "1",
        "--out",
        out.to_str().unwrap(),
    ]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let report: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(&out).unwrap()).unwrap();
    let keys: Vec<&str> = report.as_object().unwrap().keys().map(String::as_str).collect();
    for k in [
        "p",
        "epsilon",
        "lhs",
        "term_modulus",
        "term_smoothness",
        "term_translation",
        "rhs",
        "slack",
    ] {
        assert!(keys.contains(&k), "missing {k}");
    }
    assert!(report["term_translation"].as_f64().unwrap() > 0.0);
    assert!(report["term_modulus"].as_f64().unwrap() < 1e-12);
    assert!(report["slack"].as_f64().unwrap() >= 0.0);
    let config = dir.path().join("report.json.config.json");
    let config: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(config).unwrap()).unwrap();
    assert_eq!(config["subcommand"], "verify");
    assert_eq!(config["p"], 1.0);
}

#[test]
fn verify_csv_has_header_and_one_row() {
    let dir = tempfile::tempdir().unwrap();
    let grid = GridSpec::uniform(1, 8.0, 256).unwrap();
    let f0 = unit_gaussian(&grid);
    let f = write(dir.path(), "f.json", &f0);
    let g = write(dir.path(), "g.json", &f0.scale(Complex64::new(0.0, 1.0)).unwrap());
    let o = run(&[
        "verify",
        "--f",
        f.to_str().unwrap(),
        "--g",
        g.to_str().unwrap(),
        "--p",
        "1.25",
        "--format",
        "csv",
    ]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let text = String::from_utf8(o.stdout).unwrap();
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines.len(), 2);
    assert!(lines[0].starts_with("p,epsilon,lhs,"));
    assert_eq!(lines[0].split(',').count(), lines[1].split(',').count());
}

#[test]
fn non_finite_sample_is_an_input_error() {
    let dir = tempfile::tempdir().unwrap();
    let grid = GridSpec::uniform(1, 4.0, 8).unwrap();
    let good = write(dir.path(), "f.json", &unit_gaussian(&grid));
    let bad = dir.path().join("bad.json");
    std::fs::write(
        &bad,
        r#"{"dimension":1,"half_extent":[4.0],"points_per_axis":[8],"domain":"space",
            "values_re":[0,0,0,"NaN",0,0,0,0],"values_im":[0,0,0,0,0,0,0,0]}"#,
    )
    .unwrap();
    let o = run(&["verify", "--f", good.to_str().unwrap(), "--g", bad.to_str().unwrap(), "--p", "1"]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stderr(&o).contains("non-finite sample"), "{}", stderr(&o));
}

#[test]
fn grid_mismatch_is_an_input_error() {
    let dir = tempfile::tempdir().unwrap();
    let f = write(dir.path(), "f.json", &unit_gaussian(&GridSpec::uniform(1, 8.0, 64).unwrap()));
    let g = write(dir.path(), "g.json", &unit_gaussian(&GridSpec::uniform(1, 8.0, 128).unwrap()));
    let o = run(&["verify", "--f", f.to_str().unwrap(), "--g", g.to_str().unwrap(), "--p", "1"]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stderr(&o).contains("grid mismatch"), "{}", stderr(&o));
}

#[test]
fn exponent_outside_range_is_an_input_error() {
    let dir = tempfile::tempdir().unwrap();
    let f = write(dir.path(), "f.json", &unit_gaussian(&GridSpec::uniform(1, 8.0, 64).unwrap()));
    for p in ["2", "0.5"] {
        let o = run(&["verify", "--f", f.to_str().unwrap(), "--g", f.to_str().unwrap(), "--p", p]);
        assert_eq!(o.status.code(), Some(1));
        assert!(stderr(&o).contains("invalid p"), "{}", stderr(&o));
    }
}

#[test]
fn malformed_and_missing_files_are_input_errors() {
    let dir = tempfile::tempdir().unwrap();
    let bad = dir.path().join("bad.json");
    std::fs::write(&bad, "{not json").unwrap();
    let o = run(&["verify", "--f", bad.to_str().unwrap(), "--g", bad.to_str().unwrap(), "--p", "1"]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stderr(&o).contains("malformed"), "{}", stderr(&o));
    let missing = dir.path().join("missing.json");
    let o = run(&["verify", "--f", missing.to_str().unwrap(), "--g", bad.to_str().unwrap(), "--p", "1"]);
    assert_eq!(o.status.code(), Some(1));
}

#[test]
fn corollary1_rejects_complex_spectrum_and_accepts_real_one() {
    let dir = tempfile::tempdir().unwrap();
    let grid = GridSpec::uniform(1, 16.0, 1024).unwrap();
    let f0 = unit_gaussian(&grid);
    let f = write(dir.path(), "f.json", &f0);
    let g = write(dir.path(), "g.json", &f0.scale(Complex64::new(0.9, 0.0)).unwrap());
    let o = run(&["corollary1", "--f", f.to_str().unwrap(), "--g", g.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let shifted = write(dir.path(), "s.json", &shift(&f0, &[0.3]).unwrap());
    let o = run(&["corollary1", "--f", shifted.to_str().unwrap(), "--g", g.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(1), "{}", stderr(&o));
}

#[test]
fn lemma1_scan_exit_codes() {
    let o = run(&["lemma1", "--radius-steps", "500", "--angle-steps", "500"]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let summary: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    assert!(summary["min_gap"].as_f64().unwrap() >= -1e-12);
    assert_eq!(summary["steps"], serde_json::json!([500, 500]));
    assert_eq!(run(&["lemma1", "--radius-steps", "2", "--angle-steps", "2"]).status.code(), Some(0));
    assert_eq!(run(&["lemma1", "--radius-steps", "1", "--angle-steps", "8"]).status.code(), Some(1));
}

#[test]
fn experiment_writes_csv_and_json() {
    let dir = tempfile::tempdir().unwrap();
    let o = run(&["experiment", "--name", "optimality", "--out", dir.path().to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let csv = std::fs::read_to_string(dir.path().join("optimality_l2.csv")).unwrap();
    assert!(csv.starts_with("parameter,observable\n"));
    assert_eq!(csv.lines().count(), 6);
    for (name, slope) in [("optimality_l2", -0.5), ("optimality_l1", -1.0)] {
        let fit: serde_json::Value =
            serde_json::from_str(&std::fs::read_to_string(dir.path().join(format!("{name}.json"))).unwrap()).unwrap();
        assert!((fit["fitted_slope"].as_f64().unwrap() - slope).abs() < 0.1);
        assert_eq!(fit["fitted_values"].as_array().unwrap().len(), 5);
    }
    assert!(dir.path().join("optimality_report.json").exists());
    let config: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(dir.path().join("optimality.config.json")).unwrap()).unwrap();
    assert_eq!(config["sweep"], serde_json::json!([4.0, 8.0, 16.0, 32.0, 64.0]));
}

#[test]
fn experiment_sweep_override_is_used() {
    let o = run(&["experiment", "--name", "translation", "--sweep", "0.001,0.003,0.01,0.03"]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let r: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(r["lhs"]["parameter_values"], serde_json::json!([0.001, 0.003, 0.01, 0.03]));
}

#[test]
fn reports_are_byte_stable() {
    let args = ["experiment", "--name", "tail", "--k", "3", "--n", "2"];
    assert_eq!(run(&args).stdout, run(&args).stdout);
    let scan = ["lemma1", "--radius-steps", "300", "--angle-steps", "300"];
    assert_eq!(run(&scan).stdout, run(&scan).stdout);
}

#[test]
fn tail_experiment_reports_to_stdout() {
    let o = run(&["experiment", "--name", "tail", "--k", "2", "--n", "1"]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let r: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    assert!((r["fitted_slope"].as_f64().unwrap() - 1.5).abs() < 0.1);
    assert_eq!(run(&["experiment", "--name", "tail", "--k", "1", "--n", "1"]).status.code(), Some(1));
}

#[test]
fn unknown_experiment_and_bad_usage_exit_one() {
    assert_eq!(run(&["experiment", "--name", "bogus"]).status.code(), Some(1));
    assert_eq!(run(&["verify"]).status.code(), Some(1));
    assert_eq!(run(&["--help"]).status.code(), Some(0));
}
