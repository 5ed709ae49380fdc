use std::fs;
use std::path::Path;

use densitometer::cli::run;
use densitometer::setmodel::CompactSetModel;
use densitometer::weights::IndexReport;

fn run_in(dir: &Path, args: &[&str]) -> i32 {
    let mut argv = vec!["densitometer", "--out-dir", dir.to_str().unwrap()];
    argv.extend_from_slice(args);
    run(argv)
}

#[test]
fn json_artifacts_reload_equal() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    assert_eq!(run_in(d, &["indices", "--seq", r#"{"kind":"power","c":1,"p":2}"#, "--out", "i.json"]), 0);
    let text = fs::read_to_string(d.join("i.json")).unwrap();
    let report: IndexReport = serde_json::from_str(&text).unwrap();
    assert!((report.e_bt_est - 0.5).abs() < 0.02);
    assert_eq!(serde_json::to_string_pretty(&report).unwrap() + "\n", text);

    assert_eq!(run_in(d, &["build-set", "--seq", "power:c=0.25,p=2", "--n", "3124", "--out", "set.json"]), 0);
    let text = fs::read_to_string(d.join("set.json")).unwrap();
    let model: CompactSetModel = serde_json::from_str(&text).unwrap();
    assert_eq!(model.trunc(), 3124);
    assert_eq!(serde_json::to_string_pretty(&model).unwrap() + "\n", text);
}

#[test]
fn dilate2d_accepts_squares_and_rectangles() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    assert_eq!(run_in(d, &["dilate2d", "--in", "[[0,0,1]]", "--gamma", "2", "--out", "a.json"]), 0);
    fs::write(d.join("cubes.json"), "[[0,1,0,1]]").unwrap();
    assert_eq!(run_in(d, &["dilate2d", "--in", "cubes.json", "--gamma", "2", "--out", "b.json"]), 0);
    let a = fs::read_to_string(d.join("a.json")).unwrap();
    assert_eq!(a, fs::read_to_string(d.join("b.json")).unwrap());
    let v: serde_json::Value = serde_json::from_str(&a).unwrap();
    assert_eq!(v["rects"], serde_json::json!([[-2.0, 3.0, -2.0, 3.0]]));
    assert_eq!(v["measure"], 25.0);
    assert_eq!(v["identity_rhs"], 25.0);
    assert_eq!(run_in(d, &["dilate2d", "--in", "[[0,0,1],[0.5,0.5,1]]", "--gamma", "2"]), 2);
}

#[test]
fn seed_fixes_scan_output() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    assert_eq!(run_in(d, &["build-set", "--seq", "power:c=0.25,p=2", "--n", "3124", "--out", "set.json"]), 0);
    assert_eq!(run_in(d, &["auxfn", "--seq", "power:c=0.25,p=2", "--out", "h.csv"]), 0);
    let scan = |seed: &str, out: &str| {
        run_in(d, &["scan", "--set", "set.json", "--auxfn", "h.csv", "--points", "10", "--rects", "50", "--seed", seed, "--out", out])
    };
    assert_eq!(scan("7", "a.csv"), 0);
    assert_eq!(scan("7", "b.csv"), 0);
    assert_eq!(scan("8", "c.csv"), 0);
    let a = fs::read(d.join("a.csv")).unwrap();
    assert_eq!(a, fs::read(d.join("b.csv")).unwrap());
    assert_ne!(a, fs::read(d.join("c.csv")).unwrap());
}

#[test]
fn geometric_sequence_reports_findings() {
    let dir = tempfile::tempdir().unwrap();
    assert_eq!(run_in(dir.path(), &["indices", "--seq", "geometric:c=1,rho=0.5"]), 1);
}
