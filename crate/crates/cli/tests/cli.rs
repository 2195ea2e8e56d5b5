use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_cubecocycle"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn json(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).unwrap_or_else(|e| panic!("{e}: {}", String::from_utf8_lossy(&out.stdout)))
}

fn record<'a>(report: &'a Value, check: &str) -> &'a Value {
    report["records"]
        .as_array()
        .unwrap()
        .iter()
        .find(|r| r["check"] == check)
        .unwrap_or_else(|| panic!("no record {check}"))
}

fn write(dir: &Path, name: &str, text: &str) -> String {
    let p = dir.join(name);
    std::fs::write(&p, text).unwrap();
    p.to_str().unwrap().to_string()
}

#[test]
fn validate_square_file() {
    let dir = tempfile::tempdir().unwrap();
    let p = write(dir.path(), "sq.json", r#"{"n_vertices": 4, "cubes": [[0, 1, 2, 3]]}"#);
    let out = run(&["validate", "--input", &p]);
    assert_eq!(out.status.code(), Some(0));
    let r = json(&out);
    assert_eq!(r["schema_version"], 1);
    assert_eq!(record(&r, "complex.validate")["status"], "pass");
    assert_eq!(record(&r, "hyperplanes.two_sided")["status"], "pass");
}

#[test]
fn validate_unfilled_four_cycle() {
    let dir = tempfile::tempdir().unwrap();
    let p = write(dir.path(), "c4.json", r#"{"n_vertices": 4, "cubes": [[0, 1], [1, 2], [2, 3], [3, 0]]}"#);
    let out = run(&["validate", "--input", &p]);
    assert_eq!(out.status.code(), Some(1));
    let r = json(&out);
    let v = record(&r, "complex.validate");
    assert_eq!(v["status"], "fail");
    assert_eq!(v["witness"]["kind"], "unfilled_four_cycle");
}

#[test]
fn validate_truncated_json() {
    let dir = tempfile::tempdir().unwrap();
    let p = write(dir.path(), "bad.json", r#"{"n_vertices": 4, "cubes": [[0, 1"#);
    let out = run(&["validate", "--input", &p]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("parsing"));
}

#[test]
fn usage_errors_exit_two() {
    assert_eq!(run(&["verify"]).status.code(), Some(2));
    assert_eq!(run(&["verify", "--family", "grid(2,2"]).status.code(), Some(2));
    assert_eq!(run(&["norm-scan", "--family", "segment(2)", "--z-grid", "3x4@1.2"]).status.code(), Some(2));
    assert_eq!(run(&["verify", "--family", "grid(40,40,40)"]).status.code(), Some(2));
    assert_eq!(run(&["coefficients", "--family", "segment(2)", "--x", "0", "--y", "9"]).status.code(), Some(2));
}

#[test]
fn verify_binary_tree() {
    let out = run(&["verify", "--family", "tree(2,4)"]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let r = json(&out);
    for check in ["cocycle.monomial_law", "cocycle.sparsity", "cocycle.tree_norm_bound", "cocycle.unitarity"] {
        assert_eq!(record(&r, check)["status"], "pass", "{check}");
    }
    assert_eq!(r["summary"]["failed"], 0);
}

#[test]
fn verify_cube_exponents() {
    let out = run(&["verify", "--family", "hypercube(3)", "--checks", "monomial_law"]);
    assert_eq!(out.status.code(), Some(0));
    let r = json(&out);
    let m = &record(&r, "cocycle.monomial_law")["metrics"];
    assert!(m["max_ell"].as_f64().unwrap() <= 6.0);
    assert_eq!(m["ell_bound"], 6);
}

#[test]
fn verify_grid_interval_audit() {
    let dir = tempfile::tempdir().unwrap();
    let csv = dir.path().join("audit.csv");
    let out = run(&[
        "verify",
        "--family",
        "grid:3x3",
        "--checks",
        "interval_ball",
        "--audit-csv",
        csv.to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(0));
    let r = json(&out);
    assert_eq!(record(&r, "hulls.interval_ball")["status"], "pass");
    let mut rdr = csv::Reader::from_path(&csv).unwrap();
    let rows: Vec<csv::StringRecord> = rdr.records().map(Result::unwrap).collect();
    // 256 pairs, one row per radius 0..=d(x,y)
    assert!(rows.len() > 256);
    assert!(rows.iter().all(|r| &r[7] == "true"));
}

#[test]
fn reports_repeat() {
    let args = ["verify", "--family", "grid(2,3)", "--seed", "7", "--max-pairs", "10"];
    assert_eq!(run(&args).stdout, run(&args).stdout);
}

fn scan_rows(family: &str, grid: &str) -> Vec<csv::StringRecord> {
    let out = run(&["norm-scan", "--family", family, "--z-grid", grid, "--format", "csv"]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let mut rdr = csv::Reader::from_reader(out.stdout.as_slice());
    assert_eq!(
        rdr.headers().unwrap().iter().collect::<Vec<_>>(),
        ["family", "x", "y", "z_re", "z_im", "norm", "bound", "tree_bound", "pass"]
    );
    rdr.records().map(Result::unwrap).collect()
}

#[test]
fn norm_scan_rows() {
    let rows = scan_rows("grid(2,2)", "3x2@0.5");
    // 81 pairs at z = 0, ±0.25, ±0.5
    assert_eq!(rows.len(), 81 * 5);
    for r in &rows {
        let (z_re, z_im): (f64, f64) = (r[3].parse().unwrap(), r[4].parse().unwrap());
        let (norm, bound): (f64, f64) = (r[5].parse().unwrap(), r[6].parse().unwrap());
        assert_eq!(&r[8], "true");
        if z_re == 0.0 && z_im == 0.0 {
            assert_eq!(norm, 1.0);
            assert!(bound >= 1.0);
        }
        if z_im.abs() < 1e-15 {
            assert!((norm - 1.0).abs() < 1e-10, "real z row {r:?}");
        }
    }
}

#[test]
fn norm_scan_tree_rows() {
    for r in scan_rows("tree(2,2)", "4x6@0.9") {
        let r_abs = f64::hypot(r[3].parse().unwrap(), r[4].parse().unwrap());
        let norm: f64 = r[5].parse().unwrap();
        assert!(norm <= 4.0 / (1.0 - r_abs) + 1e-9);
        assert!(!r[7].is_empty());
    }
}

fn table(family: &str, x: &str, y: &str) -> Value {
    let out = run(&["coefficients", "--family", family, "--x", x, "--y", y]);
    assert_eq!(out.status.code(), Some(0));
    json(&out)["table"].clone()
}

fn entries(t: &Value) -> Vec<(u64, u64, String)> {
    t["entries"]
        .as_array()
        .unwrap()
        .iter()
        .map(|e| (e["a"].as_u64().unwrap(), e["b"].as_u64().unwrap(), e["polynomial"].as_str().unwrap().to_string()))
        .collect()
}

#[test]
fn segment_coefficient_table() {
    let t = table("segment(3)", "0", "3");
    assert_eq!(t["all_agree"], true);
    let e = entries(&t);
    let column = |b: u64| -> Vec<(u64, String)> { e.iter().filter(|x| x.1 == b).map(|x| (x.0, x.2.clone())).collect() };
    let s = |v: &[(u64, &str)]| v.iter().map(|(a, p)| (*a, p.to_string())).collect::<Vec<_>>();
    assert_eq!(column(3), s(&[(0, "z^3"), (1, "z^2*w"), (2, "z*w"), (3, "w")]));
    assert_eq!(column(2), s(&[(0, "z^2*w"), (1, "z*w^2"), (2, "w^2"), (3, "-z")]));
    assert_eq!(column(1), s(&[(0, "z*w"), (1, "w^2"), (2, "-z")]));
    assert_eq!(column(0), s(&[(0, "w"), (1, "-z")]));
}

#[test]
fn diagonal_table_is_identity() {
    let t = table("grid(2,2)", "4", "4");
    assert_eq!(t["distance"], 0);
    assert!(t["entries"].as_array().unwrap().is_empty());
}

#[test]
fn square_diagonal_table() {
    let t = table("hypercube(2)", "0", "3");
    assert_eq!(t["all_agree"], true);
    let e = entries(&t);
    let column_3: Vec<(u64, String)> = e.iter().filter(|x| x.1 == 3).map(|x| (x.0, x.2.clone())).collect();
    assert_eq!(column_3.len(), 4);
    assert!(column_3.contains(&(0, "z^2".into())));
    assert!(column_3.contains(&(3, "w^2".into())));
}

#[test]
fn generate_round_trips_through_validate() {
    let dir = tempfile::tempdir().unwrap();
    let p = dir.path().join("prod.json");
    let out = run(&["generate", "--family", "product(tree(2,1),segment(2))", "--out", p.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0));
    let v = run(&["validate", "--input", p.to_str().unwrap()]);
    assert_eq!(v.status.code(), Some(0));
    let r = json(&v);
    assert_eq!(record(&r, "complex.validate")["metrics"]["dim"], 2);
}

#[test]
fn jobs_flag() {
    let out = run(&["--jobs", "2", "verify", "--family", "segment(3)", "--checks", "axioms"]);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(json(&out)["config"]["jobs"], 2);
    assert_eq!(run(&["--jobs", "0", "verify", "--family", "segment(3)"]).status.code(), Some(2));
}
