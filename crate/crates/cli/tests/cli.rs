use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use semitunnel::quantum::mathieu_characteristics;
use semitunnel::trajectories::TRAJECTORY_CSV_HEADER;
use serde_json::Value;
use tempfile::TempDir;

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_semitunnel")).args(args).output().expect("binary runs")
}

fn code(out: &Output) -> i32 {
    out.status.code().expect("exit code")
}

fn ok(args: &[&str]) -> Output {
    let out = run(args);
    assert_eq!(code(&out), 0, "{args:?}: {}", String::from_utf8_lossy(&out.stderr));
    out
}

fn potential(dir: &TempDir, name: &str, json: &str) -> PathBuf {
    let p = dir.path().join(name);
    fs::write(&p, json).unwrap();
    p
}

fn golden(name: &str) -> String {
    fs::read_to_string(Path::new(env!("CARGO_MANIFEST_DIR")).join("tests/golden").join(name)).unwrap()
}

fn header(path: &Path) -> String {
    fs::read_to_string(path).unwrap().lines().next().unwrap().to_string() + "\n"
}

fn rows(path: &Path) -> Vec<csv::StringRecord> {
    csv::Reader::from_path(path).unwrap().records().map(|r| r.unwrap()).collect()
}

fn manifest(dir: &Path) -> Value {
    serde_json::from_str(&fs::read_to_string(dir.join("manifest.json")).unwrap()).unwrap()
}

fn s(p: &Path) -> &str {
    p.to_str().unwrap()
}

#[test]
fn spectrum_of_the_quartic_double_well() {
    let tmp = TempDir::new().unwrap();
    let out = tmp.path().join("run");
    ok(&["spectrum", "--hbar-inverse", "12", "--e-max", "0.8", "--out", s(&out)]);
    assert_eq!(header(&out.join("spectrum.csv")), golden("spectrum.header"));
    assert_eq!(header(&out.join("doublets.csv")), golden("doublets.header"));
    let d = rows(&out.join("doublets.csv"));
    let gap: f64 = d[0][4].parse().unwrap();
    assert!((gap / 4.4e-10 - 1.0).abs() < 0.15, "gap {gap}");
    let m = manifest(&out);
    assert_eq!(m["schema_version"], 1);
    assert_eq!(m["outputs"][0]["schema"], "semitunnel-spectrum-v1");
    assert_eq!(m["outputs"][1]["rows"].as_u64().unwrap() as usize, d.len());
}

#[test]
fn harmonic_levels_are_evenly_spaced() {
    let tmp = TempDir::new().unwrap();
    let pot = potential(&tmp, "ho.json", r#"{"kind":"general_polynomial","parameters":{"coeffs":[0,0,0.5]}}"#);
    let out = tmp.path().join("run");
    ok(&["spectrum", "--potential", s(&pot), "--hbar-inverse", "10", "--e-max", "1", "--out", s(&out)]);
    let mut e: Vec<f64> = rows(&out.join("spectrum.csv")).iter().map(|r| r[3].parse().unwrap()).collect();
    e.sort_by(f64::total_cmp);
    assert!(e.len() >= 9);
    for (k, x) in e.iter().enumerate() {
        assert!((x - (k as f64 + 0.5) * 0.1).abs() < 1e-9, "level {k}: {x}");
    }
}

#[test]
fn pendulum_spectrum_matches_mathieu_values() {
    let tmp = TempDir::new().unwrap();
    let pot = potential(&tmp, "pe.json", r#"{"kind":"pendulum","parameters":{"gamma":1.0}}"#);
    let out = tmp.path().join("run");
    ok(&["spectrum", "--potential", s(&pot), "--hbar-inverse", "2", "--e-max", "3", "--out", s(&out)]);
    let mut e: Vec<f64> = rows(&out.join("spectrum.csv")).iter().map(|r| r[3].parse().unwrap()).collect();
    e.sort_by(f64::total_cmp);
    let hbar: f64 = 0.5;
    let m = mathieu_characteristics(4.0 / (hbar * hbar), 20).unwrap();
    let mut reference: Vec<f64> = m.a.iter().chain(&m.b).map(|x| hbar * hbar / 8.0 * x).collect();
    reference.sort_by(f64::total_cmp);
    assert!(e.len() >= 6);
    for (x, y) in e.iter().zip(&reference) {
        assert!((x - y).abs() < 1e-9, "{x} vs {y}");
    }
}

#[test]
fn trace_grid_reports_a_flat_plateau() {
    let tmp = TempDir::new().unwrap();
    let out = tmp.path().join("run");
    ok(&["trace-grid", "--T-grid", "re=0:10:5,im=-6:0:4", "--out", s(&out)]);
    assert_eq!(header(&out.join("trace_grid.csv")), golden("trace_grid.header"));
    let r = rows(&out.join("trace_grid.csv"));
    assert_eq!(r.len(), 20);
    let origin = r.iter().find(|x| x[1].parse::<f64>().unwrap() == 0.0 && x[2].parse::<f64>().unwrap() == 0.0).unwrap();
    assert_eq!(&origin[6], "domain");
    let plateau = &manifest(&out)["metrics"]["plateau"][0];
    assert!(plateau["admissible_points"].as_u64().unwrap() >= 5);
    assert!(plateau["plateau_flatness"].as_f64().unwrap() < 1e-2);
}

#[test]
fn empty_or_upper_half_plane_grids_are_config_errors() {
    let tmp = TempDir::new().unwrap();
    let out = tmp.path().join("run");
    assert_eq!(code(&run(&["trace-grid", "--T-grid", "re=0:10:0,im=-5:-5:1", "--out", s(&out)])), 2);
    assert_eq!(code(&run(&["trace-grid", "--T-grid", "re=0:10:3,im=1:2:2", "--out", s(&out)])), 2);
    assert_eq!(code(&run(&["trace-grid", "--out", s(&out)])), 2);
}

#[test]
fn double_well_scan_carries_the_lambda_column() {
    let tmp = TempDir::new().unwrap();
    let out = tmp.path().join("run");
    ok(&["scan", "--hbar-inverse", "6:12:3", "--methods", "exact,leading-order", "--out", s(&out)]);
    assert_eq!(header(&out.join("scan.csv")), golden("scan.header"));
    let r = rows(&out.join("scan.csv"));
    assert_eq!(r.len(), 6);
    let inv: Vec<f64> = r.iter().map(|x| x[0].parse().unwrap()).collect();
    assert_eq!(inv, vec![6.0, 6.0, 9.0, 9.0, 12.0, 12.0]);
    for x in r.iter().filter(|x| &x[2] == "leading-order") {
        let (ln, lambda): (f64, f64) = (x[4].parse().unwrap(), x[6].parse().unwrap());
        assert!((ln - lambda).abs() < 1e-12);
        assert!(x[5].parse::<f64>().unwrap().abs() < 0.1);
    }
}

#[test]
fn pendulum_scan_reports_separatrix_cutoffs() {
    let tmp = TempDir::new().unwrap();
    let pot = potential(&tmp, "pe.json", r#"{"kind":"pendulum","parameters":{"gamma":1.0}}"#);
    let out = tmp.path().join("run");
    ok(&["scan", "--potential", s(&pot), "--hbar-inverse", "0.5:4:8", "--levels", "1-3", "--methods", "exact,semiclassical", "--out", s(&out)]);
    let cut = manifest(&out)["metrics"]["separatrix_cutoffs"].as_array().unwrap().clone();
    assert_eq!(cut.len(), 3);
    let c: Vec<f64> = cut.iter().map(|x| x["hbar_inverse_max"].as_f64().unwrap()).collect();
    assert!(c[0] < c[1] && c[1] < c[2]);
    for x in rows(&out.join("scan.csv")).iter().filter(|x| &x[2] == "exact") {
        let (inv, n): (f64, usize) = (x[0].parse().unwrap(), x[1].parse().unwrap());
        assert_eq!(&x[8] == "beyond-cutoff", inv > c[n - 1], "1/ħ = {inv}, n = {n}");
    }
}

#[test]
fn triple_well_scan_runs_the_resonant_methods() {
    let tmp = TempDir::new().unwrap();
    let pot = potential(&tmp, "tw.json", r#"{"kind":"triple_well","parameters":{"a":1.75,"b":0.5}}"#);
    let out = tmp.path().join("run");
    ok(&[
        "scan",
        "--potential",
        s(&pot),
        "--hbar-inverse",
        "6",
        "--methods",
        "exact,resonant-limit,resonant-sum:5,resonant-sum:30",
        "--out",
        s(&out),
    ]);
    let r = rows(&out.join("scan.csv"));
    let methods: Vec<&str> = r.iter().map(|x| x.get(2).unwrap()).collect();
    assert_eq!(methods, vec!["exact", "resonant-limit", "resonant-sum:5", "resonant-sum:30"]);
    for x in &r {
        assert_eq!(&x[8], "ok");
        assert!(x[5].parse::<f64>().unwrap().abs() < 0.2);
    }
}

#[test]
fn rerun_from_the_manifest_is_bit_identical() {
    let tmp = TempDir::new().unwrap();
    let out = tmp.path().join("run");
    ok(&["scan", "--hbar-inverse", "6:10:3", "--levels", "0-1", "--methods", "exact,semiclassical", "--out", s(&out)]);
    let first = (fs::read(out.join("scan.csv")).unwrap(), fs::read(out.join("manifest.json")).unwrap());
    let saved = tmp.path().join("saved.json");
    fs::copy(out.join("manifest.json"), &saved).unwrap();
    ok(&["scan", "--config", s(&saved), "--hbar-inverse", "1", "--methods", "instanton"]);
    let second = (fs::read(out.join("scan.csv")).unwrap(), fs::read(out.join("manifest.json")).unwrap());
    assert!(first == second);
}

#[test]
fn orbits_write_the_trajectory_and_staircase() {
    let tmp = TempDir::new().unwrap();
    let out = tmp.path().join("dw");
    let o = ok(&["orbit", "--energy", "1e-3", "--windings", "1,1", "--eta", "-1", "--out", s(&out)]);
    assert_eq!(header(&out.join("trajectory.csv")), golden("trajectory.header"));
    assert_eq!(golden("trajectory.header").trim_end(), TRAJECTORY_CSV_HEADER);
    let staircase = String::from_utf8(o.stdout).unwrap();
    assert!(staircase.trim_start().starts_with('['));
    let m = manifest(&out);
    assert_eq!(m["metrics"]["staircase"].as_str().unwrap(), staircase.trim_end());
    assert!(m["metrics"]["closure_residual"].as_f64().unwrap() < 1e-8);

    let pot = potential(&tmp, "pe.json", r#"{"kind":"pendulum","parameters":{"gamma":1.0}}"#);
    let out = tmp.path().join("pe");
    ok(&["orbit", "--potential", s(&pot), "--energy", "1.5", "--windings", "1,1", "--eta", "-1", "--out", s(&out)]);
    let det = &manifest(&out)["metrics"]["determinant"];
    assert!((det[0].as_f64().unwrap() - 1.0).abs() < 1e-8);
}

#[test]
fn malformed_topology_is_reported() {
    let tmp = TempDir::new().unwrap();
    let out = run(&["orbit", "--energy", "0.2", "--windings", "1,1", "--r-before", "3", "--out", s(&tmp.path().join("x"))]);
    assert_eq!(code(&out), 2);
    assert!(String::from_utf8_lossy(&out.stderr).contains("topology"));
}

#[test]
fn exit_codes() {
    let tmp = TempDir::new().unwrap();
    let out = tmp.path().join("x");
    let o = s(&out);
    assert_eq!(code(&run(&["scan", "--methods", "bogus", "--out", o])), 2);
    assert_eq!(code(&run(&["scan", "--hbar-inverse", "12:6:3", "--out", o])), 2);
    assert_eq!(code(&run(&["scan", "--methods", "trace", "--out", o])), 2);
    let bad = potential(&tmp, "bad.json", r#"{"kind":"quintic"}"#);
    assert_eq!(code(&run(&["spectrum", "--potential", s(&bad), "--out", o])), 2);
    // a basis this large is refused by the solver
    assert_eq!(code(&run(&["spectrum", "--e-max", "1e5", "--out", o])), 3);
    let strict = ["trace-grid", "--T-grid", "re=1:10:3,im=0:0:1", "--hbar-inverse", "6", "--out", o];
    assert_eq!(code(&run(&strict)), 0);
    assert_eq!(code(&run(&[&strict[..], &["--strict"]].concat())), 4);
}
