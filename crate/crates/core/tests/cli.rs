use std::fs;
use std::path::Path;
use std::process::Command;

use moyal_vortex::exact_states::phi_n;
use moyal_vortex::harness::{read_snapshot, write_snapshot};
use moyal_vortex::spectral::{make_grid, Complex};
use serde_json::Value;
use tempfile::TempDir;

fn run(dir: &Path, command: &str, config: &str) -> i32 {
    let path = dir.join(format!("{command}.json"));
    fs::write(&path, config).unwrap();
    Command::new(env!("CARGO_BIN_EXE_moyal-vortex"))
        .args([command, "--config"])
        .arg(&path)
        .arg("--output")
        .arg(dir.join("out"))
        .output()
        .unwrap()
        .status
        .code()
        .unwrap()
}

fn error_record(dir: &Path) -> Value {
    serde_json::from_str(&fs::read_to_string(dir.join("out/error.json")).unwrap()).unwrap()
}

#[test]
fn star_check_passes_on_the_small_grid() {
    let tmp = TempDir::new().unwrap();
    assert_eq!(run(tmp.path(), "star-check", r#"{"grid": {"n": 64, "L": 8}}"#), 0);
    let csv = fs::read_to_string(tmp.path().join("out/star_check.csv")).unwrap();
    let mut lines = csv.lines();
    assert_eq!(lines.next(), Some("property,value,tolerance,status"));
    let rows: Vec<_> = lines.collect();
    assert_eq!(rows.len(), 7);
    assert!(rows.iter().all(|r| r.ends_with(",pass")));
    assert!(!csv.contains('\r'));
    let meta: Value = serde_json::from_str(&fs::read_to_string(tmp.path().join("out/metadata.json")).unwrap()).unwrap();
    assert_eq!(meta["config"]["grid"]["n"], 64);
    assert_eq!(meta["version"], env!("CARGO_PKG_VERSION"));
}

#[test]
fn invalid_values_exit_with_config_code_and_name_the_field() {
    let tmp = TempDir::new().unwrap();
    assert_eq!(run(tmp.path(), "evolve-pde", r#"{"grid": {"n": 0}}"#), 2);
    assert_eq!(error_record(tmp.path())["field"], "grid.n");

    let tmp = TempDir::new().unwrap();
    assert_eq!(run(tmp.path(), "evolve-pde", r#"{"evolution": {"dt": -0.1}}"#), 2);
    assert_eq!(error_record(tmp.path())["field"], "evolution.dt");

    let tmp = TempDir::new().unwrap();
    assert_eq!(run(tmp.path(), "fixed-points", r#"{"gird": {"n": 64}}"#), 2);
    assert_eq!(error_record(tmp.path())["kind"], "config");
}

#[test]
fn missing_config_file_is_a_config_error() {
    let tmp = TempDir::new().unwrap();
    let status = Command::new(env!("CARGO_BIN_EXE_moyal-vortex"))
        .args(["fixed-points", "--config"])
        .arg(tmp.path().join("absent.json"))
        .arg("--output")
        .arg(tmp.path().join("out"))
        .output()
        .unwrap()
        .status;
    assert_eq!(status.code(), Some(2));
    assert!(tmp.path().join("out/error.json").exists());
}

#[test]
fn fixed_points_first_row_is_the_stable_root() {
    let tmp = TempDir::new().unwrap();
    assert_eq!(run(tmp.path(), "fixed-points", r#"{"theta": 1, "fixed_points": {"n_max": 5}}"#), 0);
    let csv = fs::read_to_string(tmp.path().join("out/fixed_points_charge1_quadratic.csv")).unwrap();
    let lines: Vec<_> = csv.lines().collect();
    assert_eq!(lines[0], "n,R,stability,paper_R,cell_area");
    assert_eq!(lines.len(), 6);
    let first: Vec<_> = lines[1].split(',').collect();
    assert_eq!(first[0], "1");
    assert!((first[1].parse::<f64>().unwrap() - 2.17080).abs() < 1e-5);
    assert_eq!(first[2], "stable");
    assert!(tmp.path().join("out/fixed_points_chargem_equispaced.csv").exists());
}

#[test]
fn outputs_are_deterministic() {
    let config = r#"{"sweep": {"R_min": 2, "R_max": 6, "steps": 9}}"#;
    let a = TempDir::new().unwrap();
    let b = TempDir::new().unwrap();
    assert_eq!(run(a.path(), "pn-landscape", config), 0);
    assert_eq!(run(b.path(), "pn-landscape", config), 0);
    let read = |d: &TempDir| fs::read(d.path().join("out/pn_landscape.csv")).unwrap();
    assert_eq!(read(&a), read(&b));
}

#[test]
fn collapsing_reduced_orbit_is_a_numerical_failure() {
    // From R₀ = 2.6 the orbit clears the barrier below the first stable root.
    let tmp = TempDir::new().unwrap();
    assert_eq!(run(tmp.path(), "evolve-reduced", r#"{"ansatz": {"R": 2.6}}"#), 1);
    assert_eq!(error_record(tmp.path())["kind"], "numerical");
    assert!(tmp.path().join("out/reduced.csv").exists());
}

#[test]
fn evolve_pde_writes_series_and_snapshots() {
    let tmp = TempDir::new().unwrap();
    let config = r#"{
        "grid": {"n": 64, "L": 8},
        "ansatz": {"R": 2.4, "omega": 0.5},
        "evolution": {"dt": 0.005, "t_end": 0.02, "snapshot_every": 2}
    }"#;
    assert_eq!(run(tmp.path(), "evolve-pde", config), 0);
    let csv = fs::read_to_string(tmp.path().join("out/timeseries.csv")).unwrap();
    assert!(csv.starts_with("t,power,energy,R_fit,omega_fit,a_fit,V_fit,winding\n"));
    assert_eq!(csv.lines().count(), 4);
    let (snap, t) = read_snapshot(&tmp.path().join("out/snapshots/snapshot_000002.bin")).unwrap();
    assert_eq!(snap.grid().n(), 64);
    assert!((t - 0.02).abs() < 1e-12);
}

#[test]
fn snapshots_round_trip_bit_exactly() {
    let tmp = TempDir::new().unwrap();
    let g = make_grid(32, 6.0).unwrap();
    let u = phi_n(2, g).scale(Complex::from_polar(1.0, 0.3));
    let path = tmp.path().join("s.bin");
    write_snapshot(&path, &u, 1.0, 0.5, "test").unwrap();
    let (back, t) = read_snapshot(&path).unwrap();
    assert_eq!(t, 0.5);
    assert!(u.values().iter().zip(back.values()).all(|(a, b)| a.re.to_bits() == b.re.to_bits() && a.im.to_bits() == b.im.to_bits()));
}
