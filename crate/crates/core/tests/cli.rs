use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use defect_cascade::amplitude::{amplitude_grid, auto_grid, GridPolicy};
use defect_cascade::config::load_config;
use defect_cascade::physics::CoupledSystem;
use defect_cascade::spectra::spectra;

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_defect-cascade"))
}

fn fig2() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("configs/fig2.json")
}

fn run(args: &[&std::ffi::OsStr]) -> Output {
    bin().args(args).output().unwrap()
}

fn spectra_into(dir: &Path, points: &str) -> Output {
    run(&[
        "spectra".as_ref(),
        fig2().as_os_str(),
        "--out".as_ref(),
        dir.as_os_str(),
        "--grid-points".as_ref(),
        points.as_ref(),
    ])
}

#[test]
fn unknown_subcommand_is_a_config_error() {
    let out = run(&["frobnicate".as_ref()]);
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn empty_config_is_rejected() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("empty.json");
    std::fs::write(&cfg, "{}").unwrap();
    let out = run(&["spectra".as_ref(), cfg.as_os_str(), "--out".as_ref(), dir.path().as_os_str()]);
    assert_eq!(out.status.code(), Some(1));
    assert!(!String::from_utf8_lossy(&out.stderr).is_empty());
}

#[test]
fn missing_config_file_is_rejected() {
    let out = run(&["schmidt".as_ref(), "/nonexistent/run.json".as_ref()]);
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn spectra_writes_csvs_that_read_back() {
    let dir = tempfile::tempdir().unwrap();
    let out = spectra_into(dir.path(), "151");
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    for f in ["spectrum_x.csv", "spectrum_y.csv", "cross_correlation.csv"] {
        assert!(dir.path().join(f).is_file(), "{f} missing");
    }

    let cfg = load_config(&fig2()).unwrap();
    let sys = CoupledSystem::new(&cfg.physical).unwrap();
    let grid = auto_grid(&sys, &GridPolicy { n_points: Some(151), ..cfg.grid.clone() }).unwrap();
    let s = spectra(&amplitude_grid(&sys, &grid).unwrap());

    let mut rdr = csv::Reader::from_path(dir.path().join("spectrum_x.csv")).unwrap();
    assert_eq!(rdr.headers().unwrap(), vec!["omega_eV", "N_X"]);
    let rows: Vec<(f64, f64)> = rdr.deserialize().map(|r| r.unwrap()).collect();
    assert_eq!(rows.len(), s.omega_x.len());
    for ((w, n), (w0, n0)) in rows.iter().zip(s.omega_x.iter().zip(&s.n_x)) {
        assert_eq!(w, w0);
        assert_eq!(n, n0);
    }

    let mut rdr = csv::Reader::from_path(dir.path().join("cross_correlation.csv")).unwrap();
    let rows: Vec<(f64, f64, f64)> = rdr.deserialize().map(|r| r.unwrap()).collect();
    assert_eq!(rows.len(), 151 * 151);
    let (j, k) = (40, 97);
    let r = rows[j * 151 + k];
    assert_eq!((r.0, r.1, r.2), (s.omega_x[j], s.omega_y[k], s.n_xy[(j, k)]));
}

#[test]
fn repeated_runs_are_byte_identical() {
    let a = tempfile::tempdir().unwrap();
    let b = tempfile::tempdir().unwrap();
    assert!(spectra_into(a.path(), "101").status.success());
    assert!(spectra_into(b.path(), "101").status.success());
    let mut names: Vec<_> = std::fs::read_dir(a.path()).unwrap().map(|e| e.unwrap().file_name()).collect();
    names.sort();
    assert!(!names.is_empty());
    for name in names {
        let x = std::fs::read(a.path().join(&name)).unwrap();
        let y = std::fs::read(b.path().join(&name)).unwrap();
        assert!(x == y, "{name:?} differs");
    }
}
