//! Result files. Floats are written with 17 significant digits so CSVs
//! round-trip exactly and repeated runs are byte-identical.

use serde::Serialize;
use sha2::{Digest, Sha256};
use std::fs;
use std::path::{Path, PathBuf};

use crate::dynamics::cascade::{CascadeRun, ValidationVerdict};
use crate::dynamics::pump::PumpRun;
use crate::entanglement::{EntanglementMetrics, LAMBDA_HEAD};
use crate::spectra::SpectraResult;
use crate::sweep::{OperatingPoint, SweepParameter, SweepResult};
use crate::units::to_uev;
use crate::Result;

pub fn sha256_hex(bytes: &[u8]) -> String {
    Sha256::digest(bytes)
        .iter()
        .map(|b| format!("{b:02x}"))
        .collect()
}

/// 17 significant digits.
pub fn fmt(x: f64) -> String {
    format!("{x:.16e}")
}

fn fmt_opt(x: Option<f64>) -> String {
    x.map(fmt).unwrap_or_default()
}

fn write_rows(path: &Path, header: &[&str], rows: impl Iterator<Item = Vec<String>>) -> Result<()> {
    let mut w = csv::Writer::from_path(path)?;
    w.write_record(header)?;
    for r in rows {
        w.write_record(&r)?;
    }
    w.flush()?;
    Ok(())
}

pub fn write_json<T: Serialize>(path: &Path, value: &T) -> Result<()> {
    let mut text = serde_json::to_string_pretty(value)?;
    text.push('\n');
    fs::write(path, text)?;
    Ok(())
}

/// spectrum_x.csv, spectrum_y.csv and the long-form cross_correlation.csv.
pub fn write_spectra(dir: &Path, s: &SpectraResult) -> Result<Vec<PathBuf>> {
    let px = dir.join("spectrum_x.csv");
    let py = dir.join("spectrum_y.csv");
    let pxy = dir.join("cross_correlation.csv");
    write_rows(
        &px,
        &["omega_eV", "N_X"],
        s.omega_x.iter().zip(&s.n_x).map(|(w, n)| vec![fmt(*w), fmt(*n)]),
    )?;
    write_rows(
        &py,
        &["omega_eV", "N_Y"],
        s.omega_y.iter().zip(&s.n_y).map(|(w, n)| vec![fmt(*w), fmt(*n)]),
    )?;
    let n = s.omega_y.len();
    write_rows(
        &pxy,
        &["omega_x_eV", "omega_y_eV", "N_XY"],
        (0..s.omega_x.len() * n).map(|i| {
            let (j, k) = (i / n, i % n);
            vec![fmt(s.omega_x[j]), fmt(s.omega_y[k]), fmt(s.n_xy[(j, k)])]
        }),
    )?;
    Ok(vec![px, py, pxy])
}

#[allow(non_snake_case)]
#[derive(Serialize)]
struct PeakSummary {
    peaks_x_eV: Vec<f64>,
    peaks_y_eV: Vec<f64>,
    cross_maxima_eV: Vec<[f64; 2]>,
}

pub fn write_peaks(path: &Path, s: &SpectraResult) -> Result<()> {
    let summary = PeakSummary {
        peaks_x_eV: s.peaks_x.iter().map(|p| p.omega).collect(),
        peaks_y_eV: s.peaks_y.iter().map(|p| p.omega).collect(),
        cross_maxima_eV: s
            .cross_maxima()
            .iter()
            .take(4)
            .map(|p| [p.omega_x, p.omega_y])
            .collect(),
    };
    write_json(path, &summary)
}

pub fn write_lambdas(path: &Path, lambdas: &[f64]) -> Result<()> {
    write_rows(
        path,
        &["n", "lambda"],
        lambdas.iter().enumerate().map(|(i, l)| vec![i.to_string(), fmt(*l)]),
    )
}

pub fn write_metrics(path: &Path, m: &EntanglementMetrics) -> Result<()> {
    write_json(path, m)
}

fn parameter_column(p: SweepParameter) -> (&'static str, fn(f64) -> f64) {
    match p {
        SweepParameter::DX => ("d_x_eA", |v| v),
        SweepParameter::OmegaXsOffset => ("omega_xS_offset_ueV", to_uev),
        SweepParameter::Separation => ("separation_nm", |v| v),
        SweepParameter::GammaRef => ("gamma_ref_ueV", to_uev),
    }
}

pub fn write_sweep_csv(path: &Path, r: &SweepResult) -> Result<()> {
    let (pname, conv) = parameter_column(r.parameter);
    let mut header = vec![
        pname.to_string(),
        "splitting_ueV".into(),
        "x_splitting_ueV".into(),
        "S_bits".into(),
        "eta".into(),
        "fidelity".into(),
    ];
    header.extend((0..LAMBDA_HEAD).map(|i| format!("lambda_{i}")));
    header.push("grid_points".into());
    header.push("error".into());
    let header: Vec<&str> = header.iter().map(String::as_str).collect();
    write_rows(
        path,
        &header,
        r.rows.iter().map(|row| {
            let m = row.metrics.as_ref();
            let mut rec = vec![
                fmt(conv(row.value)),
                fmt_opt(row.splitting.map(to_uev)),
                fmt_opt(row.x_splitting.map(to_uev)),
                fmt_opt(m.map(|m| m.entropy_bits)),
                fmt_opt(m.map(|m| m.eta)),
                fmt_opt(m.map(|m| m.fidelity)),
            ];
            rec.extend((0..LAMBDA_HEAD).map(|i| fmt_opt(m.and_then(|m| m.lambdas.get(i).copied()))));
            rec.push(row.grid_points.map(|n| n.to_string()).unwrap_or_default());
            rec.push(row.error.clone().unwrap_or_default());
            rec
        }),
    )
}

#[allow(non_snake_case)]
#[derive(Serialize)]
struct Extremum {
    value: f64,
    splitting_ueV: f64,
    metric: f64,
}

#[allow(non_snake_case)]
#[derive(Serialize)]
struct SweepSummary<'a> {
    parameter: &'a str,
    config_hash: &'a str,
    points: usize,
    failed: usize,
    min_S: Option<Extremum>,
    min_fidelity: Option<Extremum>,
    max_eta: Option<Extremum>,
    grid: &'a crate::amplitude::GridPolicy,
    auto_center: bool,
    operating_point: Option<&'a OperatingPoint>,
}

pub fn write_sweep_summary(path: &Path, r: &SweepResult, op: Option<&OperatingPoint>) -> Result<()> {
    let (pname, conv) = parameter_column(r.parameter);
    let pick = |f: &dyn Fn(&EntanglementMetrics) -> f64, larger: bool| {
        r.rows
            .iter()
            .filter_map(|row| Some((row, row.metrics.as_ref()?)))
            .max_by(|a, b| {
                let (x, y) = (f(a.1), f(b.1));
                if larger {
                    x.total_cmp(&y)
                } else {
                    y.total_cmp(&x)
                }
            })
            .map(|(row, m)| Extremum {
                value: conv(row.value),
                splitting_ueV: to_uev(row.splitting.unwrap_or(f64::NAN)),
                metric: f(m),
            })
    };
    let summary = SweepSummary {
        parameter: pname,
        config_hash: &r.config_hash,
        points: r.rows.len(),
        failed: r.rows.iter().filter(|x| x.error.is_some()).count(),
        min_S: pick(&|m| m.entropy_bits, false),
        min_fidelity: pick(&|m| m.fidelity, false),
        max_eta: pick(&|m| m.eta, true),
        grid: &r.grid,
        auto_center: r.auto_center,
        operating_point: op,
    };
    write_json(path, &summary)
}

pub fn write_pump_trace(path: &Path, run: &PumpRun) -> Result<()> {
    write_rows(
        path,
        &["t_hbar_per_eV", "P_g", "P_xS", "P_yS", "P_xyS", "sin2_envelope", "norm"],
        run.trace.iter().map(|s| {
            vec![
                fmt(s.t),
                fmt(s.g),
                fmt(s.xs),
                fmt(s.ys),
                fmt(s.xys),
                fmt(s.envelope),
                fmt(s.norm()),
            ]
        }),
    )
}

pub fn write_cascade_trace(path: &Path, run: &CascadeRun) -> Result<()> {
    write_rows(
        path,
        &["t_hbar_per_eV", "P_xyS", "P_xS", "P_yS", "P_g", "norm"],
        run.trace.iter().map(|p| {
            vec![fmt(p.t), fmt(p.xys), fmt(p.xs), fmt(p.ys), fmt(p.g), fmt(p.norm())]
        }),
    )
}

pub fn write_verdict(path: &Path, v: &ValidationVerdict) -> Result<()> {
    write_json(path, v)
}

#[derive(Debug, Serialize)]
pub struct Manifest {
    pub tool: &'static str,
    pub version: &'static str,
    pub subcommand: String,
    pub config_file: String,
    pub config_sha256: String,
    pub grid_points_override: Option<usize>,
    pub files: Vec<String>,
}

impl Manifest {
    pub fn new(subcommand: &str, config_file: &Path, config_text: &str) -> Self {
        Manifest {
            tool: env!("CARGO_PKG_NAME"),
            version: env!("CARGO_PKG_VERSION"),
            subcommand: subcommand.to_string(),
            config_file: config_file.display().to_string(),
            config_sha256: sha256_hex(config_text.as_bytes()),
            grid_points_override: None,
            files: Vec::new(),
        }
    }

    pub fn record(&mut self, path: &Path) {
        let name = path
            .file_name()
            .map(|n| n.to_string_lossy().into_owned())
            .unwrap_or_else(|| path.display().to_string());
        self.files.push(name);
    }

    pub fn write(&self, dir: &Path) -> Result<()> {
        write_json(&dir.join("manifest.json"), self)
    }
}
