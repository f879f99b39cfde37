//! Command-line front end.
//!
//! Exit codes: 0 success, 1 usage or configuration error, 2 numerical
//! failure, 3 oracle comparison outside tolerance.

use clap::{Args, Parser, Subcommand};
use log::info;
use serde::Serialize;
use std::ffi::OsString;
use std::path::{Path, PathBuf};

use crate::amplitude::{amplitude_grid, auto_grid, GridPolicy};
use crate::config::{load_config, EndTime, Integrator, RunConfig};
use crate::dynamics::cascade::{
    integrate_cascade_markov, integrate_cascade_unitary, validate_run, CascadeOptions,
};
use crate::dynamics::pump::{effective_coupling, integrate_pump, Drive};
use crate::dynamics::OdeOptions;
use crate::entanglement::{metrics, schmidt_coefficients};
use crate::output::{self, Manifest};
use crate::physics::CoupledSystem;
use crate::spectra::spectra;
use crate::sweep::{env_threads, find_operating_point, run_sweep, SearchSettings, SweepSpec};
use crate::units::to_uev;
use crate::{Error, Result, C64};

pub const EXIT_OK: i32 = 0;
pub const EXIT_CONFIG: i32 = 1;
pub const EXIT_NUMERIC: i32 = 2;
pub const EXIT_TOLERANCE: i32 = 3;

#[derive(Debug, Parser)]
#[command(
    name = "defect-cascade",
    version,
    about = "Two-photon cascade emission from dipole-coupled defect pairs"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Single-photon spectra and the cross-correlation map.
    Spectra(CommonArgs),
    /// Schmidt coefficients and entanglement metrics.
    Schmidt(CommonArgs),
    /// Parameter sweep, optionally with an operating-point search.
    Sweep(CommonArgs),
    /// Driven two-photon pumping trajectory.
    Pump(CommonArgs),
    /// Time-domain oracle against the closed-form amplitude.
    Validate(CommonArgs),
}

#[derive(Debug, Args)]
pub struct CommonArgs {
    /// JSON run configuration.
    pub config: PathBuf,
    /// Output directory (overrides output.directory).
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Points per grid axis (overrides grid.n_points).
    #[arg(long)]
    pub grid_points: Option<usize>,
    /// Accepted for interface compatibility; every computation is deterministic.
    #[arg(long)]
    pub seedless: bool,
}

impl Command {
    fn name(&self) -> &'static str {
        match self {
            Command::Spectra(_) => "spectra",
            Command::Schmidt(_) => "schmidt",
            Command::Sweep(_) => "sweep",
            Command::Pump(_) => "pump",
            Command::Validate(_) => "validate",
        }
    }

    fn args(&self) -> &CommonArgs {
        match self {
            Command::Spectra(a)
            | Command::Schmidt(a)
            | Command::Sweep(a)
            | Command::Pump(a)
            | Command::Validate(a) => a,
        }
    }
}

enum Outcome {
    Done,
    OutOfTolerance,
}

pub fn exit_code(e: &Error) -> i32 {
    match e {
        Error::Config(_) => EXIT_CONFIG,
        _ => EXIT_NUMERIC,
    }
}

/// Parse arguments, run, and return the process exit code.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_CONFIG } else { EXIT_OK };
            let _ = e.print();
            return code;
        }
    };
    match dispatch(&cli.command) {
        Ok(Outcome::Done) => EXIT_OK,
        Ok(Outcome::OutOfTolerance) => EXIT_TOLERANCE,
        Err(e) => {
            eprintln!("error: {e}");
            exit_code(&e)
        }
    }
}

fn dispatch(cmd: &Command) -> Result<Outcome> {
    let args = cmd.args();
    let text = std::fs::read_to_string(&args.config).map_err(|e| {
        Error::Config(vec![format!("cannot read {}: {e}", args.config.display())])
    })?;
    let mut cfg = load_config(&args.config)?;
    if let Some(n) = args.grid_points {
        if n < 3 {
            return Err(Error::Config(vec![format!("--grid-points {n}: must be >= 3")]));
        }
        cfg.grid.n_points = Some(n);
    }
    let out = args
        .out
        .clone()
        .or_else(|| cfg.output.directory.clone())
        .unwrap_or_else(|| PathBuf::from("out"));
    std::fs::create_dir_all(&out)?;
    let mut manifest = Manifest::new(cmd.name(), &args.config, &text);
    manifest.grid_points_override = args.grid_points;

    let outcome = match cmd {
        Command::Spectra(_) => run_spectra(&cfg, &out, &mut manifest)?,
        Command::Schmidt(_) => run_schmidt(&cfg, &out, &mut manifest)?,
        Command::Sweep(_) => run_sweep_cmd(&cfg, &out, &mut manifest)?,
        Command::Pump(_) => run_pump(&cfg, &out, &mut manifest)?,
        Command::Validate(_) => run_validate(&cfg, &out, &mut manifest)?,
    };
    manifest.write(&out)?;
    Ok(outcome)
}

fn run_spectra(cfg: &RunConfig, out: &Path, manifest: &mut Manifest) -> Result<Outcome> {
    let system = CoupledSystem::new(&cfg.physical)?;
    let grid = auto_grid(&system, &cfg.grid)?;
    let amps = amplitude_grid(&system, &grid)?;
    let s = spectra(&amps);
    if cfg.output.csv {
        for p in output::write_spectra(out, &s)? {
            manifest.record(&p);
        }
    }
    if cfg.output.json {
        let p = out.join("peaks.json");
        output::write_peaks(&p, &s)?;
        manifest.record(&p);
    }
    let fmt_peaks = |v: &[crate::spectra::Peak]| {
        v.iter()
            .map(|p| format!("{:.9}", p.omega))
            .collect::<Vec<_>>()
            .join(", ")
    };
    println!("grid: {} points, spacing {:.4} ueV", grid.n, to_uev(grid.delta));
    println!("N_X peaks (eV): {}", fmt_peaks(&s.peaks_x));
    println!("N_Y peaks (eV): {}", fmt_peaks(&s.peaks_y));
    Ok(Outcome::Done)
}

fn run_schmidt(cfg: &RunConfig, out: &Path, manifest: &mut Manifest) -> Result<Outcome> {
    let system = CoupledSystem::new(&cfg.physical)?;
    let grid = auto_grid(&system, &cfg.grid)?;
    let amps = amplitude_grid(&system, &grid)?;
    let spec = schmidt_coefficients(&amps)?;
    let m = metrics(&spec);
    if cfg.output.json {
        let p = out.join("metrics.json");
        output::write_metrics(&p, &m)?;
        manifest.record(&p);
    }
    if cfg.output.csv {
        let p = out.join("lambdas.csv");
        output::write_lambdas(&p, &spec.lambdas)?;
        manifest.record(&p);
    }
    println!("{}", serde_json::to_string(&m)?);
    Ok(Outcome::Done)
}

fn run_sweep_cmd(cfg: &RunConfig, out: &Path, manifest: &mut Manifest) -> Result<Outcome> {
    let opts = cfg
        .run
        .sweep
        .as_ref()
        .ok_or_else(|| Error::Config(vec!["run.sweep: required by the sweep subcommand".into()]))?;
    let spec = SweepSpec {
        grid: cfg.grid.clone(),
        auto_center: opts.auto_center,
        ..SweepSpec::new(opts.parameter, opts.values.clone(), cfg.physical.clone())
    };
    let threads = env_threads();
    info!("sweeping {} points (threads: {threads:?})", spec.values.len());
    let result = run_sweep(&spec, threads)?;
    let op = match &opts.operating_point {
        Some(o) => {
            let settings = SearchSettings {
                scan_points: o.scan_points,
                refine_iterations: o.refine_iterations,
                ..SearchSettings::new(o.d_x_range.0, o.d_x_range.1)
            };
            let op = find_operating_point(&cfg.physical, &cfg.grid, o.eta_min, o.f_min, &settings)?;
            println!("operating point: {}", op.message);
            Some(op)
        }
        None => None,
    };
    if cfg.output.csv {
        let p = out.join("sweep.csv");
        output::write_sweep_csv(&p, &result)?;
        manifest.record(&p);
    }
    if cfg.output.json {
        let p = out.join("sweep_summary.json");
        output::write_sweep_summary(&p, &result, op.as_ref())?;
        manifest.record(&p);
    }
    let failed = result.rows.iter().filter(|r| r.error.is_some()).count();
    println!("{} points, {failed} failed", result.rows.len());
    Ok(Outcome::Done)
}

#[allow(non_snake_case)]
#[derive(Serialize)]
struct PumpSummary {
    g_eff_ueV: [f64; 2],
    tau_drive_hbar_per_eV: f64,
    adiabaticity: f64,
    final_P_xyS: f64,
    max_envelope_deviation: f64,
}

fn run_pump(cfg: &RunConfig, out: &Path, manifest: &mut Manifest) -> Result<Outcome> {
    let opts = cfg
        .run
        .pump
        .as_ref()
        .ok_or_else(|| Error::Config(vec!["run.pump: required by the pump subcommand".into()]))?;
    let system = CoupledSystem::new(&cfg.physical)?;
    let drive = Drive {
        e_x: C64::new(opts.e_x, 0.0),
        e_y: C64::new(opts.e_y, 0.0),
        delta: opts.delta,
        route: opts.route,
    };
    let coupling = effective_coupling(drive.e_x, drive.e_y, drive.delta)?;
    let tau = coupling
        .tau_drive
        .ok_or_else(|| Error::domain("g_eff = 0: no two-photon transfer (a drive amplitude is zero)"))?;
    let run = integrate_pump(&system, &drive, opts.t_end_tau * tau, opts.samples, &OdeOptions::default())?;
    if cfg.output.csv {
        let p = out.join("pump_trace.csv");
        output::write_pump_trace(&p, &run)?;
        manifest.record(&p);
    }
    let summary = PumpSummary {
        g_eff_ueV: [to_uev(coupling.g_eff.re), to_uev(coupling.g_eff.im)],
        tau_drive_hbar_per_eV: tau,
        adiabaticity: drive.adiabaticity(),
        final_P_xyS: run.final_sample().xys,
        max_envelope_deviation: run.max_envelope_deviation(),
    };
    if cfg.output.json {
        let p = out.join("pump_summary.json");
        output::write_json(&p, &summary)?;
        manifest.record(&p);
    }
    println!(
        "P_xyS(t_end) = {:.6}, max |P - sin^2| = {:.3e}",
        summary.final_P_xyS, summary.max_envelope_deviation
    );
    Ok(Outcome::Done)
}

fn run_validate(cfg: &RunConfig, out: &Path, manifest: &mut Manifest) -> Result<Outcome> {
    let opts = cfg.run.validate.clone().unwrap_or_default();
    let system = CoupledSystem::new(&cfg.physical)?;
    let grid = auto_grid(&system, &policy_or_default(&cfg.grid))?;
    let t_end = match opts.t_end {
        EndTime::DecayTimes(n) => n / system.rates.total_upper(),
        EndTime::RecurrenceFraction(f) => f * 2.0 * std::f64::consts::PI / grid.delta,
    };
    let copts = CascadeOptions {
        samples: opts.samples,
        ..Default::default()
    };
    let run = match opts.integrator {
        Integrator::Markov => integrate_cascade_markov(&system, &grid, t_end, &copts)?,
        Integrator::Unitary => integrate_cascade_unitary(&system, &grid, t_end, &copts)?,
    };
    let verdict = validate_run(&system, &grid, &run, None, opts.tolerance)?;
    if cfg.output.json {
        let p = out.join("verdict.json");
        output::write_verdict(&p, &verdict)?;
        manifest.record(&p);
    }
    if cfg.output.csv {
        let p = out.join("cascade_trace.csv");
        output::write_cascade_trace(&p, &run)?;
        manifest.record(&p);
    }
    println!("{}", serde_json::to_string(&verdict)?);
    Ok(if verdict.pass {
        Outcome::Done
    } else {
        Outcome::OutOfTolerance
    })
}

/// The oracles integrate N² amplitudes, so an unset point count falls back
/// to 128 per axis rather than the linewidth-derived default.
fn policy_or_default(p: &GridPolicy) -> GridPolicy {
    match p.n_points {
        Some(_) => p.clone(),
        None => GridPolicy {
            n_points: Some(128),
            ..p.clone()
        },
    }
}
