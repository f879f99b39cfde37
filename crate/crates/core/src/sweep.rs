//! Parameter sweeps over the defect pair and the constrained search for an
//! operating point with both high efficiency and high fidelity.

use log::{debug, warn};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::amplitude::{amplitude_grid, auto_grid, FrequencyGrid, GridPolicy};
use crate::entanglement::{analyze, EntanglementMetrics};
use crate::output::sha256_hex;
use crate::physics::{CoupledSystem, DefectPairConfig};
use crate::{Error, Result};

/// Environment variable capping the number of sweep worker threads.
pub const THREADS_ENV: &str = "DEFECT_CASCADE_THREADS";

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SweepParameter {
    /// d_x in e·Å.
    DX,
    /// ω_xS − ω_yS in eV, with ω_yS fixed.
    OmegaXsOffset,
    /// Separation in nm.
    Separation,
    /// γ_{g,yS} in eV.
    GammaRef,
}

impl SweepParameter {
    pub fn name(self) -> &'static str {
        match self {
            SweepParameter::DX => "d_x",
            SweepParameter::OmegaXsOffset => "omega_xS_offset",
            SweepParameter::Separation => "separation",
            SweepParameter::GammaRef => "gamma_ref",
        }
    }

    pub fn apply(self, base: &DefectPairConfig, value: f64) -> Result<DefectPairConfig> {
        let cfg = match self {
            SweepParameter::DX => DefectPairConfig {
                d_x: value,
                ..base.clone()
            },
            SweepParameter::OmegaXsOffset => base.with_xs_offset(value)?,
            SweepParameter::Separation => DefectPairConfig {
                separation: value,
                ..base.clone()
            },
            SweepParameter::GammaRef => DefectPairConfig {
                gamma_ref: value,
                ..base.clone()
            },
        };
        cfg.validate()?;
        Ok(cfg)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepSpec {
    pub parameter: SweepParameter,
    pub values: Vec<f64>,
    pub base: DefectPairConfig,
    pub grid: GridPolicy,
    /// Re-centre the grid on each point's lines; otherwise the base grid is reused.
    pub auto_center: bool,
}

impl SweepSpec {
    pub fn new(parameter: SweepParameter, values: Vec<f64>, base: DefectPairConfig) -> Self {
        SweepSpec {
            parameter,
            values,
            base,
            grid: GridPolicy::default(),
            auto_center: true,
        }
    }

    pub fn validate(&self) -> Result<()> {
        let mut issues = Vec::new();
        if self.values.is_empty() {
            issues.push("sweep needs at least one value".to_string());
        }
        if let Some(v) = self.values.iter().find(|v| !v.is_finite()) {
            issues.push(format!("sweep values must be finite (got {v})"));
        }
        issues.extend(self.base.violations());
        if issues.is_empty() {
            Ok(())
        } else {
            Err(Error::Config(issues))
        }
    }

    pub fn hash(&self) -> String {
        sha256_hex(&serde_json::to_vec(self).expect("spec serializes"))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepRow {
    pub value: f64,
    /// ω_Y2 − ω_Y1 (eV).
    pub splitting: Option<f64>,
    /// ω_X2 − ω_X1 (eV).
    pub x_splitting: Option<f64>,
    pub grid_points: Option<usize>,
    pub metrics: Option<EntanglementMetrics>,
    pub error: Option<String>,
}

impl SweepRow {
    pub fn eta(&self) -> Option<f64> {
        self.metrics.as_ref().map(|m| m.eta)
    }

    pub fn fidelity(&self) -> Option<f64> {
        self.metrics.as_ref().map(|m| m.fidelity)
    }

    pub fn entropy(&self) -> Option<f64> {
        self.metrics.as_ref().map(|m| m.entropy_bits)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepResult {
    pub parameter: SweepParameter,
    pub rows: Vec<SweepRow>,
    pub grid: GridPolicy,
    pub auto_center: bool,
    pub config_hash: String,
}

/// Worker count from [`THREADS_ENV`], if set to a positive integer.
pub fn env_threads() -> Option<usize> {
    let raw = std::env::var(THREADS_ENV).ok()?;
    match raw.trim().parse::<usize>() {
        Ok(n) if n > 0 => Some(n),
        _ => {
            warn!("ignoring {THREADS_ENV}={raw:?}; expected a positive integer");
            None
        }
    }
}

/// Splitting and entanglement metrics for one configuration.
pub fn evaluate(
    cfg: &DefectPairConfig,
    policy: &GridPolicy,
    fixed_grid: Option<&FrequencyGrid>,
) -> Result<(CoupledSystem, FrequencyGrid, EntanglementMetrics)> {
    let system = CoupledSystem::new(cfg)?;
    let grid = match fixed_grid {
        Some(g) => g.clone(),
        None => auto_grid(&system, policy)?,
    };
    let amps = amplitude_grid(&system, &grid)?;
    let metrics = analyze(&amps)?;
    Ok((system, grid, metrics))
}

fn row_for(spec: &SweepSpec, value: f64, fixed: Option<&FrequencyGrid>) -> SweepRow {
    let outcome = spec
        .parameter
        .apply(&spec.base, value)
        .and_then(|cfg| evaluate(&cfg, &spec.grid, fixed));
    match outcome {
        Ok((system, grid, metrics)) => {
            debug!("{}={value:.6e}: S={:.4}", spec.parameter.name(), metrics.entropy_bits);
            SweepRow {
                value,
                splitting: Some(system.cascade.splitting()),
                x_splitting: Some(system.cascade.x_splitting()),
                grid_points: Some(grid.n),
                metrics: Some(metrics),
                error: None,
            }
        }
        Err(e) => {
            warn!("{}={value:.6e} failed: {e}", spec.parameter.name());
            SweepRow {
                value,
                splitting: None,
                x_splitting: None,
                grid_points: None,
                metrics: None,
                error: Some(e.to_string()),
            }
        }
    }
}

/// Evaluate every value in order. Point failures are recorded in their row.
/// `threads` = `Some(1)` runs serially; `None` uses rayon's default pool.
pub fn run_sweep(spec: &SweepSpec, threads: Option<usize>) -> Result<SweepResult> {
    spec.validate()?;
    let fixed = if spec.auto_center {
        None
    } else {
        let system = CoupledSystem::new(&spec.base)?;
        Some(auto_grid(&system, &spec.grid)?)
    };
    let fixed = fixed.as_ref();
    let rows: Vec<SweepRow> = match threads {
        Some(1) => spec.values.iter().map(|&v| row_for(spec, v, fixed)).collect(),
        Some(n) => {
            let pool = rayon::ThreadPoolBuilder::new()
                .num_threads(n)
                .build()
                .map_err(|e| Error::domain(format!("thread pool: {e}")))?;
            pool.install(|| {
                spec.values
                    .par_iter()
                    .map(|&v| row_for(spec, v, fixed))
                    .collect()
            })
        }
        None => spec
            .values
            .par_iter()
            .map(|&v| row_for(spec, v, fixed))
            .collect(),
    };
    Ok(SweepResult {
        parameter: spec.parameter,
        rows,
        grid: spec.grid.clone(),
        auto_center: spec.auto_center,
        config_hash: spec.hash(),
    })
}

/// `n` evenly spaced values from `lo` to `hi` inclusive.
pub fn linspace(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    match n {
        0 => Vec::new(),
        1 => vec![lo],
        _ => (0..n)
            .map(|i| lo + (hi - lo) * i as f64 / (n - 1) as f64)
            .collect(),
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SearchSettings {
    /// d_x range searched (e·Å).
    pub d_x_range: (f64, f64),
    pub scan_points: usize,
    pub refine_iterations: usize,
    /// Weight of the η shortfall in the scalarized objective.
    pub penalty: f64,
}

impl SearchSettings {
    pub fn new(lo: f64, hi: f64) -> Self {
        SearchSettings {
            d_x_range: (lo, hi),
            scan_points: 21,
            refine_iterations: 30,
            penalty: 10.0,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OperatingPoint {
    pub eta_min: f64,
    pub f_min: f64,
    /// Highest-F evaluated point with η ≥ eta_min and F ≥ f_min.
    pub best: Option<SweepRow>,
    /// Every evaluated point, sorted by d_x.
    pub evaluated: Vec<SweepRow>,
    pub message: String,
}

/// Maximize F subject to η ≥ `eta_min` over d_x: coarse scan, then golden
/// section on F − penalty·max(0, eta_min − η) around the best scan point.
pub fn find_operating_point(
    base: &DefectPairConfig,
    policy: &GridPolicy,
    eta_min: f64,
    f_min: f64,
    settings: &SearchSettings,
) -> Result<OperatingPoint> {
    let (lo, hi) = settings.d_x_range;
    if !(lo.is_finite() && hi.is_finite() && lo < hi && lo >= 0.0) {
        return Err(Error::Config(vec![format!(
            "d_x search range must satisfy 0 <= lo < hi (got {lo}, {hi})"
        )]));
    }
    let spec = SweepSpec {
        grid: policy.clone(),
        ..SweepSpec::new(SweepParameter::DX, linspace(lo, hi, settings.scan_points.max(3)), base.clone())
    };
    let scan = run_sweep(&spec, Some(1))?;
    let objective = |row: &SweepRow| match &row.metrics {
        Some(m) => m.fidelity - settings.penalty * (eta_min - m.eta).max(0.0),
        None => f64::NEG_INFINITY,
    };
    let mut evaluated = scan.rows.clone();
    let best_i = (0..evaluated.len())
        .max_by(|&a, &b| objective(&evaluated[a]).total_cmp(&objective(&evaluated[b])))
        .expect("scan is non-empty");
    let xs = &spec.values;
    let (mut a, mut b) = (
        xs[best_i.saturating_sub(1)],
        xs[(best_i + 1).min(xs.len() - 1)],
    );
    let inv_phi = (5f64.sqrt() - 1.0) / 2.0;
    let eval = |x: f64, evaluated: &mut Vec<SweepRow>| {
        let row = row_for(&spec, x, None);
        let v = objective(&row);
        evaluated.push(row);
        v
    };
    let mut c = b - inv_phi * (b - a);
    let mut d = a + inv_phi * (b - a);
    let mut fc = eval(c, &mut evaluated);
    let mut fd = eval(d, &mut evaluated);
    for _ in 0..settings.refine_iterations {
        if fc >= fd {
            b = d;
            d = c;
            fd = fc;
            c = b - inv_phi * (b - a);
            fc = eval(c, &mut evaluated);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + inv_phi * (b - a);
            fd = eval(d, &mut evaluated);
        }
    }
    evaluated.sort_by(|p, q| p.value.total_cmp(&q.value));
    let best = evaluated
        .iter()
        .filter(|r| matches!((r.eta(), r.fidelity()), (Some(e), Some(f)) if e >= eta_min && f >= f_min))
        .max_by(|p, q| p.fidelity().unwrap().total_cmp(&q.fidelity().unwrap()))
        .cloned();
    let message = match &best {
        Some(r) => format!(
            "d_x = {:.6} e·Å: eta = {:.4}, F = {:.4}",
            r.value,
            r.eta().unwrap(),
            r.fidelity().unwrap()
        ),
        None => format!("no feasible point with eta >= {eta_min} and F >= {f_min}"),
    };
    Ok(OperatingPoint {
        eta_min,
        f_min,
        best,
        evaluated,
        message,
    })
}
