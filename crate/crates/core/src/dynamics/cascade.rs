//! Time-domain cascade dynamics with discrete photon modes.
//!
//! The state starts in |xy_S⟩ with no photons. One photon of each
//! polarization is emitted through either intermediate state:
//!
//! * `c_xys`: no photons emitted yet;
//! * `c_xs[k]`: in |x_S⟩ with a y-photon in mode k;
//! * `c_ys[j]`: in |y_S⟩ with an x-photon in mode j;
//! * `c_g[j, k]`: ground state with both photons.
//!
//! Amplitudes are carried in a frame rotating at the |xy_S⟩ energy, so only
//! µeV-scale detunings enter the equations. The unitary system keeps every
//! mode explicitly; the Markov system replaces the emptying of each upper
//! level by its decay rate.

use faer::Mat;
use serde::{Deserialize, Serialize};

use super::ode::{integrate, sample_times, OdeOptions, OdeStats};
use crate::amplitude::{amplitude_with_couplings, FrequencyGrid, ModeCouplings};
use crate::physics::CoupledSystem;
use crate::{Error, Result, C64};
use std::f64::consts::PI;

/// Largest tolerated drift of the total norm in the unitary system.
pub const NORM_DRIFT_LIMIT: f64 = 1e-6;

#[derive(Debug, Clone)]
pub struct CascadeState {
    /// Time in ħ/eV.
    pub time: f64,
    /// Energy of the rotating frame (eV); lab amplitudes are these × e^{−i E t}.
    pub frame_energy: f64,
    pub c_xys: C64,
    pub c_xs: Vec<C64>,
    pub c_ys: Vec<C64>,
    pub c_g: Mat<C64>,
}

impl CascadeState {
    pub fn populations(&self) -> Populations {
        let p_xs = self.c_xs.iter().map(|c| c.norm_sqr()).sum();
        let p_ys = self.c_ys.iter().map(|c| c.norm_sqr()).sum();
        let mut p_g = 0.0;
        for k in 0..self.c_g.ncols() {
            for j in 0..self.c_g.nrows() {
                p_g += self.c_g[(j, k)].norm_sqr();
            }
        }
        Populations {
            t: self.time,
            xys: self.c_xys.norm_sqr(),
            xs: p_xs,
            ys: p_ys,
            g: p_g,
        }
    }

    /// c_xyS in the lab frame.
    pub fn lab_xys(&self) -> C64 {
        self.c_xys * C64::new(0.0, -self.frame_energy * self.time).exp()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Populations {
    pub t: f64,
    pub xys: f64,
    pub xs: f64,
    pub ys: f64,
    pub g: f64,
}

impl Populations {
    pub fn norm(&self) -> f64 {
        self.xys + self.xs + self.ys + self.g
    }
}

#[derive(Debug, Clone)]
pub struct CascadeRun {
    pub state: CascadeState,
    pub trace: Vec<Populations>,
    /// c_g(t_end) with the free two-photon phase removed; comparable to the
    /// closed-form steady-state amplitude.
    pub c_g_tilde: Mat<C64>,
    pub stats: OdeStats,
}

#[derive(Debug, Clone)]
pub struct CascadeOptions {
    /// Mode couplings; `None` uses Ω = √(γΔ/π) from the system rates.
    pub couplings: Option<ModeCouplings>,
    pub ode: OdeOptions,
    /// Number of trace samples after t = 0.
    pub samples: usize,
}

impl Default for CascadeOptions {
    fn default() -> Self {
        CascadeOptions {
            couplings: None,
            ode: OdeOptions::default(),
            samples: 200,
        }
    }
}

/// Frame detunings of each sector, measured from the |xy_S⟩ energy.
struct Detunings {
    xs: Vec<f64>,
    ys: Vec<f64>,
    g_x: Vec<f64>,
    g_y: Vec<f64>,
}

impl Detunings {
    fn new(system: &CoupledSystem, grid: &FrequencyGrid) -> Self {
        let f = &system.cascade;
        let n = grid.n;
        // x_S + y-photon k: ω_X1 + ω_k − ω_xyS
        let xs0 = (f.omega_x1 + grid.y_center) - f.omega_xys;
        let ys0 = (f.omega_y1 + grid.x_center) - f.omega_xys;
        let g0 = (grid.x_center + grid.y_center) - f.omega_xys;
        Detunings {
            xs: (0..n).map(|k| xs0 + grid.offset(k)).collect(),
            ys: (0..n).map(|j| ys0 + grid.offset(j)).collect(),
            // g sector detuning split as g0 + off_j + off_k
            g_x: (0..n).map(|j| g0 + grid.offset(j)).collect(),
            g_y: (0..n).map(|k| grid.offset(k)).collect(),
        }
    }
}

fn layout(n: usize) -> (usize, usize, usize, usize) {
    // (xs start, ys start, g start, total)
    (1, 1 + n, 1 + 2 * n, 1 + 2 * n + n * n)
}

fn unpack(y: &[C64], n: usize, time: f64, frame_energy: f64) -> CascadeState {
    let (xs, ys, g, _) = layout(n);
    CascadeState {
        time,
        frame_energy,
        c_xys: y[0],
        c_xs: y[xs..xs + n].to_vec(),
        c_ys: y[ys..ys + n].to_vec(),
        // c_g stored row-major: index g + j n + k
        c_g: Mat::from_fn(n, n, |j, k| y[g + j * n + k]),
    }
}

fn populations_of(y: &[C64], n: usize, t: f64) -> Populations {
    let (xs, ys, g, total) = layout(n);
    let sum = |r: std::ops::Range<usize>| y[r].iter().map(|c| c.norm_sqr()).sum::<f64>();
    Populations {
        t,
        xys: y[0].norm_sqr(),
        xs: sum(xs..xs + n),
        ys: sum(ys..ys + n),
        g: sum(g..total),
    }
}

fn initial(n: usize) -> Vec<C64> {
    let mut y = vec![C64::new(0.0, 0.0); layout(n).3];
    y[0] = C64::new(1.0, 0.0);
    y
}

fn check_t_end(t_end: f64) -> Result<()> {
    if !(t_end > 0.0 && t_end.is_finite()) {
        return Err(Error::domain(format!("t_end must be positive (got {t_end})")));
    }
    Ok(())
}

/// Remove the free phase of each two-photon mode pair.
fn tilde(state: &CascadeState, det: &Detunings) -> Mat<C64> {
    let t = state.time;
    Mat::from_fn(state.c_g.nrows(), state.c_g.ncols(), |j, k| {
        let phase = (det.g_x[j] + det.g_y[k]) * t;
        state.c_g[(j, k)] * C64::new(0.0, phase).exp()
    })
}

fn resolve_couplings(system: &CoupledSystem, grid: &FrequencyGrid, opts: &CascadeOptions) -> ModeCouplings {
    opts.couplings
        .unwrap_or_else(|| ModeCouplings::from_rates(system, grid.delta))
}

/// Damped cascade: each upper level decays at γ = πΩ²/Δ and feeds the
/// next level directly.
pub fn integrate_cascade_markov(
    system: &CoupledSystem,
    grid: &FrequencyGrid,
    t_end: f64,
    opts: &CascadeOptions,
) -> Result<CascadeRun> {
    check_t_end(t_end)?;
    let n = grid.n;
    let om = resolve_couplings(system, grid, opts);
    let rate = |o: f64| PI * o * o / grid.delta;
    let g_up = rate(om.xs_xys) + rate(om.ys_xys);
    let g_gx = rate(om.g_xs);
    let g_gy = rate(om.g_ys);
    let det = Detunings::new(system, grid);
    let (xs, ys, g, _) = layout(n);
    let mi = C64::new(0.0, -1.0);

    let rhs = |_t: f64, y: &[C64], dy: &mut [C64]| {
        dy[0] = -g_up * y[0];
        for k in 0..n {
            dy[xs + k] = C64::new(-g_gx, -det.xs[k]) * y[xs + k] + mi * om.xs_xys * y[0];
        }
        for j in 0..n {
            dy[ys + j] = C64::new(-g_gy, -det.ys[j]) * y[ys + j] + mi * om.ys_xys * y[0];
        }
        for j in 0..n {
            let feed_y = mi * om.g_ys * y[ys + j];
            let row = g + j * n;
            for k in 0..n {
                let d = det.g_x[j] + det.g_y[k];
                dy[row + k] =
                    C64::new(0.0, -d) * y[row + k] + feed_y + mi * om.g_xs * y[xs + k];
            }
        }
    };
    run(system, grid, t_end, opts, &det, rhs, false)
}

/// Full discrete-mode Schrödinger evolution (no Markov step). Fails if the
/// total norm drifts by more than [`NORM_DRIFT_LIMIT`].
pub fn integrate_cascade_unitary(
    system: &CoupledSystem,
    grid: &FrequencyGrid,
    t_end: f64,
    opts: &CascadeOptions,
) -> Result<CascadeRun> {
    check_t_end(t_end)?;
    let n = grid.n;
    let om = resolve_couplings(system, grid, opts);
    let det = Detunings::new(system, grid);
    let (xs, ys, g, _) = layout(n);
    let mi = C64::new(0.0, -1.0);
    let mut col_sum = vec![C64::new(0.0, 0.0); n];

    let rhs = move |_t: f64, y: &[C64], dy: &mut [C64]| {
        let sum_xs: C64 = y[xs..xs + n].iter().sum();
        let sum_ys: C64 = y[ys..ys + n].iter().sum();
        dy[0] = mi * (om.xs_xys * sum_xs + om.ys_xys * sum_ys);

        col_sum.iter_mut().for_each(|c| *c = C64::new(0.0, 0.0));
        for j in 0..n {
            let row = g + j * n;
            let feed_y = mi * om.g_ys * y[ys + j];
            let mut row_sum = C64::new(0.0, 0.0);
            for k in 0..n {
                let c = y[row + k];
                row_sum += c;
                col_sum[k] += c;
                let d = det.g_x[j] + det.g_y[k];
                dy[row + k] = C64::new(0.0, -d) * c + feed_y + mi * om.g_xs * y[xs + k];
            }
            dy[ys + j] = C64::new(0.0, -det.ys[j]) * y[ys + j]
                + mi * om.ys_xys * y[0]
                + mi * om.g_ys * row_sum;
        }
        for k in 0..n {
            dy[xs + k] = C64::new(0.0, -det.xs[k]) * y[xs + k]
                + mi * om.xs_xys * y[0]
                + mi * om.g_xs * col_sum[k];
        }
    };
    let det2 = Detunings::new(system, grid);
    run(system, grid, t_end, opts, &det2, rhs, true)
}

fn run<F>(
    system: &CoupledSystem,
    grid: &FrequencyGrid,
    t_end: f64,
    opts: &CascadeOptions,
    det: &Detunings,
    rhs: F,
    check_norm: bool,
) -> Result<CascadeRun>
where
    F: FnMut(f64, &[C64], &mut [C64]),
{
    let n = grid.n;
    let times = sample_times(0.0, t_end, opts.samples.max(1));
    let mut trace = Vec::with_capacity(times.len() + 1);
    let (y, stats) = integrate(rhs, 0.0, initial(n), t_end, &times, &opts.ode, |t, y| {
        let p = populations_of(y, n, t);
        if check_norm && (p.norm() - 1.0).abs() > NORM_DRIFT_LIMIT {
            return Err(Error::Integrator {
                t,
                reason: format!("norm drifted to {:.9}", p.norm()),
            });
        }
        trace.push(p);
        Ok(())
    })?;
    let state = unpack(&y, n, t_end, system.cascade.omega_xys);
    let c_g_tilde = tilde(&state, det);
    Ok(CascadeRun {
        state,
        trace,
        c_g_tilde,
        stats,
    })
}

/// Oracle-versus-closed-form comparison.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ValidationVerdict {
    /// ‖a − e^{iφ} b‖ / ‖b‖ with the best global phase φ.
    pub l2_error: f64,
    /// ‖|a| − |b|‖ / ‖b‖, elementwise moduli.
    pub abs_error: f64,
    pub tolerance: f64,
    pub pass: bool,
}

pub fn compare(numeric: &Mat<C64>, reference: &Mat<C64>, tolerance: f64) -> Result<ValidationVerdict> {
    if numeric.nrows() != reference.nrows() || numeric.ncols() != reference.ncols() {
        return Err(Error::domain("compared amplitudes have different shapes"));
    }
    let mut overlap = C64::new(0.0, 0.0);
    let mut norm_b = 0.0;
    for k in 0..reference.ncols() {
        for j in 0..reference.nrows() {
            overlap += numeric[(j, k)].conj() * reference[(j, k)];
            norm_b += reference[(j, k)].norm_sqr();
        }
    }
    let phase = if overlap.norm() > 0.0 {
        overlap / overlap.norm()
    } else {
        C64::new(1.0, 0.0)
    };
    let mut diff = 0.0;
    let mut diff_abs = 0.0;
    for k in 0..reference.ncols() {
        for j in 0..reference.nrows() {
            diff += (numeric[(j, k)] * phase - reference[(j, k)]).norm_sqr();
            diff_abs += (numeric[(j, k)].norm() - reference[(j, k)].norm()).powi(2);
        }
    }
    let nb = norm_b.sqrt();
    if nb == 0.0 {
        return Err(Error::domain("reference amplitude is zero"));
    }
    let l2_error = diff.sqrt() / nb;
    Ok(ValidationVerdict {
        l2_error,
        abs_error: diff_abs.sqrt() / nb,
        tolerance,
        pass: l2_error < tolerance,
    })
}

/// Compare a run's final ground-state amplitudes with the closed form for
/// the same couplings.
pub fn validate_run(
    system: &CoupledSystem,
    grid: &FrequencyGrid,
    run: &CascadeRun,
    couplings: Option<ModeCouplings>,
    tolerance: f64,
) -> Result<ValidationVerdict> {
    let om = couplings.unwrap_or_else(|| ModeCouplings::from_rates(system, grid.delta));
    let closed = amplitude_with_couplings(system, grid, &om)?;
    compare(&run.c_g_tilde, &closed.c, tolerance)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::amplitude::{auto_grid, GridPolicy};
    use crate::physics::DefectPairConfig;
    use crate::units::uev;

    fn small() -> (CoupledSystem, FrequencyGrid) {
        let cfg = DefectPairConfig {
            gamma_ref: uev(2.0),
            ..DefectPairConfig::reference()
        };
        let sys = CoupledSystem::new(&cfg).unwrap();
        let grid = auto_grid(
            &sys,
            &GridPolicy {
                half_width: Some(uev(140.0)),
                ..GridPolicy::with_points(48)
            },
        )
        .unwrap();
        (sys, grid)
    }

    #[test]
    fn free_evolution_without_couplings() {
        let (sys, grid) = small();
        let opts = CascadeOptions {
            couplings: Some(ModeCouplings::from_rates(&sys, grid.delta).scaled(0.0)),
            samples: 5,
            ..Default::default()
        };
        let t = 3.0 / uev(1.0);
        let run = integrate_cascade_unitary(&sys, &grid, t, &opts).unwrap();
        assert!((run.state.c_xys.norm() - 1.0).abs() < 1e-12);
        let want = C64::new(0.0, -sys.cascade.omega_xys * t).exp();
        assert!((run.state.lab_xys() - want).norm() < 1e-9);
        assert!(run.trace.iter().all(|p| (p.xys - 1.0).abs() < 1e-12));
    }

    #[test]
    fn markov_converges_to_closed_form() {
        let (sys, grid) = small();
        let t_end = 20.0 / sys.rates.total_upper();
        let run = integrate_cascade_markov(&sys, &grid, t_end, &CascadeOptions::default()).unwrap();
        let v = validate_run(&sys, &grid, &run, None, 1e-3).unwrap();
        assert!(v.pass, "{v:?}");
        assert!(v.abs_error <= v.l2_error + 1e-15);
    }

    #[test]
    fn single_arm_feeds_one_line() {
        let (sys, grid) = small();
        let mut om = ModeCouplings::from_rates(&sys, grid.delta);
        om.xs_xys = 0.0;
        let opts = CascadeOptions {
            couplings: Some(om),
            ..Default::default()
        };
        let t_end = 20.0 / sys.rates.gamma_ys_xys;
        let run = integrate_cascade_markov(&sys, &grid, t_end, &opts).unwrap();
        assert!(run.state.c_xs.iter().all(|c| c.norm() == 0.0));
        // weight concentrates where the x-photon is at ω_X2 = ω_xyS − ω_yS
        let x_line = grid
            .x_axis
            .iter()
            .enumerate()
            .min_by(|a, b| {
                (a.1 - sys.cascade.omega_x2)
                    .abs()
                    .total_cmp(&(b.1 - sys.cascade.omega_x2).abs())
            })
            .unwrap()
            .0;
        let total: f64 = (0..grid.n)
            .flat_map(|j| (0..grid.n).map(move |k| (j, k)))
            .map(|(j, k)| run.c_g_tilde[(j, k)].norm_sqr())
            .sum();
        let near: f64 = (x_line.saturating_sub(6)..(x_line + 7).min(grid.n))
            .flat_map(|j| (0..grid.n).map(move |k| (j, k)))
            .map(|(j, k)| run.c_g_tilde[(j, k)].norm_sqr())
            .sum();
        assert!(near / total > 0.9, "{}", near / total);
    }

    #[test]
    fn compare_ignores_global_phase() {
        let a = Mat::from_fn(3, 3, |j, k| C64::new(j as f64 + 1.0, k as f64));
        let b = Mat::from_fn(3, 3, |j, k| a[(j, k)] * C64::new(0.0, 0.7).exp());
        let v = compare(&a, &b, 1e-12).unwrap();
        assert!(v.l2_error < 1e-15 && v.pass);
    }
}
