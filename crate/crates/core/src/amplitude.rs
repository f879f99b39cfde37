//! Steady-state two-photon amplitude on a discrete frequency grid.
//!
//! Row `j` of the amplitude matrix is the x-polarized photon mode ω_j,
//! column `k` the y-polarized mode ω_k. The coupling to a discrete mode is
//! Ω = √(γΔ/π), so the overall scale of the amplitude depends on Δ but the
//! normalized result does not.

use faer::Mat;
use log::warn;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

use crate::physics::CoupledSystem;
use crate::{Error, Result, C64};

/// Uniform grid of x- and y-polarized photon energies (eV).
///
/// Both axes share `delta` and the point count; each is centred separately.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FrequencyGrid {
    pub x_center: f64,
    pub y_center: f64,
    pub delta: f64,
    pub n: usize,
    pub x_axis: Vec<f64>,
    pub y_axis: Vec<f64>,
}

impl FrequencyGrid {
    pub fn new(x_center: f64, y_center: f64, delta: f64, n: usize) -> Result<Self> {
        if n < 3 {
            return Err(Error::domain(format!("grid needs at least 3 points (got {n})")));
        }
        if !(delta > 0.0 && delta.is_finite()) {
            return Err(Error::domain(format!("grid spacing must be positive (got {delta})")));
        }
        let mut g = FrequencyGrid {
            x_center,
            y_center,
            delta,
            n,
            x_axis: Vec::new(),
            y_axis: Vec::new(),
        };
        g.x_axis = (0..n).map(|i| x_center + g.offset(i)).collect();
        g.y_axis = (0..n).map(|i| y_center + g.offset(i)).collect();
        Ok(g)
    }

    /// Position of point `i` relative to the axis centre.
    #[inline]
    pub fn offset(&self, i: usize) -> f64 {
        (i as f64 - (self.n - 1) as f64 / 2.0) * self.delta
    }

    pub fn half_width(&self) -> f64 {
        self.offset(self.n - 1)
    }

    /// Smallest distance from any of the points to the ends of an axis.
    fn inner_margin(&self, center: f64, points: &[f64]) -> f64 {
        let hw = self.half_width();
        points
            .iter()
            .map(|&w| hw - (w - center).abs())
            .fold(f64::INFINITY, f64::min)
    }

    /// Coverage margins (eV) of the x and y cascade lines.
    pub fn margins(&self, system: &CoupledSystem) -> (f64, f64) {
        let f = &system.cascade;
        (
            self.inner_margin(self.x_center, &f.x_lines()),
            self.inner_margin(self.y_center, &f.y_lines()),
        )
    }
}

/// How [`auto_grid`] chooses the window and resolution.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GridPolicy {
    /// Fixed point count per axis; `None` derives it from the linewidth.
    pub n_points: Option<usize>,
    /// Fixed half-width (eV); `None` derives it from splitting and linewidths.
    pub half_width: Option<f64>,
    /// Grid points per narrowest linewidth when `n_points` is `None`.
    pub points_per_linewidth: f64,
    /// Cap on the derived point count.
    pub max_points: usize,
    /// Window margin beyond the outer lines, in units of the largest rate.
    pub margin_linewidths: f64,
}

impl Default for GridPolicy {
    fn default() -> Self {
        GridPolicy {
            n_points: None,
            half_width: None,
            points_per_linewidth: 2.0,
            max_points: 2001,
            margin_linewidths: 40.0,
        }
    }
}

impl GridPolicy {
    pub fn with_points(n: usize) -> Self {
        GridPolicy {
            n_points: Some(n),
            ..Self::default()
        }
    }
}

/// Minimum margin, in units of the largest rate, that [`amplitude_grid`] accepts.
pub const MIN_MARGIN_LINEWIDTHS: f64 = 20.0;

/// Grid centred on the cascade lines of `system`.
///
/// Default window: half the line splitting plus max(half splitting, 40 γ_max);
/// default spacing: narrowest linewidth / `points_per_linewidth`.
pub fn auto_grid(system: &CoupledSystem, policy: &GridPolicy) -> Result<FrequencyGrid> {
    let f = &system.cascade;
    let split = f.splitting().abs();
    let gmax = system.rates.max();
    let hw = match policy.half_width {
        Some(h) => h,
        None => split / 2.0 + (split / 2.0).max(policy.margin_linewidths * gmax),
    };
    if !(hw > 0.0 && hw.is_finite()) {
        return Err(Error::domain(format!("grid half-width must be positive (got {hw})")));
    }
    let (n, delta) = match policy.n_points {
        Some(n) => {
            if n < 3 {
                return Err(Error::domain(format!("grid needs at least 3 points (got {n})")));
            }
            (n, 2.0 * hw / (n - 1) as f64)
        }
        None => {
            let target = system.rates.narrowest() / policy.points_per_linewidth;
            let mut n = (2.0 * hw / target).ceil() as usize + 1;
            if n % 2 == 0 {
                n += 1;
            }
            if n > policy.max_points {
                warn!(
                    "grid capped at {} points; spacing {:.3e} eV exceeds the target {:.3e} eV",
                    policy.max_points,
                    2.0 * hw / (policy.max_points - 1) as f64,
                    target
                );
                n = policy.max_points;
            }
            (n, 2.0 * hw / (n - 1) as f64)
        }
    };
    let xc = 0.5 * (f.omega_x1 + f.omega_x2);
    let yc = 0.5 * (f.omega_y1 + f.omega_y2);
    FrequencyGrid::new(xc, yc, delta, n)
}

/// Mode couplings Ω (eV) of the four cascade transitions.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ModeCouplings {
    pub g_xs: f64,
    pub xs_xys: f64,
    pub g_ys: f64,
    pub ys_xys: f64,
}

impl ModeCouplings {
    /// Ω = √(γΔ/π) for each transition.
    pub fn from_rates(system: &CoupledSystem, delta: f64) -> Self {
        let r = &system.rates;
        let om = |g: f64| (g * delta / PI).sqrt();
        ModeCouplings {
            g_xs: om(r.gamma_g_xs),
            xs_xys: om(r.gamma_xs_xys),
            g_ys: om(r.gamma_g_ys),
            ys_xys: om(r.gamma_ys_xys),
        }
    }

    pub fn scaled(self, s: f64) -> Self {
        ModeCouplings {
            g_xs: s * self.g_xs,
            xs_xys: s * self.xs_xys,
            g_ys: s * self.g_ys,
            ys_xys: s * self.ys_xys,
        }
    }
}

/// Complex two-photon amplitude c_jk on a grid.
#[derive(Debug, Clone)]
pub struct AmplitudeGrid {
    pub grid: FrequencyGrid,
    pub c: Mat<C64>,
    pub normalized: bool,
}

impl AmplitudeGrid {
    pub fn norm_sqr(&self) -> f64 {
        let mut s = 0.0;
        for j in 0..self.c.nrows() {
            for k in 0..self.c.ncols() {
                s += self.c[(j, k)].norm_sqr();
            }
        }
        s
    }

    /// Scale to unit ℓ² norm (fixed summation order).
    pub fn normalize(&mut self) -> Result<()> {
        let n = self.norm_sqr().sqrt();
        if !(n > 0.0 && n.is_finite()) {
            return Err(Error::Linalg(format!("cannot normalize amplitude with norm {n}")));
        }
        let inv = 1.0 / n;
        for k in 0..self.c.ncols() {
            for j in 0..self.c.nrows() {
                self.c[(j, k)] *= inv;
            }
        }
        self.normalized = true;
        Ok(())
    }
}

fn check_rates(system: &CoupledSystem) -> Result<()> {
    let r = &system.rates;
    for (name, g) in [
        ("gamma_g_xS", r.gamma_g_xs),
        ("gamma_g_yS", r.gamma_g_ys),
        ("gamma_xS_xyS", r.gamma_xs_xys),
        ("gamma_yS_xyS", r.gamma_ys_xys),
    ] {
        if !(g > 0.0) {
            return Err(Error::domain(format!("{name} must be positive (got {g})")));
        }
    }
    Ok(())
}

fn check_coverage(system: &CoupledSystem, grid: &FrequencyGrid) -> Result<()> {
    let need = MIN_MARGIN_LINEWIDTHS * system.rates.max();
    let (mx, my) = grid.margins(system);
    if mx < need || my < need {
        warn!("grid margins {mx:.3e}/{my:.3e} eV are below {need:.3e} eV");
        return Err(Error::GridCoverage(format!(
            "margins x {mx:.3e} eV, y {my:.3e} eV; need {need:.3e} eV ({MIN_MARGIN_LINEWIDTHS} x gamma_max)"
        )));
    }
    Ok(())
}

/// Normalized steady-state amplitude with Ω = √(γΔ/π).
pub fn amplitude_grid(system: &CoupledSystem, grid: &FrequencyGrid) -> Result<AmplitudeGrid> {
    let couplings = ModeCouplings::from_rates(system, grid.delta);
    let mut a = amplitude_with_couplings(system, grid, &couplings)?;
    a.normalize()?;
    Ok(a)
}

/// Unnormalized steady-state amplitude for explicit mode couplings.
pub fn amplitude_with_couplings(
    system: &CoupledSystem,
    grid: &FrequencyGrid,
    om: &ModeCouplings,
) -> Result<AmplitudeGrid> {
    check_rates(system)?;
    check_coverage(system, grid)?;
    let f = &system.cascade;
    let r = &system.rates;
    // Detunings measured from the axis centres to keep µeV-scale precision.
    let dxs = f.omega_x1 - grid.x_center;
    let dys = f.omega_y1 - grid.y_center;
    let dxys = f.omega_xys - grid.x_center - grid.y_center;
    let g_up = r.total_upper();
    let path_x = om.g_xs * om.xs_xys;
    let path_y = om.g_ys * om.ys_xys;
    let n = grid.n;

    let y_terms: Vec<C64> = (0..n)
        .map(|k| -path_y / C64::new(r.gamma_g_ys, dys - grid.offset(k)))
        .collect();
    let rows: Vec<Vec<C64>> = (0..n)
        .into_par_iter()
        .map(|j| {
            let oj = grid.offset(j);
            let x_term = -path_x / C64::new(r.gamma_g_xs, dxs - oj);
            (0..n)
                .map(|k| (x_term + y_terms[k]) / C64::new(g_up, dxys - oj - grid.offset(k)))
                .collect()
        })
        .collect();
    let c = Mat::from_fn(n, n, |j, k| rows[j][k]);
    Ok(AmplitudeGrid {
        grid: grid.clone(),
        c,
        normalized: false,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::physics::DefectPairConfig;
    use crate::units::uev;

    fn fig2() -> CoupledSystem {
        CoupledSystem::new(&DefectPairConfig::reference()).unwrap()
    }

    #[test]
    fn auto_grid_resolves_linewidth() {
        let sys = fig2();
        let g = auto_grid(&sys, &GridPolicy::default()).unwrap();
        assert!(g.delta <= 0.5 * sys.rates.narrowest() * (1.0 + 1e-12));
        assert_eq!(g.n % 2, 1);
        let (mx, my) = g.margins(&sys);
        assert!(mx >= 20.0 * sys.rates.max());
        assert!(my >= 20.0 * sys.rates.max());
        for w in g.x_axis.windows(2) {
            assert!(((w[1] - w[0]) / g.delta - 1.0).abs() < 1e-7);
        }
    }

    #[test]
    fn fixed_point_count_spans_same_window() {
        let sys = fig2();
        let a = auto_grid(&sys, &GridPolicy::default()).unwrap();
        let b = auto_grid(&sys, &GridPolicy::with_points(401)).unwrap();
        assert_eq!(b.n, 401);
        assert!((a.half_width() - b.half_width()).abs() < 1e-18);
    }

    #[test]
    fn narrow_window_is_refused() {
        let sys = fig2();
        let g = auto_grid(
            &sys,
            &GridPolicy {
                half_width: Some(uev(5.0)),
                ..GridPolicy::with_points(51)
            },
        )
        .unwrap();
        assert!(matches!(amplitude_grid(&sys, &g), Err(Error::GridCoverage(_))));
    }

    #[test]
    fn normalized_and_scale_free() {
        let sys = fig2();
        let g = auto_grid(&sys, &GridPolicy::with_points(201)).unwrap();
        let a = amplitude_grid(&sys, &g).unwrap();
        assert!((a.norm_sqr() - 1.0).abs() < 1e-12);

        let om = ModeCouplings::from_rates(&sys, g.delta).scaled(3.7);
        let mut b = amplitude_with_couplings(&sys, &g, &om).unwrap();
        b.normalize().unwrap();
        for j in 0..g.n {
            for k in 0..g.n {
                assert!((a.c[(j, k)] - b.c[(j, k)]).norm() < 1e-12);
            }
        }
    }

    #[test]
    fn matches_pointwise_formula() {
        // Direct evaluation on absolute energies.
        let sys = fig2();
        let g = auto_grid(&sys, &GridPolicy::with_points(101)).unwrap();
        let om = ModeCouplings::from_rates(&sys, g.delta);
        let a = amplitude_with_couplings(&sys, &g, &om).unwrap();
        let f = sys.cascade;
        let r = sys.rates;
        let i = C64::i();
        for &(j, k) in &[(0, 0), (50, 50), (17, 83), (100, 3)] {
            let (wj, wk) = (g.x_axis[j], g.y_axis[k]);
            let num = -om.g_xs * om.xs_xys / (i * (f.omega_x1 - wj) + r.gamma_g_xs)
                - om.g_ys * om.ys_xys / (i * (f.omega_y1 - wk) + r.gamma_g_ys);
            let den = i * (f.omega_xys - wj - wk) + r.total_upper();
            let want = num / den;
            assert!((a.c[(j, k)] - want).norm() < 1e-7 * want.norm());
        }
    }
}
