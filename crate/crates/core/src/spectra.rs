//! Single-photon spectra and the two-photon cross-correlation map.

use faer::Mat;
use serde::{Deserialize, Serialize};

use crate::amplitude::AmplitudeGrid;

/// Local maxima below this fraction of the global maximum are ignored.
pub const PEAK_THRESHOLD: f64 = 1e-3;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Peak {
    /// Refined position (eV).
    pub omega: f64,
    pub height: f64,
    /// Index of the discrete maximum.
    pub index: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CrossPeak {
    pub omega_x: f64,
    pub omega_y: f64,
    pub height: f64,
    pub j: usize,
    pub k: usize,
}

#[derive(Debug, Clone)]
pub struct SpectraResult {
    pub omega_x: Vec<f64>,
    pub omega_y: Vec<f64>,
    /// N_X(ω_j) = Σ_k |c_jk|².
    pub n_x: Vec<f64>,
    /// N_Y(ω_k) = Σ_j |c_jk|².
    pub n_y: Vec<f64>,
    /// N_XY(ω_j, ω_k) = |c_jk|².
    pub n_xy: Mat<f64>,
    pub peaks_x: Vec<Peak>,
    pub peaks_y: Vec<Peak>,
}

impl SpectraResult {
    /// Local maxima of N_XY, highest first.
    pub fn cross_maxima(&self) -> Vec<CrossPeak> {
        cross_maxima(&self.n_xy, &self.omega_x, &self.omega_y, PEAK_THRESHOLD)
    }
}

pub fn spectra(amps: &AmplitudeGrid) -> SpectraResult {
    let (nr, nc) = (amps.c.nrows(), amps.c.ncols());
    let n_xy = Mat::from_fn(nr, nc, |j, k| amps.c[(j, k)].norm_sqr());
    let n_x: Vec<f64> = (0..nr)
        .map(|j| (0..nc).map(|k| n_xy[(j, k)]).sum())
        .collect();
    let n_y: Vec<f64> = (0..nc)
        .map(|k| (0..nr).map(|j| n_xy[(j, k)]).sum())
        .collect();
    let g = &amps.grid;
    SpectraResult {
        peaks_x: find_peaks(&g.x_axis, &n_x, PEAK_THRESHOLD),
        peaks_y: find_peaks(&g.y_axis, &n_y, PEAK_THRESHOLD),
        omega_x: g.x_axis.clone(),
        omega_y: g.y_axis.clone(),
        n_x,
        n_y,
        n_xy,
    }
}

/// Interior local maxima above `rel_threshold` × max, refined by a parabola
/// through the three neighbouring samples. Sorted by frequency.
pub fn find_peaks(axis: &[f64], values: &[f64], rel_threshold: f64) -> Vec<Peak> {
    let vmax = values.iter().cloned().fold(0.0, f64::max);
    let mut out = Vec::new();
    if values.len() < 3 {
        return out;
    }
    for i in 1..values.len() - 1 {
        let (a, b, c) = (values[i - 1], values[i], values[i + 1]);
        if b > a && b >= c && b >= rel_threshold * vmax {
            let curv = a - 2.0 * b + c;
            let p = if curv < 0.0 { 0.5 * (a - c) / curv } else { 0.0 };
            let step = axis[i + 1] - axis[i];
            out.push(Peak {
                omega: axis[i] + p * step,
                height: b - 0.25 * (a - c) * p,
                index: i,
            });
        }
    }
    out
}

/// Strict 8-neighbour local maxima of a 2D map, highest first.
pub fn cross_maxima(map: &Mat<f64>, ax: &[f64], ay: &[f64], rel_threshold: f64) -> Vec<CrossPeak> {
    let (nr, nc) = (map.nrows(), map.ncols());
    let mut vmax = 0.0_f64;
    for k in 0..nc {
        for j in 0..nr {
            vmax = vmax.max(map[(j, k)]);
        }
    }
    let mut out = Vec::new();
    for j in 1..nr.saturating_sub(1) {
        for k in 1..nc.saturating_sub(1) {
            let v = map[(j, k)];
            if v < rel_threshold * vmax {
                continue;
            }
            let mut is_max = true;
            'n: for dj in [-1i64, 0, 1] {
                for dk in [-1i64, 0, 1] {
                    if dj == 0 && dk == 0 {
                        continue;
                    }
                    let w = map[((j as i64 + dj) as usize, (k as i64 + dk) as usize)];
                    // ties broken towards the lower index so plateaus yield one maximum
                    if w > v || (w == v && (dj, dk) < (0, 0)) {
                        is_max = false;
                        break 'n;
                    }
                }
            }
            if is_max {
                out.push(CrossPeak {
                    omega_x: ax[j],
                    omega_y: ay[k],
                    height: v,
                    j,
                    k,
                });
            }
        }
    }
    out.sort_by(|a, b| b.height.total_cmp(&a.height));
    out
}
