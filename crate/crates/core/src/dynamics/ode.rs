//! Dormand–Prince 5(4) integrator for complex linear systems.
//!
//! Embedded error estimate with an RMS norm, PI step-size control and
//! first-same-as-last reuse of the final stage.

use crate::{Error, Result, C64};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OdeOptions {
    pub rtol: f64,
    pub atol: f64,
    /// Initial step; `None` picks one from the initial derivative.
    pub h_init: Option<f64>,
    pub max_steps: usize,
}

impl Default for OdeOptions {
    fn default() -> Self {
        OdeOptions {
            rtol: 1e-10,
            atol: 1e-12,
            h_init: None,
            max_steps: 50_000_000,
        }
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct OdeStats {
    pub accepted: usize,
    pub rejected: usize,
    pub evaluations: usize,
}

const C2: f64 = 1.0 / 5.0;
const C3: f64 = 3.0 / 10.0;
const C4: f64 = 4.0 / 5.0;
const C5: f64 = 8.0 / 9.0;

const A21: f64 = 1.0 / 5.0;
const A31: f64 = 3.0 / 40.0;
const A32: f64 = 9.0 / 40.0;
const A41: f64 = 44.0 / 45.0;
const A42: f64 = -56.0 / 15.0;
const A43: f64 = 32.0 / 9.0;
const A51: f64 = 19372.0 / 6561.0;
const A52: f64 = -25360.0 / 2187.0;
const A53: f64 = 64448.0 / 6561.0;
const A54: f64 = -212.0 / 729.0;
const A61: f64 = 9017.0 / 3168.0;
const A62: f64 = -355.0 / 33.0;
const A63: f64 = 46732.0 / 5247.0;
const A64: f64 = 49.0 / 176.0;
const A65: f64 = -5103.0 / 18656.0;
const A71: f64 = 35.0 / 384.0;
const A73: f64 = 500.0 / 1113.0;
const A74: f64 = 125.0 / 192.0;
const A75: f64 = -2187.0 / 6784.0;
const A76: f64 = 11.0 / 84.0;

const E1: f64 = 71.0 / 57600.0;
const E3: f64 = -71.0 / 16695.0;
const E4: f64 = 71.0 / 1920.0;
const E5: f64 = -17253.0 / 339200.0;
const E6: f64 = 22.0 / 525.0;
const E7: f64 = -1.0 / 40.0;

/// Integrate `dy/dt = f(t, y)` from `t0` to `t_end`.
///
/// Steps land exactly on every time in `samples` (ascending, inside
/// `[t0, t_end]`), where `observe` is called; `observe` also sees the initial
/// and final states.
pub fn integrate<F, O>(
    mut f: F,
    t0: f64,
    y0: Vec<C64>,
    t_end: f64,
    samples: &[f64],
    opts: &OdeOptions,
    mut observe: O,
) -> Result<(Vec<C64>, OdeStats)>
where
    F: FnMut(f64, &[C64], &mut [C64]),
    O: FnMut(f64, &[C64]) -> Result<()>,
{
    let n = y0.len();
    let mut y = y0;
    let mut stats = OdeStats::default();
    observe(t0, &y)?;
    if t_end <= t0 || n == 0 {
        return Ok((y, stats));
    }

    let mut k: Vec<Vec<C64>> = vec![vec![C64::new(0.0, 0.0); n]; 7];
    let mut tmp = vec![C64::new(0.0, 0.0); n];
    let mut y_new = vec![C64::new(0.0, 0.0); n];

    f(t0, &y, &mut k[0]);
    stats.evaluations += 1;

    let mut h = match opts.h_init {
        Some(h) => h,
        None => {
            let sc = |v: &C64, y: &C64| v.norm() / (opts.atol + opts.rtol * y.norm());
            let d0 = (y.iter().map(|a| sc(a, a).powi(2)).sum::<f64>() / n as f64).sqrt();
            let d1 = (k[0].iter().zip(&y).map(|(a, b)| sc(a, b).powi(2)).sum::<f64>() / n as f64)
                .sqrt();
            if d0 < 1e-5 || d1 < 1e-5 {
                1e-6 * (t_end - t0)
            } else {
                (0.01 * d0 / d1).min(t_end - t0)
            }
        }
    };

    let mut t = t0;
    let mut err_old = 1e-4_f64;
    let mut last_rejected = false;
    let mut next_sample = samples.iter().position(|&s| s > t0).unwrap_or(samples.len());
    const ALPHA: f64 = 0.2 - 0.75 * 0.04;
    const BETA: f64 = 0.04;

    // remainders below this are roundoff in the sample times, not real steps
    let sliver = |t: f64| t.abs().max(1.0) * f64::EPSILON * 16.0;
    while t_end - t > sliver(t) {
        if stats.accepted + stats.rejected >= opts.max_steps {
            return Err(Error::Integrator {
                t,
                reason: format!("step budget of {} exhausted", opts.max_steps),
            });
        }
        let target = if next_sample < samples.len() {
            samples[next_sample].min(t_end)
        } else {
            t_end
        };
        let h_free = h;
        let mut hit = false;
        if t + h >= target {
            h = target - t;
            hit = true;
        }
        if h <= sliver(t) {
            return Err(Error::Integrator {
                t,
                reason: format!("step size underflow (h = {h:.3e})"),
            });
        }

        let stage = |tmp: &mut [C64], y: &[C64], k: &[Vec<C64>], coeffs: &[(usize, f64)]| {
            for i in 0..n {
                let mut acc = C64::new(0.0, 0.0);
                for &(s, a) in coeffs {
                    acc += k[s][i] * a;
                }
                tmp[i] = y[i] + acc * h;
            }
        };

        stage(&mut tmp, &y, &k, &[(0, A21)]);
        f(t + C2 * h, &tmp, &mut k[1]);
        stage(&mut tmp, &y, &k, &[(0, A31), (1, A32)]);
        f(t + C3 * h, &tmp, &mut k[2]);
        stage(&mut tmp, &y, &k, &[(0, A41), (1, A42), (2, A43)]);
        f(t + C4 * h, &tmp, &mut k[3]);
        stage(&mut tmp, &y, &k, &[(0, A51), (1, A52), (2, A53), (3, A54)]);
        f(t + C5 * h, &tmp, &mut k[4]);
        stage(
            &mut tmp,
            &y,
            &k,
            &[(0, A61), (1, A62), (2, A63), (3, A64), (4, A65)],
        );
        f(t + h, &tmp, &mut k[5]);
        stage(
            &mut y_new,
            &y,
            &k,
            &[(0, A71), (2, A73), (3, A74), (4, A75), (5, A76)],
        );
        f(t + h, &y_new, &mut k[6]);
        stats.evaluations += 6;

        let mut err = 0.0;
        for i in 0..n {
            let e = (k[0][i] * E1
                + k[2][i] * E3
                + k[3][i] * E4
                + k[4][i] * E5
                + k[5][i] * E6
                + k[6][i] * E7)
                * h;
            let sc = opts.atol + opts.rtol * y[i].norm().max(y_new[i].norm());
            err += (e.norm() / sc).powi(2);
        }
        let err = (err / n as f64).sqrt();
        if !err.is_finite() {
            return Err(Error::Integrator {
                t,
                reason: "non-finite error estimate".into(),
            });
        }

        if err <= 1.0 {
            t = if hit { target } else { t + h };
            std::mem::swap(&mut y, &mut y_new);
            k.swap(0, 6);
            stats.accepted += 1;
            if hit && next_sample < samples.len() && target == samples[next_sample] {
                observe(t, &y)?;
                next_sample += 1;
                while next_sample < samples.len() && samples[next_sample] <= t {
                    next_sample += 1;
                }
            }
            let mut fac = 0.9 * err.max(1e-10).powf(-ALPHA) * err_old.powf(BETA);
            fac = fac.clamp(0.2, 10.0);
            if last_rejected {
                fac = fac.min(1.0);
            }
            // a step shortened to land on a sample should not throttle the next one
            h = if hit { h_free.max(h * fac) } else { h * fac };
            err_old = err.max(1e-4);
            last_rejected = false;
        } else {
            h *= (0.9 * err.powf(-ALPHA)).max(0.2);
            stats.rejected += 1;
            last_rejected = true;
        }
    }
    if samples.last().map_or(true, |&s| t_end - s > sliver(s)) {
        observe(t, &y)?;
    }
    Ok((y, stats))
}

/// Evenly spaced sample times in (t0, t_end].
pub fn sample_times(t0: f64, t_end: f64, count: usize) -> Vec<f64> {
    (1..=count)
        .map(|i| {
            if i == count {
                t_end
            } else {
                t0 + (t_end - t0) * i as f64 / count as f64
            }
        })
        .collect()
}
