//! Two-colour two-photon pumping of |xy_S⟩ from the ground state.
//!
//! Four amplitudes (g, x_S, y_S, xy_S) under two classical drives in the
//! rotating-wave approximation. The x-polarized laser couples g ↔ x_S with
//! strength √2 E_x and y_S ↔ xy_S with E_x; the y-polarized laser couples
//! g ↔ y_S with √2 E_y and x_S ↔ xy_S with E_y. In the frame co-rotating with
//! both lasers the Hamiltonian is time independent, and populations equal
//! those of the bare interaction picture.
//!
//! With one intermediate state detuned by δ, eliminating it adiabatically
//! leaves Rabi oscillation between g and xy_S at g_eff = √2 E_x* E_y* / δ.

use log::warn;
use nalgebra::Matrix4;
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

use super::ode::{integrate, sample_times, OdeOptions};
use crate::physics::CoupledSystem;
use crate::{Error, Result, C64};

/// |E|/δ above which the adiabatic elimination is flagged.
pub const ADIABATIC_WARN: f64 = 0.1;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PumpRoute {
    /// Lasers at ω_X1 + δ and ω_Y2 − δ; x_S is the intermediate state.
    ViaXs,
    /// Lasers at ω_X2 − δ and ω_Y1 + δ; y_S is the intermediate state.
    ViaYs,
}

/// Drive amplitudes and detuning, all in eV (ħ = 1).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Drive {
    pub e_x: C64,
    pub e_y: C64,
    pub delta: f64,
    pub route: PumpRoute,
}

impl Drive {
    /// max(|E_x|, |E_y|) / |δ|.
    pub fn adiabaticity(&self) -> f64 {
        self.e_x.norm().max(self.e_y.norm()) / self.delta.abs()
    }

    /// Laser energies (ν_x, ν_y) for this route.
    pub fn laser_energies(&self, system: &CoupledSystem) -> (f64, f64) {
        let f = &system.cascade;
        match self.route {
            PumpRoute::ViaXs => (f.omega_x1 + self.delta, f.omega_y2 - self.delta),
            PumpRoute::ViaYs => (f.omega_x2 - self.delta, f.omega_y1 + self.delta),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EffectiveCoupling {
    pub g_eff: C64,
    /// π/(2|g_eff|) in ħ/eV; `None` when g_eff = 0.
    pub tau_drive: Option<f64>,
}

pub fn effective_coupling(e_x: C64, e_y: C64, delta: f64) -> Result<EffectiveCoupling> {
    if delta == 0.0 || !delta.is_finite() {
        return Err(Error::domain(format!("pump detuning must be nonzero (got {delta})")));
    }
    let ratio = e_x.norm().max(e_y.norm()) / delta.abs();
    if ratio > ADIABATIC_WARN {
        warn!("|E|/delta = {ratio:.3} exceeds {ADIABATIC_WARN}; adiabatic elimination is unreliable");
    }
    let g_eff = 2f64.sqrt() * e_x.conj() * e_y.conj() / delta;
    let tau_drive = if g_eff.norm() > 0.0 {
        Some(PI / (2.0 * g_eff.norm()))
    } else {
        None
    };
    Ok(EffectiveCoupling { g_eff, tau_drive })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PumpSample {
    pub t: f64,
    pub g: f64,
    pub xs: f64,
    pub ys: f64,
    pub xys: f64,
    /// sin²(|g_eff| t).
    pub envelope: f64,
}

impl PumpSample {
    pub fn norm(&self) -> f64 {
        self.g + self.xs + self.ys + self.xys
    }
}

#[derive(Debug, Clone)]
pub struct PumpRun {
    pub coupling: EffectiveCoupling,
    pub trace: Vec<PumpSample>,
    /// Final amplitudes (g, x_S, y_S, xy_S) in the laser frame.
    pub amplitudes: [C64; 4],
}

impl PumpRun {
    pub fn final_sample(&self) -> &PumpSample {
        self.trace.last().expect("trace has at least the initial sample")
    }

    /// Largest |P_xyS(t) − sin²(|g_eff| t)| over the trace.
    pub fn max_envelope_deviation(&self) -> f64 {
        self.trace
            .iter()
            .map(|s| (s.xys - s.envelope).abs())
            .fold(0.0, f64::max)
    }
}

/// Laser-frame Hamiltonian in the order (g, x_S, y_S, xy_S).
pub fn pump_hamiltonian(system: &CoupledSystem, drive: &Drive) -> Matrix4<C64> {
    let f = &system.cascade;
    let (nu_x, nu_y) = drive.laser_energies(system);
    let r2 = 2f64.sqrt();
    let z = C64::new(0.0, 0.0);
    let re = |x: f64| C64::new(x, 0.0);
    // Upper-triangle couplings ⟨a|H|b⟩ with a below b in energy.
    let gx = drive.e_x.conj() * r2;
    let gy = drive.e_y.conj() * r2;
    let x_xy = drive.e_y.conj();
    let y_xy = drive.e_x.conj();
    Matrix4::new(
        z,
        gx,
        gy,
        z,
        gx.conj(),
        re(f.omega_x1 - nu_x),
        z,
        x_xy,
        gy.conj(),
        z,
        re(f.omega_y1 - nu_y),
        y_xy,
        z,
        x_xy.conj(),
        y_xy.conj(),
        // ω_xyS − ν_x − ν_y, via the x_S path so the route-XS value is exactly 0
        re((f.omega_x1 - nu_x) + (f.omega_y2 - nu_y)),
    )
}

/// Integrate from a(0) = |g⟩ to `t_end` (ħ/eV), sampling `samples` points.
pub fn integrate_pump(
    system: &CoupledSystem,
    drive: &Drive,
    t_end: f64,
    samples: usize,
    ode: &OdeOptions,
) -> Result<PumpRun> {
    let coupling = effective_coupling(drive.e_x, drive.e_y, drive.delta)?;
    if !(t_end > 0.0 && t_end.is_finite()) {
        return Err(Error::domain(format!("t_end must be positive (got {t_end})")));
    }
    let split = system.cascade.splitting().abs();
    if drive.delta.abs() >= split {
        warn!(
            "pump detuning {:.3e} eV is not below the line splitting {:.3e} eV",
            drive.delta.abs(),
            split
        );
    }
    let h = pump_hamiltonian(system, drive);
    let g_abs = coupling.g_eff.norm();
    let mi = C64::new(0.0, -1.0);
    let rhs = |_t: f64, a: &[C64], da: &mut [C64]| {
        for r in 0..4 {
            let mut acc = C64::new(0.0, 0.0);
            for c in 0..4 {
                acc += h[(r, c)] * a[c];
            }
            da[r] = mi * acc;
        }
    };
    let mut trace = Vec::with_capacity(samples + 1);
    let mut a0 = vec![C64::new(0.0, 0.0); 4];
    a0[0] = C64::new(1.0, 0.0);
    let times = sample_times(0.0, t_end, samples.max(1));
    let (a, _) = integrate(rhs, 0.0, a0, t_end, &times, ode, |t, a| {
        let s = PumpSample {
            t,
            g: a[0].norm_sqr(),
            xs: a[1].norm_sqr(),
            ys: a[2].norm_sqr(),
            xys: a[3].norm_sqr(),
            envelope: (g_abs * t).sin().powi(2),
        };
        if (s.norm() - 1.0).abs() > 1e-8 {
            return Err(Error::Integrator {
                t,
                reason: format!("pump norm drifted to {:.12}", s.norm()),
            });
        }
        trace.push(s);
        Ok(())
    })?;
    Ok(PumpRun {
        coupling,
        trace,
        amplitudes: [a[0], a[1], a[2], a[3]],
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::physics::DefectPairConfig;
    use crate::units::uev;

    fn sys() -> CoupledSystem {
        CoupledSystem::new(&DefectPairConfig::reference()).unwrap()
    }

    #[test]
    fn effective_coupling_examples() {
        let e = C64::new(0.3, 0.0);
        let c = effective_coupling(e, e, 2.0).unwrap();
        assert!((c.g_eff.re - 2f64.sqrt() * 0.09 / 2.0).abs() < 1e-15);
        let d = effective_coupling(e, e, 4.0).unwrap();
        assert!((c.g_eff.norm() / d.g_eff.norm() - 2.0).abs() < 1e-14);
        let z = effective_coupling(C64::new(0.0, 0.0), e, 2.0).unwrap();
        assert_eq!(z.g_eff.norm(), 0.0);
        assert!(z.tau_drive.is_none());
        assert!(matches!(effective_coupling(e, e, 0.0), Err(Error::Domain(_))));
    }

    #[test]
    fn matches_exact_propagator() {
        let s = sys();
        let drive = Drive {
            e_x: C64::new(uev(0.02), 0.0),
            e_y: C64::new(uev(0.03), 0.01 * uev(1.0)),
            delta: uev(0.5),
            route: PumpRoute::ViaXs,
        };
        let t_end = 40.0 / uev(1.0);
        let run = integrate_pump(&s, &drive, t_end, 4, &OdeOptions::default()).unwrap();
        // exp(−iHt)|g⟩ by diagonalising the Hermitian 4×4 matrix.
        let h = pump_hamiltonian(&s, &drive);
        let eig = nalgebra::SymmetricEigen::new(h);
        let mut want = [C64::new(0.0, 0.0); 4];
        for n in 0..4 {
            let ph = C64::new(0.0, -eig.eigenvalues[n] * t_end).exp();
            let coef = eig.eigenvectors[(0, n)].conj() * ph;
            for (r, w) in want.iter_mut().enumerate() {
                *w += eig.eigenvectors[(r, n)] * coef;
            }
        }
        for r in 0..4 {
            assert!((run.amplitudes[r] - want[r]).norm() < 1e-7, "{r}");
        }
    }

    #[test]
    fn no_y_drive_no_transfer() {
        let s = sys();
        let drive = Drive {
            e_x: C64::new(uev(0.02), 0.0),
            e_y: C64::new(0.0, 0.0),
            delta: uev(1.0),
            route: PumpRoute::ViaXs,
        };
        let run = integrate_pump(&s, &drive, 200.0 / uev(1.0), 100, &OdeOptions::default()).unwrap();
        assert!(run.trace.iter().all(|p| p.xys < 1e-4));
    }
}
