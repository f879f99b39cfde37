#![allow(dead_code)]

use defect_cascade::physics::{DefectPairConfig, LevelEnergies, Matrix9};
use defect_cascade::units::uev;
use proptest::prelude::*;

/// Random valid pair with bare energies. `planar` keeps the axis in the x-z
/// plane, where the x-y cross coupling vanishes.
pub fn config_strategy(planar: bool) -> impl Strategy<Value = DefectPairConfig> {
    (
        1.5..2.5f64,
        1.5..2.5f64,
        0.05..2.0f64,
        0.05..2.0f64,
        2.0..20.0f64,
        1.0..10.0f64,
        0.0..std::f64::consts::PI,
        0.0..2.0 * std::f64::consts::PI,
        0.05..5.0f64,
    )
        .prop_map(move |(wx, wy, dx, dy, r, eps, theta, phi, g)| {
            let axis = if planar {
                [theta.cos(), 0.0, theta.sin()]
            } else {
                [theta.sin() * phi.cos(), theta.sin() * phi.sin(), theta.cos()]
            };
            let norm = (axis[0] * axis[0] + axis[1] * axis[1] + axis[2] * axis[2]).sqrt();
            DefectPairConfig {
                levels: LevelEnergies::Bare {
                    omega_x: wx,
                    omega_y: wy,
                },
                d_x: dx,
                d_y: dy,
                separation: r,
                epsilon_r: eps,
                axis: axis.map(|a| a / norm),
                gamma_ref: uev(g),
            }
        })
}

pub fn bare(cfg: &DefectPairConfig) -> (f64, f64) {
    match cfg.levels {
        LevelEnergies::Bare { omega_x, omega_y } => (omega_x, omega_y),
        _ => unreachable!(),
    }
}

/// Cartesian components of d_α + d_β in the product basis
/// gg, gx, xg, gy, yg, xx, xy, yx, yy.
pub fn product_dipoles(dx: f64, dy: f64) -> [Matrix9; 3] {
    const B: [(u8, u8); 9] = [
        (0, 0), (0, 1), (1, 0), (0, 2), (2, 0), (1, 1), (1, 2), (2, 1), (2, 2),
    ];
    let single = |a: u8, b: u8| -> [f64; 3] {
        match (a.min(b), a.max(b)) {
            (0, 1) => [dx, 0.0, 0.0],
            (0, 2) => [0.0, dy, 0.0],
            _ => [0.0; 3],
        }
    };
    let mut out = [Matrix9::zeros(); 3];
    for (i, &(a1, b1)) in B.iter().enumerate() {
        for (j, &(a2, b2)) in B.iter().enumerate() {
            for (c, m) in out.iter_mut().enumerate() {
                let mut x = 0.0;
                if b1 == b2 {
                    x += single(a1, a2)[c];
                }
                if a1 == a2 {
                    x += single(b1, b2)[c];
                }
                m[(i, j)] = x;
            }
        }
    }
    out
}

pub fn norm3(v: [f64; 3]) -> f64 {
    (v[0] * v[0] + v[1] * v[1] + v[2] * v[2]).sqrt()
}

