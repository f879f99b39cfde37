mod common;

use common::{bare, config_strategy, norm3, product_dipoles};
use defect_cascade::amplitude::{amplitude_grid, auto_grid, AmplitudeGrid, FrequencyGrid, GridPolicy};
use defect_cascade::entanglement::{analyze, bell_metrics_of, entropy_of, schmidt_decompose};
use defect_cascade::physics::{dipole_between, dipole_coupling, CoupledSystem, DefectPairConfig, StateLabel};
use defect_cascade::spectra::spectra;
use defect_cascade::units::uev;
use defect_cascade::C64;
use faer::Mat;
use proptest::prelude::*;

fn complex_matrix(n: usize, m: usize, data: &[(f64, f64)]) -> Mat<C64> {
    Mat::from_fn(n, m, |j, k| {
        let (re, im) = data[j * m + k];
        C64::new(re, im)
    })
}

/// Product of Householder reflections I − 2 v vᴴ / |v|², a random unitary.
fn householder_unitary(n: usize, vs: &[Vec<(f64, f64)>]) -> Mat<C64> {
    let mut u = Mat::<C64>::identity(n, n);
    for v in vs {
        let v: Vec<C64> = v[..n].iter().map(|&(a, b)| C64::new(a, b)).collect();
        let vv: f64 = v.iter().map(|z| z.norm_sqr()).sum();
        if vv < 1e-6 {
            continue;
        }
        let h = Mat::from_fn(n, n, |i, j| {
            let id = if i == j { 1.0 } else { 0.0 };
            C64::new(id, 0.0) - v[i] * v[j].conj() * (2.0 / vv)
        });
        u = &h * &u;
    }
    u
}

fn as_grid(c: Mat<C64>) -> AmplitudeGrid {
    let n = c.nrows();
    let mut a = AmplitudeGrid {
        grid: FrequencyGrid::new(2.0, 2.0, 1e-6, n).unwrap(),
        c,
        normalized: false,
    };
    a.normalize().unwrap();
    a
}

fn fill(n: usize) -> impl Strategy<Value = Vec<(f64, f64)>> {
    prop::collection::vec((-1.0..1.0f64, -1.0..1.0f64), n)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(100))]

    #[test]
    fn eigenvalues_follow_closed_forms(cfg in config_strategy(true)) {
        let sys = CoupledSystem::new(&cfg).unwrap();
        let (wx, wy) = bare(&cfg);
        let j = dipole_coupling(&cfg).unwrap();
        prop_assert_eq!(j.j_xy, 0.0);
        // Signed convention: the symmetric state sits at ω + J.
        let expect = [
            (StateLabel::G, 0.0),
            (StateLabel::XS, wx + j.j_xx),
            (StateLabel::XA, wx - j.j_xx),
            (StateLabel::YS, wy + j.j_yy),
            (StateLabel::YA, wy - j.j_yy),
            (StateLabel::XX, 2.0 * wx),
            (StateLabel::YY, 2.0 * wy),
            (StateLabel::XYS, wx + wy),
            (StateLabel::XYA, wx + wy),
        ];
        for (s, e) in expect {
            let got = sys.energy(s);
            prop_assert!((got - e).abs() <= 1e-12 * e.abs().max(1.0), "{:?}: {} vs {}", s, got, e);
        }
    }

    #[test]
    fn eigenvectors_are_orthonormal_with_small_residual(cfg in config_strategy(false)) {
        let sys = CoupledSystem::new(&cfg).unwrap();
        let v = &sys.eigen.vectors;
        let gram = v.transpose() * v;
        for a in 0..9 {
            for b in 0..9 {
                let id = if a == b { 1.0 } else { 0.0 };
                prop_assert!((gram[(a, b)] - id).abs() < 1e-12);
            }
        }
        let h = &sys.hamiltonian;
        let scale = h.norm();
        for s in StateLabel::ALL {
            let col = v.column(s.index());
            let r = h * col - col * sys.energy(s);
            prop_assert!(r.norm() < 1e-10 * scale, "{:?}: residual {:e}, E {}", s, r.norm(), sys.energy(s));
        }
    }

    #[test]
    fn symmetric_antisymmetric_dipoles_vanish(cfg in config_strategy(false)) {
        let sys = CoupledSystem::new(&cfg).unwrap();
        let ops = product_dipoles(cfg.d_x, cfg.d_y);
        let v = &sys.eigen.vectors;
        for a in StateLabel::ALL {
            for b in StateLabel::ALL {
                if a.is_symmetric() == b.is_symmetric() {
                    continue;
                }
                let m: Vec<f64> = ops
                    .iter()
                    .map(|d| (v.column(a.index()).transpose() * d * v.column(b.index()))[(0, 0)])
                    .collect();
                prop_assert!(norm3([m[0], m[1], m[2]]) < 1e-12, "{:?}-{:?}", a, b);
                prop_assert_eq!(norm3(dipole_between(&sys.dipoles, a, b)), 0.0);
            }
        }
    }

    #[test]
    fn dipole_table_without_cross_coupling(cfg in config_strategy(true)) {
        use StateLabel::*;
        let sys = CoupledSystem::new(&cfg).unwrap();
        let (dx, dy) = (cfg.d_x, cfg.d_y);
        let r2 = 2f64.sqrt();
        // Worked out from the ideal product-basis states by hand.
        let table = [
            (G, XS, r2 * dx),
            (G, YS, r2 * dy),
            (XS, XX, r2 * dx),
            (YS, YY, r2 * dy),
            (XS, XYS, dy),
            (YS, XYS, dx),
            (XA, XYA, dy),
            (YA, XYA, dx),
        ];
        for (a, b, m) in table {
            prop_assert!((sys.dipole_magnitude(a, b) - m).abs() < 1e-12, "{:?}-{:?}", a, b);
        }
        let nonzero = sys.dipoles.len();
        prop_assert_eq!(nonzero, table.len());
    }

    #[test]
    fn cascade_energy_conservation(cfg in config_strategy(false)) {
        let sys = CoupledSystem::new(&cfg).unwrap();
        let f = &sys.cascade;
        let tol = 1e-12 * f.omega_xys;
        prop_assert!((f.omega_x1 + f.omega_y2 - f.omega_xys).abs() < tol);
        prop_assert!((f.omega_x2 + f.omega_y1 - f.omega_xys).abs() < tol);
    }

    #[test]
    fn coupling_scales_as_inverse_cube(cfg in config_strategy(false), k in 1.1..5.0f64) {
        let j1 = dipole_coupling(&cfg).unwrap();
        let j2 = dipole_coupling(&DefectPairConfig { separation: k * cfg.separation, ..cfg.clone() }).unwrap();
        let j3 = dipole_coupling(&DefectPairConfig { epsilon_r: k * cfg.epsilon_r, ..cfg.clone() }).unwrap();
        for (a, b, c) in [(j1.j_xx, j2.j_xx, j3.j_xx), (j1.j_yy, j2.j_yy, j3.j_yy), (j1.j_xy, j2.j_xy, j3.j_xy)] {
            prop_assert!((b * k.powi(3) - a).abs() <= 1e-14 * a.abs() + 1e-300);
            prop_assert!((c * k - a).abs() <= 1e-14 * a.abs() + 1e-300);
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn schmidt_invariants(n in 3usize..10, data in fill(100)) {
        let amps = as_grid(complex_matrix(n, n, &data));
        let spec = schmidt_decompose(&amps).unwrap();
        let l = &spec.lambdas;
        let sum: f64 = l.iter().map(|x| x * x).sum();
        prop_assert!((sum - 1.0).abs() < 1e-10);
        prop_assert!(l.windows(2).all(|w| w[0] >= w[1]));
        let (eta, f) = bell_metrics_of(l);
        prop_assert!((0.5..=1.0 + 1e-12).contains(&f), "F = {}", f);
        let tail: f64 = l.iter().skip(2).map(|x| x * x).sum();
        prop_assert!((eta + tail - 1.0).abs() < 1e-10);
        prop_assert!(entropy_of(l) >= 0.0);

        let u = spec.modes_x.as_ref().unwrap();
        let v = spec.modes_y.as_ref().unwrap();
        let gu = u.adjoint() * u;
        let gv = v.adjoint() * v;
        for a in 0..n {
            for b in 0..n {
                let id = if a == b { 1.0 } else { 0.0 };
                prop_assert!((gu[(a, b)] - C64::new(id, 0.0)).norm() < 1e-10);
                prop_assert!((gv[(a, b)] - C64::new(id, 0.0)).norm() < 1e-10);
            }
        }
        let mut err = 0.0;
        for j in 0..n {
            for k in 0..n {
                let mut s = C64::new(0.0, 0.0);
                for m in 0..n {
                    s += u[(j, m)] * v[(k, m)] * l[m];
                }
                err += (s - amps.c[(j, k)]).norm_sqr();
            }
        }
        prop_assert!(err.sqrt() < 1e-10);
    }

    #[test]
    fn fidelity_bounds_on_random_spectra(raw in prop::collection::vec(0.0..1.0f64, 1..12)) {
        let mut l = raw.clone();
        l.sort_by(|a, b| b.total_cmp(a));
        prop_assume!(l[0] > 1e-9);
        let norm = l.iter().map(|x| x * x).sum::<f64>().sqrt();
        let l: Vec<f64> = l.iter().map(|x| x / norm).collect();
        let (_, f) = bell_metrics_of(&l);
        prop_assert!(f >= 0.5 - 1e-15 && f <= 1.0 + 1e-15);
        if l.len() >= 2 && l[0] == l[1] {
            prop_assert!((f - 1.0).abs() < 1e-15);
        }
    }

    #[test]
    fn entropy_is_invariant_under_local_unitaries(
        n in 3usize..9,
        data in fill(81),
        hx in prop::collection::vec(fill(9), 3),
        hy in prop::collection::vec(fill(9), 3),
    ) {
        let c = complex_matrix(n, n, &data);
        let before = analyze(&as_grid(c.clone())).unwrap();
        let ux = householder_unitary(n, &hx);
        let uy = householder_unitary(n, &hy);
        // c'_{jk} = Σ Ux_{jj'} Uy_{kk'} c_{j'k'}
        let mixed = &ux * &c * uy.transpose();
        let after = analyze(&as_grid(mixed)).unwrap();
        prop_assert!((before.entropy_bits - after.entropy_bits).abs() < 1e-10);
        prop_assert!((before.eta - after.eta).abs() < 1e-10);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(12))]

    #[test]
    fn marginals_match_direct_sums(
        dx in 0.3..1.5f64,
        off in -30.0..30.0f64,
        gamma in 0.5..3.0f64,
    ) {
        let cfg = DefectPairConfig { d_x: dx, gamma_ref: uev(gamma), ..DefectPairConfig::reference() };
        let cfg = cfg.with_xs_offset(uev(off)).unwrap();
        let sys = CoupledSystem::new(&cfg).unwrap();
        let grid = auto_grid(&sys, &GridPolicy::with_points(96)).unwrap();
        let amps = amplitude_grid(&sys, &grid).unwrap();
        let s = spectra(&amps);
        let n = grid.n;
        let mut total = 0.0;
        for j in 0..n {
            let row: f64 = (0..n).map(|k| amps.c[(j, k)].norm_sqr()).sum();
            prop_assert!((row - s.n_x[j]).abs() < 1e-14);
            total += row;
        }
        for k in 0..n {
            let col: f64 = (0..n).map(|j| amps.c[(j, k)].norm_sqr()).sum();
            prop_assert!((col - s.n_y[k]).abs() < 1e-14);
        }
        prop_assert!((total - 1.0).abs() < 1e-12);
        prop_assert!((s.n_y.iter().sum::<f64>() - 1.0).abs() < 1e-12);
        for j in 0..n {
            for k in 0..n {
                prop_assert!(s.n_xy[(j, k)] >= 0.0);
            }
        }
    }
}
