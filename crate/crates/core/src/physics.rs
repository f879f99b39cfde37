//! Electronic structure of two dipole-coupled three-level defects.
//!
//! Each defect has a ground state `g` and two excited states `x`, `y` whose
//! transition dipoles point along x̂ and ŷ. The pair lives in the nine-state
//! product space `{gg, gx, xg, gy, yg, xx, xy, yx, yy}` (first letter: defect
//! α, second: defect β). Only single excitations are exchanged by the dipole
//! interaction, so the doubly excited states stay at the bare sums.
//!
//! Eigenstates are resolved inside the exchange-symmetric and antisymmetric
//! subspaces separately and labelled by overlap with the symmetric and
//! antisymmetric combinations (`x_S`, `x_A`, ...). Degenerate subspaces are
//! rotated onto the nearest labelled combinations.

use log::warn;
use nalgebra::{DMatrix, SMatrix, Vector3};
use serde::{Deserialize, Serialize};
use std::f64::consts::FRAC_1_SQRT_2;

use crate::units::{ANGSTROM_PER_NM, COULOMB_EV_ANGSTROM, MICRO_EV};
use crate::{Error, Result};

pub type Matrix9 = SMatrix<f64, 9, 9>;

/// Single-defect level.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Level {
    G,
    X,
    Y,
}

/// Product basis in the fixed order used throughout the crate.
const PRODUCT_BASIS: [(Level, Level); 9] = [
    (Level::G, Level::G),
    (Level::G, Level::X),
    (Level::X, Level::G),
    (Level::G, Level::Y),
    (Level::Y, Level::G),
    (Level::X, Level::X),
    (Level::X, Level::Y),
    (Level::Y, Level::X),
    (Level::Y, Level::Y),
];

pub const PRODUCT_LABELS: [&str; 9] = ["gg", "gx", "xg", "gy", "yg", "xx", "xy", "yx", "yy"];

fn product_index(a: Level, b: Level) -> usize {
    PRODUCT_BASIS
        .iter()
        .position(|&s| s == (a, b))
        .expect("every level pair is in the product basis")
}

/// Eigenstate labels, in the row order of the eigenstate table
/// (g, y_A, y_S, x_S, x_A, yy, xy_S, xy_A, xx).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum StateLabel {
    G,
    YA,
    YS,
    XS,
    XA,
    YY,
    XYS,
    XYA,
    XX,
}

impl StateLabel {
    pub const ALL: [StateLabel; 9] = [
        StateLabel::G,
        StateLabel::YA,
        StateLabel::YS,
        StateLabel::XS,
        StateLabel::XA,
        StateLabel::YY,
        StateLabel::XYS,
        StateLabel::XYA,
        StateLabel::XX,
    ];

    pub fn index(self) -> usize {
        Self::ALL.iter().position(|&s| s == self).unwrap()
    }

    pub fn name(self) -> &'static str {
        match self {
            StateLabel::G => "g",
            StateLabel::YA => "y_A",
            StateLabel::YS => "y_S",
            StateLabel::XS => "x_S",
            StateLabel::XA => "x_A",
            StateLabel::YY => "yy",
            StateLabel::XYS => "xy_S",
            StateLabel::XYA => "xy_A",
            StateLabel::XX => "xx",
        }
    }

    pub fn excitations(self) -> usize {
        match self {
            StateLabel::G => 0,
            StateLabel::YA | StateLabel::YS | StateLabel::XS | StateLabel::XA => 1,
            _ => 2,
        }
    }

    pub fn is_symmetric(self) -> bool {
        !matches!(self, StateLabel::XA | StateLabel::YA | StateLabel::XYA)
    }

    /// The ideal (uncoupled-limit) combination in the product basis.
    pub fn ideal_vector(self) -> [f64; 9] {
        let mut v = [0.0; 9];
        let s = FRAC_1_SQRT_2;
        let mut put = |a, b, c: f64| v[product_index(a, b)] = c;
        use Level::*;
        match self {
            StateLabel::G => put(G, G, 1.0),
            StateLabel::XX => put(X, X, 1.0),
            StateLabel::YY => put(Y, Y, 1.0),
            StateLabel::XS => {
                put(G, X, s);
                put(X, G, s);
            }
            StateLabel::XA => {
                put(G, X, s);
                put(X, G, -s);
            }
            StateLabel::YS => {
                put(G, Y, s);
                put(Y, G, s);
            }
            StateLabel::YA => {
                put(G, Y, s);
                put(Y, G, -s);
            }
            StateLabel::XYS => {
                put(X, Y, s);
                put(Y, X, s);
            }
            StateLabel::XYA => {
                put(X, Y, s);
                put(Y, X, -s);
            }
        }
        v
    }
}

/// How the excited-state energies of the pair are pinned.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum LevelEnergies {
    /// Single-defect excitation energies ħω_x, ħω_y (eV).
    Bare { omega_x: f64, omega_y: f64 },
    /// Energy of the coupled |y_S⟩ state and the offset of |x_S⟩ above it (eV).
    Dressed { omega_ys: f64, omega_xs_offset: f64 },
}

/// Physical inputs for a defect pair. Energies in eV, dipoles in e·Å,
/// separation in nm.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DefectPairConfig {
    pub levels: LevelEnergies,
    pub d_x: f64,
    pub d_y: f64,
    pub separation: f64,
    pub epsilon_r: f64,
    /// Unit vector along r_α − r_β.
    pub axis: [f64; 3],
    /// Decay rate of the g ↔ y_S transition (eV).
    pub gamma_ref: f64,
}

impl DefectPairConfig {
    /// Parameters of the reference spectrum: ω_yS = 2 eV, ω_xS = ω_yS + 10 µeV,
    /// d_x = d_y = 1 e·Å, 5 nm apart along x̂, ε_r = 2, γ_{g,yS} = 0.2 µeV.
    pub fn reference() -> Self {
        DefectPairConfig {
            levels: LevelEnergies::Dressed {
                omega_ys: 2.0,
                omega_xs_offset: 10.0 * MICRO_EV,
            },
            d_x: 1.0,
            d_y: 1.0,
            separation: 5.0,
            epsilon_r: 2.0,
            axis: [1.0, 0.0, 0.0],
            gamma_ref: 0.2 * MICRO_EV,
        }
    }

    /// Every violated invariant, not just the first.
    pub fn violations(&self) -> Vec<String> {
        let mut out = Vec::new();
        let finite = |name: &str, v: f64, out: &mut Vec<String>| {
            if !v.is_finite() {
                out.push(format!("{name} must be finite (got {v})"));
                false
            } else {
                true
            }
        };
        match self.levels {
            LevelEnergies::Bare { omega_x, omega_y } => {
                for (name, v) in [("omega_x", omega_x), ("omega_y", omega_y)] {
                    if finite(name, v, &mut out) && v <= 0.0 {
                        out.push(format!("{name} must be > 0 (got {v})"));
                    }
                }
            }
            LevelEnergies::Dressed {
                omega_ys,
                omega_xs_offset,
            } => {
                if finite("omega_yS", omega_ys, &mut out) && omega_ys <= 0.0 {
                    out.push(format!("omega_yS must be > 0 (got {omega_ys})"));
                }
                finite("omega_xS_offset", omega_xs_offset, &mut out);
            }
        }
        for (name, v) in [("d_x", self.d_x), ("d_y", self.d_y)] {
            if finite(name, v, &mut out) && v < 0.0 {
                out.push(format!("{name} must be >= 0 (got {v})"));
            }
        }
        if finite("separation", self.separation, &mut out) && self.separation <= 0.0 {
            out.push(format!("separation must be > 0 (got {})", self.separation));
        }
        if finite("epsilon_r", self.epsilon_r, &mut out) && self.epsilon_r < 1.0 {
            out.push(format!("epsilon_r must be >= 1 (got {})", self.epsilon_r));
        }
        if finite("gamma_ref", self.gamma_ref, &mut out) && self.gamma_ref <= 0.0 {
            out.push(format!("gamma_ref must be > 0 (got {})", self.gamma_ref));
        }
        let norm = Vector3::from(self.axis).norm();
        if !norm.is_finite() || (norm - 1.0).abs() > 1e-12 {
            out.push(format!("axis must be a unit vector (|axis| = {norm})"));
        }
        out
    }

    pub fn validate(&self) -> Result<()> {
        let v = self.violations();
        if v.is_empty() {
            Ok(())
        } else {
            Err(Error::Config(v))
        }
    }

    /// Single-defect energies (ħω_x, ħω_y) in eV.
    pub fn bare_energies(&self) -> Result<(f64, f64)> {
        match self.levels {
            LevelEnergies::Bare { omega_x, omega_y } => Ok((omega_x, omega_y)),
            LevelEnergies::Dressed {
                omega_ys,
                omega_xs_offset,
            } => {
                // The symmetric single excitations form the 2×2 block
                // [[ω_x + J_xx, J_xy], [J_xy, ω_y + J_yy]]; invert it for the
                // diagonal that reproduces the requested eigenvalues.
                let j = dipole_coupling(self)?;
                let ex = omega_ys + omega_xs_offset;
                let ey = omega_ys;
                let c = 0.5 * (j.j_xy + j.j_yx);
                let gap2 = (ex - ey).powi(2) - 4.0 * c * c;
                if gap2 < 0.0 {
                    return Err(Error::domain(format!(
                        "x_S/y_S offset {:.3e} eV is inside the x-y mixing gap 2|J_xy| = {:.3e} eV",
                        omega_xs_offset,
                        2.0 * c.abs()
                    )));
                }
                let diff = gap2.sqrt().copysign(ex - ey);
                let a = 0.5 * (ex + ey + diff);
                let b = 0.5 * (ex + ey - diff);
                let (wx, wy) = (a - j.j_xx, b - j.j_yy);
                Ok((wx, wy))
            }
        }
    }

    /// Same pair with the |x_S⟩ − |y_S⟩ offset replaced, |y_S⟩ held fixed.
    pub fn with_xs_offset(&self, offset: f64) -> Result<Self> {
        let omega_ys = match self.levels {
            LevelEnergies::Dressed { omega_ys, .. } => omega_ys,
            LevelEnergies::Bare { .. } => {
                let system = CoupledSystem::new(self)?;
                system.energy(StateLabel::YS)
            }
        };
        Ok(DefectPairConfig {
            levels: LevelEnergies::Dressed {
                omega_ys,
                omega_xs_offset: offset,
            },
            ..self.clone()
        })
    }
}

/// Signed dipole–dipole coupling energies (eV).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CouplingEnergies {
    pub j_xx: f64,
    pub j_yy: f64,
    pub j_xy: f64,
    pub j_yx: f64,
}

impl CouplingEnergies {
    pub fn max_abs(&self) -> f64 {
        [self.j_xx, self.j_yy, self.j_xy, self.j_yx]
            .iter()
            .fold(0.0_f64, |m, v| m.max(v.abs()))
    }
}

/// Point-dipole interaction between the transition dipoles of the two defects.
pub fn dipole_coupling(config: &DefectPairConfig) -> Result<CouplingEnergies> {
    if config.separation == 0.0 {
        return Err(Error::domain("coincident defects"));
    }
    if !(config.separation > 0.0) {
        return Err(Error::domain(format!(
            "separation must be positive (got {} nm)",
            config.separation
        )));
    }
    let r = config.separation * ANGSTROM_PER_NM;
    let n = Vector3::from(config.axis);
    let scale = COULOMB_EV_ANGSTROM / (config.epsilon_r * r * r * r);
    let ex = Vector3::x();
    let ey = Vector3::y();
    let pair = |dp: f64, ep: &Vector3<f64>, dq: f64, eq: &Vector3<f64>| {
        dp * dq * scale * (ep.dot(eq) - 3.0 * ep.dot(&n) * eq.dot(&n))
    };
    Ok(CouplingEnergies {
        j_xx: pair(config.d_x, &ex, config.d_x, &ex),
        j_yy: pair(config.d_y, &ey, config.d_y, &ey),
        j_xy: pair(config.d_x, &ex, config.d_y, &ey),
        j_yx: pair(config.d_y, &ey, config.d_x, &ex),
    })
}

fn level_energy(l: Level, wx: f64, wy: f64) -> f64 {
    match l {
        Level::G => 0.0,
        Level::X => wx,
        Level::Y => wy,
    }
}

fn hamiltonian_from(wx: f64, wy: f64, j: &CouplingEnergies) -> Matrix9 {
    let mut h = Matrix9::zeros();
    for (i, &(a, b)) in PRODUCT_BASIS.iter().enumerate() {
        h[(i, i)] = level_energy(a, wx, wy) + level_energy(b, wx, wy);
    }
    // J_pq (|g p⟩⟨q g| + h.c.)
    let terms = [
        (Level::X, Level::X, j.j_xx),
        (Level::Y, Level::Y, j.j_yy),
        (Level::X, Level::Y, j.j_xy),
        (Level::Y, Level::X, j.j_yx),
    ];
    for (p, q, jpq) in terms {
        let a = product_index(Level::G, p);
        let b = product_index(q, Level::G);
        h[(a, b)] += jpq;
        h[(b, a)] += jpq;
    }
    h
}

/// Electronic Hamiltonian (eV) of the pair in the product basis.
pub fn build_hamiltonian(config: &DefectPairConfig) -> Result<Matrix9> {
    config.validate()?;
    let j = dipole_coupling(config)?;
    let (wx, wy) = config.bare_energies()?;
    let scale = wx.min(wy);
    let biggest = j.max_abs().max(config.gamma_ref);
    if biggest > 1e-3 * scale {
        warn!(
            "coupling/decay energy {biggest:.3e} eV is not small against the transition energy {scale:.3e} eV"
        );
    }
    Ok(hamiltonian_from(wx, wy, &j))
}

/// Labelled eigen-decomposition of the pair Hamiltonian.
#[derive(Debug, Clone)]
pub struct Eigensystem {
    /// Energies indexed by [`StateLabel::index`].
    pub energies: [f64; 9],
    /// Column `StateLabel::index()` is that eigenstate in the product basis.
    pub vectors: Matrix9,
}

impl Eigensystem {
    pub fn energy(&self, s: StateLabel) -> f64 {
        self.energies[s.index()]
    }

    pub fn vector(&self, s: StateLabel) -> [f64; 9] {
        let mut v = [0.0; 9];
        for (i, vi) in v.iter_mut().enumerate() {
            *vi = self.vectors[(i, s.index())];
        }
        v
    }
}

struct BlockEigen {
    eigenvalues: Vec<f64>,
    eigenvectors: DMatrix<f64>,
}

/// Diagonalise `h` inside the exchange-symmetric and antisymmetric blocks and
/// attach eigenstate labels.
pub fn eigensystem(h: &Matrix9) -> Result<Eigensystem> {
    let sym = [
        StateLabel::G,
        StateLabel::XS,
        StateLabel::YS,
        StateLabel::XX,
        StateLabel::XYS,
        StateLabel::YY,
    ];
    let anti = [StateLabel::XA, StateLabel::YA, StateLabel::XYA];

    let scale = (0..9).fold(1.0_f64, |m, i| m.max(h[(i, i)].abs()));
    let mut energies = [0.0; 9];
    let mut vectors = Matrix9::zeros();
    for block in [&sym[..], &anti[..]] {
        let k = block.len();
        let basis = DMatrix::from_fn(9, k, |i, c| block[c].ideal_vector()[i]);
        let hd = DMatrix::from_fn(9, 9, |i, j| h[(i, j)]);
        let hb = basis.transpose() * &hd * &basis;
        let hb = (&hb + hb.transpose()) * 0.5;
        // nalgebra's QR deflates couplings below ~1e-8 relative too early;
        // faer resolves them to machine precision.
        let hf = faer::Mat::<f64>::from_fn(k, k, |i, j| hb[(i, j)]);
        let ef = hf
            .self_adjoint_eigen(faer::Side::Lower)
            .map_err(|e| Error::Linalg(format!("eigendecomposition failed: {e:?}")))?;
        let eig = BlockEigen {
            eigenvalues: (0..k).map(|i| ef.S().column_vector()[i]).collect(),
            eigenvectors: DMatrix::from_fn(k, k, |i, j| ef.U()[(i, j)]),
        };

        let mut order: Vec<usize> = (0..k).collect();
        order.sort_by(|&a, &b| eig.eigenvalues[a].total_cmp(&eig.eigenvalues[b]));

        // Group (near-)degenerate eigenvalues.
        let tol = 1e-13 * scale;
        let mut clusters: Vec<Vec<usize>> = Vec::new();
        for &i in &order {
            match clusters.last_mut() {
                Some(c) if (eig.eigenvalues[i] - eig.eigenvalues[*c.last().unwrap()]).abs() <= tol => {
                    c.push(i)
                }
                _ => clusters.push(vec![i]),
            }
        }

        // Ideal states are the unit vectors of this block's coordinates.
        let mut weight = vec![vec![0.0; k]; clusters.len()];
        for (ci, c) in clusters.iter().enumerate() {
            for (t, w) in weight[ci].iter_mut().enumerate() {
                *w = c.iter().map(|&i| eig.eigenvectors[(t, i)].powi(2)).sum();
            }
        }
        let mut pairs: Vec<(usize, usize)> =
            (0..clusters.len()).flat_map(|c| (0..k).map(move |t| (c, t))).collect();
        pairs.sort_by(|a, b| weight[b.0][b.1].total_cmp(&weight[a.0][a.1]));
        let mut assigned: Vec<Vec<usize>> = vec![Vec::new(); clusters.len()];
        let mut taken = vec![false; k];
        for (c, t) in pairs {
            if !taken[t] && assigned[c].len() < clusters[c].len() {
                assigned[c].push(t);
                taken[t] = true;
            }
        }

        for (ci, c) in clusters.iter().enumerate() {
            let q = DMatrix::from_fn(k, c.len(), |r, col| eig.eigenvectors[(r, c[col])]);
            let targets = &assigned[ci];
            // Rotate the cluster onto its ideal states (orthogonal Procrustes).
            let m = DMatrix::from_fn(c.len(), targets.len(), |r, col| q[(targets[col], r)]);
            let svd = m.svd(true, true);
            let u = svd.u.ok_or_else(|| Error::Linalg("Procrustes SVD".into()))?;
            let v_t = svd.v_t.ok_or_else(|| Error::Linalg("Procrustes SVD".into()))?;
            let rotated = &q * (u * v_t);
            for (col, &t) in targets.iter().enumerate() {
                let label = block[t];
                let in_product = &basis * rotated.column(col);
                let mut v = in_product.clone_owned();
                let norm = v.norm();
                v /= norm;
                let overlap: f64 = (0..9).map(|i| v[i] * label.ideal_vector()[i]).sum();
                if overlap < 0.0 {
                    v = -v;
                }
                let energy = (v.transpose() * &hd * &v)[(0, 0)];
                energies[label.index()] = energy;
                for i in 0..9 {
                    vectors[(i, label.index())] = v[i];
                }
            }
        }
    }
    Ok(Eigensystem { energies, vectors })
}

/// Nonzero matrix element of the dipole operator between two eigenstates.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DipoleElement {
    pub lower: StateLabel,
    pub upper: StateLabel,
    /// ⟨upper| e r |lower⟩ in e·Å.
    pub moment: [f64; 3],
}

impl DipoleElement {
    pub fn magnitude(&self) -> f64 {
        Vector3::from(self.moment).norm()
    }
}

/// Bare two-defect dipole operator, one 9×9 matrix per Cartesian component.
fn bare_dipole_operator(d_x: f64, d_y: f64) -> [Matrix9; 3] {
    let single = |a: Level, b: Level| -> Vector3<f64> {
        match (a, b) {
            (Level::X, Level::G) | (Level::G, Level::X) => Vector3::x() * d_x,
            (Level::Y, Level::G) | (Level::G, Level::Y) => Vector3::y() * d_y,
            _ => Vector3::zeros(),
        }
    };
    let mut out = [Matrix9::zeros(); 3];
    for (i, &(a1, b1)) in PRODUCT_BASIS.iter().enumerate() {
        for (j, &(a2, b2)) in PRODUCT_BASIS.iter().enumerate() {
            let mut m = Vector3::zeros();
            if b1 == b2 {
                m += single(a1, a2);
            }
            if a1 == a2 {
                m += single(b1, b2);
            }
            for c in 0..3 {
                out[c][(i, j)] = m[c];
            }
        }
    }
    out
}

/// Dipole matrix elements in the eigenbasis whose magnitude exceeds
/// 1e-12 × the largest bare moment.
pub fn transition_dipoles(es: &Eigensystem, d_x: f64, d_y: f64) -> Vec<DipoleElement> {
    let ops = bare_dipole_operator(d_x, d_y);
    let in_eigen: Vec<Matrix9> = ops
        .iter()
        .map(|d| es.vectors.transpose() * d * es.vectors)
        .collect();
    let cutoff = 1e-12 * d_x.max(d_y).max(f64::MIN_POSITIVE);
    let mut out = Vec::new();
    for (a, &la) in StateLabel::ALL.iter().enumerate() {
        for (b, &lb) in StateLabel::ALL.iter().enumerate().skip(a + 1) {
            let (lower, upper, il, iu) = if la.excitations() <= lb.excitations() {
                (la, lb, a, b)
            } else {
                (lb, la, b, a)
            };
            let moment = [
                in_eigen[0][(iu, il)],
                in_eigen[1][(iu, il)],
                in_eigen[2][(iu, il)],
            ];
            let el = DipoleElement { lower, upper, moment };
            if el.magnitude() > cutoff {
                out.push(el);
            }
        }
    }
    out
}

/// Full dipole matrix element (zero vector if below the cutoff).
pub fn dipole_between(dipoles: &[DipoleElement], a: StateLabel, b: StateLabel) -> [f64; 3] {
    dipoles
        .iter()
        .find(|d| (d.lower == a && d.upper == b) || (d.lower == b && d.upper == a))
        .map(|d| d.moment)
        .unwrap_or([0.0; 3])
}

/// Photon energies (eV) of the four bright cascade transitions out of |xy_S⟩.
///
/// X1 = x_S → g and Y2 = xy_S → x_S form one decay path; Y1 = y_S → g and
/// X2 = xy_S → y_S the other.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CascadeFrequencies {
    pub omega_x1: f64,
    pub omega_x2: f64,
    pub omega_y1: f64,
    pub omega_y2: f64,
    pub omega_xys: f64,
}

impl CascadeFrequencies {
    /// ω_Y2 − ω_Y1, signed.
    pub fn splitting(&self) -> f64 {
        self.omega_y2 - self.omega_y1
    }

    /// ω_X2 − ω_X1, signed.
    pub fn x_splitting(&self) -> f64 {
        self.omega_x2 - self.omega_x1
    }

    pub fn x_lines(&self) -> [f64; 2] {
        [self.omega_x1, self.omega_x2]
    }

    pub fn y_lines(&self) -> [f64; 2] {
        [self.omega_y1, self.omega_y2]
    }
}

pub fn cascade_frequencies(es: &Eigensystem) -> CascadeFrequencies {
    let g = es.energy(StateLabel::G);
    let xs = es.energy(StateLabel::XS);
    let ys = es.energy(StateLabel::YS);
    let xys = es.energy(StateLabel::XYS);
    CascadeFrequencies {
        omega_x1: xs - g,
        omega_x2: xys - ys,
        omega_y1: ys - g,
        omega_y2: xys - xs,
        omega_xys: xys - g,
    }
}

/// Amplitude decay rates (eV) of the four cascade transitions. Rates scale
/// with |d|², anchored on the g ↔ y_S transition.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DecayRates {
    pub gamma_g_xs: f64,
    pub gamma_g_ys: f64,
    pub gamma_xs_xys: f64,
    pub gamma_ys_xys: f64,
}

impl DecayRates {
    /// Decay rate of |xy_S⟩.
    pub fn total_upper(&self) -> f64 {
        self.gamma_xs_xys + self.gamma_ys_xys
    }

    pub fn max(&self) -> f64 {
        self.as_array().into_iter().fold(0.0, f64::max)
    }

    /// Narrowest feature of the two-photon amplitude: the two lower
    /// linewidths and the |xy_S⟩ width.
    pub fn narrowest(&self) -> f64 {
        self.gamma_g_xs.min(self.gamma_g_ys).min(self.total_upper())
    }

    pub fn as_array(&self) -> [f64; 4] {
        [
            self.gamma_g_xs,
            self.gamma_g_ys,
            self.gamma_xs_xys,
            self.gamma_ys_xys,
        ]
    }
}

pub fn decay_rates(dipoles: &[DipoleElement], gamma_ref: f64) -> Result<DecayRates> {
    let sq = |a, b| Vector3::from(dipole_between(dipoles, a, b)).norm_squared();
    let anchor = sq(StateLabel::G, StateLabel::YS);
    if anchor == 0.0 {
        return Err(Error::domain(
            "the g <-> y_S transition is dark, so gamma_ref has no anchor (d_y = 0?)",
        ));
    }
    let k = gamma_ref / anchor;
    Ok(DecayRates {
        gamma_g_xs: k * sq(StateLabel::G, StateLabel::XS),
        gamma_g_ys: gamma_ref,
        gamma_xs_xys: k * sq(StateLabel::XS, StateLabel::XYS),
        gamma_ys_xys: k * sq(StateLabel::YS, StateLabel::XYS),
    })
}

/// Everything downstream code needs about one defect pair.
#[derive(Debug, Clone)]
pub struct CoupledSystem {
    pub config: DefectPairConfig,
    pub couplings: CouplingEnergies,
    pub hamiltonian: Matrix9,
    pub eigen: Eigensystem,
    pub dipoles: Vec<DipoleElement>,
    pub cascade: CascadeFrequencies,
    pub rates: DecayRates,
}

impl CoupledSystem {
    pub fn new(config: &DefectPairConfig) -> Result<Self> {
        let hamiltonian = build_hamiltonian(config)?;
        let couplings = dipole_coupling(config)?;
        let eigen = eigensystem(&hamiltonian)?;
        let dipoles = transition_dipoles(&eigen, config.d_x, config.d_y);
        let cascade = cascade_frequencies(&eigen);
        let rates = decay_rates(&dipoles, config.gamma_ref)?;
        Ok(CoupledSystem {
            config: config.clone(),
            couplings,
            hamiltonian,
            eigen,
            dipoles,
            cascade,
            rates,
        })
    }

    pub fn energy(&self, s: StateLabel) -> f64 {
        self.eigen.energy(s)
    }

    /// |d| (e·Å) of the transition between two eigenstates.
    pub fn dipole_magnitude(&self, a: StateLabel, b: StateLabel) -> f64 {
        Vector3::from(dipole_between(&self.dipoles, a, b)).norm()
    }
}
