//! Schmidt decomposition of the two-photon amplitude and the entanglement
//! measures derived from its coefficients.

use faer::Mat;
use log::warn;
use serde::{Deserialize, Serialize};

use crate::amplitude::AmplitudeGrid;
use crate::{Error, Result, C64};

/// Number of Schmidt coefficients carried into reports.
pub const LAMBDA_HEAD: usize = 8;

/// Schmidt coefficients (descending) and, optionally, the mode functions.
#[derive(Debug, Clone)]
pub struct SchmidtSpectrum {
    pub lambdas: Vec<f64>,
    /// Column n is ψ_n over the x axis.
    pub modes_x: Option<Mat<C64>>,
    /// Column n is φ_n over the y axis, so c ≈ Σ λ_n ψ_n φ_nᵀ.
    pub modes_y: Option<Mat<C64>>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EntanglementMetrics {
    #[serde(rename = "S_bits")]
    pub entropy_bits: f64,
    pub eta: f64,
    pub fidelity: f64,
    pub lambdas: Vec<f64>,
}

fn normalized_copy(amps: &AmplitudeGrid) -> Result<Mat<C64>> {
    let n2 = amps.norm_sqr();
    if (n2 - 1.0).abs() > 1e-12 {
        warn!("amplitude has norm² {n2:.6e}; normalizing before the Schmidt decomposition");
        let mut a = amps.clone();
        a.normalize()?;
        return Ok(a.c);
    }
    Ok(amps.c.clone())
}

/// Thin SVD of c_jk with modes.
pub fn schmidt_decompose(amps: &AmplitudeGrid) -> Result<SchmidtSpectrum> {
    let c = normalized_copy(amps)?;
    let svd = c
        .thin_svd()
        .map_err(|e| Error::Linalg(format!("SVD did not converge: {e:?}")))?;
    let s = svd.S().column_vector();
    let u = svd.U();
    let v = svd.V();
    let mut order: Vec<usize> = (0..s.nrows()).collect();
    order.sort_by(|&a, &b| s[b].re.total_cmp(&s[a].re));
    let lambdas = order.iter().map(|&i| s[i].re).collect();
    // c = U S Vᴴ, so φ_n = conj(V[:, n]).
    let modes_x = Mat::from_fn(u.nrows(), order.len(), |j, n| u[(j, order[n])]);
    let modes_y = Mat::from_fn(v.nrows(), order.len(), |k, n| v[(k, order[n])].conj());
    Ok(SchmidtSpectrum {
        lambdas,
        modes_x: Some(modes_x),
        modes_y: Some(modes_y),
    })
}

/// Schmidt coefficients only; cheaper than [`schmidt_decompose`].
pub fn schmidt_coefficients(amps: &AmplitudeGrid) -> Result<SchmidtSpectrum> {
    let c = normalized_copy(amps)?;
    let mut lambdas = c
        .singular_values()
        .map_err(|e| Error::Linalg(format!("SVD did not converge: {e:?}")))?;
    lambdas.sort_by(|a, b| b.total_cmp(a));
    Ok(SchmidtSpectrum {
        lambdas,
        modes_x: None,
        modes_y: None,
    })
}

/// S = −Σ λ² log₂ λ², with 0·log 0 = 0.
pub fn entropy(spec: &SchmidtSpectrum) -> f64 {
    entropy_of(&spec.lambdas)
}

pub fn entropy_of(lambdas: &[f64]) -> f64 {
    let s: f64 = lambdas
        .iter()
        .map(|l| l * l)
        .filter(|&p| p > 0.0)
        .map(|p| -p * p.log2())
        .sum();
    s.max(0.0)
}

/// (η, F) from the two leading coefficients; missing ones count as zero.
pub fn bell_metrics(spec: &SchmidtSpectrum) -> (f64, f64) {
    bell_metrics_of(&spec.lambdas)
}

pub fn bell_metrics_of(lambdas: &[f64]) -> (f64, f64) {
    let l0 = lambdas.first().copied().unwrap_or(0.0);
    let l1 = lambdas.get(1).copied().unwrap_or(0.0);
    let eta = l0 * l0 + l1 * l1;
    let fidelity = if eta > 0.0 {
        0.5 * (l0 + l1).powi(2) / eta
    } else {
        0.5
    };
    (eta, fidelity)
}

pub fn metrics(spec: &SchmidtSpectrum) -> EntanglementMetrics {
    let (eta, fidelity) = bell_metrics(spec);
    EntanglementMetrics {
        entropy_bits: entropy(spec),
        eta,
        fidelity,
        lambdas: spec.lambdas.iter().take(LAMBDA_HEAD).copied().collect(),
    }
}

/// Coefficients and metrics for one amplitude grid.
pub fn analyze(amps: &AmplitudeGrid) -> Result<EntanglementMetrics> {
    Ok(metrics(&schmidt_coefficients(amps)?))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::amplitude::FrequencyGrid;
    use std::f64::consts::FRAC_1_SQRT_2;

    fn grid_of(c: Mat<C64>) -> AmplitudeGrid {
        let n = c.nrows();
        AmplitudeGrid {
            grid: FrequencyGrid::new(2.0, 2.0, 1e-6, n).unwrap(),
            c,
            normalized: true,
        }
    }

    #[test]
    fn entropy_examples() {
        let h = FRAC_1_SQRT_2;
        assert_eq!(entropy_of(&[1.0, 0.0]), 0.0);
        assert!((entropy_of(&[h, h]) - 1.0).abs() < 1e-15);
        assert!((entropy_of(&[0.5; 4]) - 2.0).abs() < 1e-15);
    }

    #[test]
    fn bell_examples() {
        let h = FRAC_1_SQRT_2;
        let (e, f) = bell_metrics_of(&[h, h, 0.0]);
        assert!((e - 1.0).abs() < 1e-15 && (f - 1.0).abs() < 1e-15);
        let (e, f) = bell_metrics_of(&[1.0, 0.0]);
        assert_eq!((e, f), (1.0, 0.5));
        let (_, f) = bell_metrics_of(&[1.0]);
        assert_eq!(f, 0.5);
    }

    #[test]
    fn product_state_has_rank_one() {
        let f: Vec<f64> = (0..6).map(|i| (i as f64 + 1.0).sqrt()).collect();
        let g: Vec<f64> = (0..6).map(|i| 1.0 / (i as f64 + 2.0)).collect();
        let nf: f64 = f.iter().map(|x| x * x).sum::<f64>().sqrt();
        let ng: f64 = g.iter().map(|x| x * x).sum::<f64>().sqrt();
        let c = Mat::from_fn(6, 6, |j, k| C64::new(f[j] * g[k] / (nf * ng), 0.0));
        let s = schmidt_decompose(&grid_of(c)).unwrap();
        assert!((s.lambdas[0] - 1.0).abs() < 1e-12);
        assert!(s.lambdas[1..].iter().all(|&l| l < 1e-12));
    }

    #[test]
    fn bell_structure_and_reconstruction() {
        let h = FRAC_1_SQRT_2;
        let mut c = Mat::<C64>::zeros(4, 4);
        c[(0, 1)] = C64::new(h, 0.0);
        c[(2, 3)] = C64::new(0.0, h);
        let a = grid_of(c.clone());
        let s = schmidt_decompose(&a).unwrap();
        assert!((s.lambdas[0] - h).abs() < 1e-12 && (s.lambdas[1] - h).abs() < 1e-12);
        let (ux, vy) = (s.modes_x.unwrap(), s.modes_y.unwrap());
        for j in 0..4 {
            for k in 0..4 {
                let mut r = C64::new(0.0, 0.0);
                for n in 0..s.lambdas.len() {
                    r += s.lambdas[n] * ux[(j, n)] * vy[(k, n)];
                }
                assert!((r - c[(j, k)]).norm() < 1e-12);
            }
        }
    }

    #[test]
    fn unnormalized_input_is_normalized() {
        let mut c = Mat::<C64>::zeros(3, 3);
        c[(0, 0)] = C64::new(3.0, 0.0);
        c[(1, 1)] = C64::new(0.0, 4.0);
        let mut a = grid_of(c);
        a.normalized = false;
        let s = schmidt_coefficients(&a).unwrap();
        assert!((s.lambdas[0] - 0.8).abs() < 1e-12);
        assert!((s.lambdas[1] - 0.6).abs() < 1e-12);
    }
}
