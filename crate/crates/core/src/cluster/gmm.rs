//! Gaussian mixtures fitted by expectation maximisation.
//!
//! Covariance eigenvalues are floored at [`COVARIANCE_FLOOR`] inside the
//! M-step. For diagonal models this is a floor on each variance. The floor is
//! the exact maximiser over the constrained set, so the log-likelihood stays
//! monotone and no component turns singular.

use std::str::FromStr;

use nalgebra::{DMatrix, SymmetricEigen};
use serde::{Deserialize, Serialize};

use super::kmeans::kmeans;
use crate::doe::mix_seed;
use crate::error::{Error, Result};
use crate::matrix::{par_map, Matrix};

pub const COVARIANCE_FLOOR: f64 = 1e-6;
pub const TOLERANCE: f64 = 1e-4;
pub const MAX_ITER: usize = 200;
pub const MAX_RESTARTS: usize = 3;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum CovarianceType {
    Full,
    Tied,
    Diag,
}

impl CovarianceType {
    pub const ALL: [CovarianceType; 3] = [CovarianceType::Full, CovarianceType::Tied, CovarianceType::Diag];

    pub fn name(self) -> &'static str {
        match self {
            CovarianceType::Full => "full",
            CovarianceType::Tied => "tied",
            CovarianceType::Diag => "diag",
        }
    }
}

impl FromStr for CovarianceType {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        CovarianceType::ALL
            .into_iter()
            .find(|c| c.name() == s)
            .ok_or_else(|| Error::Config(format!("unknown covariance type '{s}'")))
    }
}

/// Whitening `z = diag(scale) * basis^T * (x - mean)`; `basis = None` means identity.
#[derive(Debug, Clone)]
struct Component {
    mean: Vec<f64>,
    basis: Option<DMatrix<f64>>,
    scale: Vec<f64>,
    log_det: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct GmmFit {
    pub labels: Vec<usize>,
    pub weights: Vec<f64>,
    pub means: Matrix,
    /// Mean per-sample log-likelihood after each E-step.
    pub log_likelihood: Vec<f64>,
    pub converged: bool,
    pub restarts: usize,
}

fn spectral(cov: DMatrix<f64>) -> (DMatrix<f64>, Vec<f64>, f64) {
    let eig = SymmetricEigen::new(cov);
    let vals: Vec<f64> = eig.eigenvalues.iter().map(|v| v.max(COVARIANCE_FLOOR)).collect();
    let log_det = vals.iter().map(|v| v.ln()).sum();
    (eig.eigenvectors, vals.iter().map(|v| 1.0 / v.sqrt()).collect(), log_det)
}

fn m_step(x: &Matrix, resp: &[Vec<f64>], k: usize, cov: CovarianceType) -> (Vec<f64>, Vec<Component>) {
    let (n, d) = (x.nrows(), x.ncols());
    let tiny = 10.0 * f64::EPSILON;
    let nk: Vec<f64> = (0..k).map(|c| resp.iter().map(|r| r[c]).sum::<f64>() + tiny).collect();
    let weights: Vec<f64> = nk.iter().map(|v| v / n as f64).collect();
    let means: Vec<Vec<f64>> = (0..k)
        .map(|c| {
            let mut m = vec![0.0; d];
            for (i, r) in resp.iter().enumerate() {
                for (mj, xj) in m.iter_mut().zip(x.row(i)) {
                    *mj += r[c] * xj;
                }
            }
            m.iter().map(|v| v / nk[c]).collect()
        })
        .collect();
    let scatter = |c: usize| {
        let mut s = DMatrix::zeros(d, d);
        for (i, r) in resp.iter().enumerate() {
            let w = r[c];
            if w == 0.0 {
                continue;
            }
            let row = x.row(i);
            for a in 0..d {
                let da = row[a] - means[c][a];
                for b in a..d {
                    s[(a, b)] += w * da * (row[b] - means[c][b]);
                }
            }
        }
        for a in 0..d {
            for b in 0..a {
                s[(a, b)] = s[(b, a)];
            }
        }
        s
    };
    let comps = match cov {
        CovarianceType::Diag => (0..k)
            .map(|c| {
                let vars: Vec<f64> = (0..d)
                    .map(|a| {
                        let v: f64 = resp
                            .iter()
                            .enumerate()
                            .map(|(i, r)| r[c] * (x.get(i, a) - means[c][a]).powi(2))
                            .sum();
                        (v / nk[c]).max(COVARIANCE_FLOOR)
                    })
                    .collect();
                Component {
                    mean: means[c].clone(),
                    basis: None,
                    log_det: vars.iter().map(|v| v.ln()).sum(),
                    scale: vars.iter().map(|v| 1.0 / v.sqrt()).collect(),
                }
            })
            .collect(),
        CovarianceType::Full => (0..k)
            .map(|c| {
                let (basis, scale, log_det) = spectral(scatter(c) / nk[c]);
                Component {
                    mean: means[c].clone(),
                    basis: Some(basis),
                    scale,
                    log_det,
                }
            })
            .collect(),
        CovarianceType::Tied => {
            let mut pooled = DMatrix::zeros(d, d);
            for c in 0..k {
                pooled += scatter(c);
            }
            let (basis, scale, log_det) = spectral(pooled / n as f64);
            (0..k)
                .map(|c| Component {
                    mean: means[c].clone(),
                    basis: Some(basis.clone()),
                    scale: scale.clone(),
                    log_det,
                })
                .collect()
        }
    };
    (weights, comps)
}

fn log_density(row: &[f64], comp: &Component) -> f64 {
    let d = row.len();
    let diff: Vec<f64> = row.iter().zip(&comp.mean).map(|(a, b)| a - b).collect();
    let mahal: f64 = match &comp.basis {
        None => diff.iter().zip(&comp.scale).map(|(v, s)| (v * s).powi(2)).sum(),
        Some(basis) => (0..d)
            .map(|j| {
                let proj: f64 = basis.column(j).iter().zip(&diff).map(|(b, v)| b * v).sum();
                (proj * comp.scale[j]).powi(2)
            })
            .sum(),
    };
    -0.5 * (d as f64 * (2.0 * std::f64::consts::PI).ln() + comp.log_det + mahal)
}

fn e_step(x: &Matrix, weights: &[f64], comps: &[Component]) -> (f64, Vec<Vec<f64>>) {
    let log_w: Vec<f64> = weights.iter().map(|w| w.ln()).collect();
    let rows = par_map(x.nrows(), |i| {
        let lp: Vec<f64> = comps
            .iter()
            .zip(&log_w)
            .map(|(c, lw)| lw + log_density(x.row(i), c))
            .collect();
        let m = lp.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
        let lse = m + lp.iter().map(|v| (v - m).exp()).sum::<f64>().ln();
        (lse, lp.iter().map(|v| (v - lse).exp()).collect::<Vec<f64>>())
    });
    let ll = rows.iter().map(|r| r.0).sum::<f64>() / x.nrows() as f64;
    (ll, rows.into_iter().map(|r| r.1).collect())
}

fn attempt(x: &Matrix, k: usize, cov: CovarianceType, seed: u64) -> Result<GmmFit> {
    let init = kmeans(x, k, 1, seed)?;
    let mut resp: Vec<Vec<f64>> = init
        .labels
        .iter()
        .map(|&l| (0..k).map(|c| if c == l { 1.0 } else { 0.0 }).collect())
        .collect();
    let mut trace = Vec::new();
    let mut converged = false;
    let mut prev = f64::NEG_INFINITY;
    let (mut weights, mut comps) = m_step(x, &resp, k, cov);
    for _ in 0..MAX_ITER {
        let (ll, r) = e_step(x, &weights, &comps);
        if !ll.is_finite() {
            return Err(Error::Numerical("non-finite log-likelihood".into()));
        }
        trace.push(ll);
        resp = r;
        if (ll - prev).abs() < TOLERANCE {
            converged = true;
            break;
        }
        prev = ll;
        (weights, comps) = m_step(x, &resp, k, cov);
    }
    let labels = resp
        .iter()
        .map(|r| {
            let mut best = 0;
            for c in 1..k {
                if r[c] > r[best] {
                    best = c;
                }
            }
            best
        })
        .collect();
    let mut means = Matrix::zeros(k, x.ncols());
    for (c, comp) in comps.iter().enumerate() {
        means.row_mut(c).copy_from_slice(&comp.mean);
    }
    Ok(GmmFit {
        labels,
        weights,
        means,
        log_likelihood: trace,
        converged,
        restarts: 0,
    })
}

/// EM from a k-means start; numerical failures retry with derived seeds.
pub fn gmm(x: &Matrix, k: usize, cov: CovarianceType, seed: u64) -> Result<GmmFit> {
    if k == 0 || k > x.nrows() {
        return Err(Error::domain(format!(
            "k = {k} is outside 1..={} for a mixture model",
            x.nrows()
        )));
    }
    let mut last_err = None;
    for r in 0..=MAX_RESTARTS {
        let s = if r == 0 { seed } else { mix_seed(&[seed, 0x6A11, r as u64]) };
        match attempt(x, k, cov, s) {
            Ok(mut fit) => {
                fit.restarts = r;
                return Ok(fit);
            }
            Err(Error::Numerical(msg)) => last_err = Some(msg),
            Err(e) => return Err(e),
        }
    }
    Err(Error::Numerical(format!(
        "mixture fit failed after {MAX_RESTARTS} restarts: {}",
        last_err.unwrap_or_default()
    )))
}
