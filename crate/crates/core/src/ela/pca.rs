//! Principal component statistics of `X` and of `[X | y]`.

use nalgebra::{DMatrix, SymmetricEigen};

use super::Sample;

pub(super) const ENTRIES: [(&str, &str); 8] = [
    ("expl_var.cov_x", "share of principal components of cov(X) needed for 90% of the variance"),
    ("expl_var.cor_x", "share of principal components of cor(X) needed for 90% of the variance"),
    ("expl_var.cov_init", "share of principal components of cov([X|y]) needed for 90% of the variance"),
    ("expl_var.cor_init", "share of principal components of cor([X|y]) needed for 90% of the variance"),
    ("expl_var_PC1.cov_x", "variance share of the first principal component of cov(X)"),
    ("expl_var_PC1.cor_x", "variance share of the first principal component of cor(X)"),
    ("expl_var_PC1.cov_init", "variance share of the first principal component of cov([X|y])"),
    ("expl_var_PC1.cor_init", "variance share of the first principal component of cor([X|y])"),
];

const TARGET: f64 = 0.9;

fn covariance(data: &DMatrix<f64>, correlate: bool) -> Option<DMatrix<f64>> {
    let (n, p) = data.shape();
    let means: Vec<f64> = (0..p).map(|j| data.column(j).mean()).collect();
    let centred = DMatrix::from_fn(n, p, |i, j| data[(i, j)] - means[j]);
    let mut cov = centred.transpose() * &centred / (n as f64 - 1.0);
    if correlate {
        let sds: Vec<f64> = (0..p).map(|j| cov[(j, j)].sqrt()).collect();
        if sds.iter().any(|s| !(*s > 0.0)) {
            return None;
        }
        for a in 0..p {
            for b in 0..p {
                cov[(a, b)] /= sds[a] * sds[b];
            }
        }
    }
    Some(cov)
}

/// Eigenvalue shares of a symmetric positive semi-definite matrix, descending.
pub(crate) fn explained_variance_ratios(cov: &DMatrix<f64>) -> Option<Vec<f64>> {
    let eig = SymmetricEigen::new(cov.clone());
    let mut values: Vec<f64> = eig.eigenvalues.iter().map(|v| v.max(0.0)).collect();
    values.sort_by(|a, b| b.total_cmp(a));
    let total: f64 = values.iter().sum();
    if !(total > 0.0) || !total.is_finite() {
        return None;
    }
    Some(values.into_iter().map(|v| v / total).collect())
}

fn stats(data: &DMatrix<f64>, correlate: bool) -> (Option<f64>, Option<f64>) {
    let Some(ratios) = covariance(data, correlate).and_then(|c| explained_variance_ratios(&c)) else {
        return (None, None);
    };
    let p = ratios.len();
    let mut acc = 0.0;
    let mut needed = p;
    for (k, r) in ratios.iter().enumerate() {
        acc += r;
        if acc >= TARGET {
            needed = k + 1;
            break;
        }
    }
    (Some(needed as f64 / p as f64), Some(ratios[0]))
}

pub(super) fn compute(s: &Sample) -> Vec<Option<f64>> {
    let x = DMatrix::from_fn(s.n, s.d, |i, j| s.row(i)[j]);
    let init = DMatrix::from_fn(s.n, s.d + 1, |i, j| if j < s.d { s.row(i)[j] } else { s.y[i] });
    let (cov_x, pc1_cov_x) = stats(&x, false);
    let (cor_x, pc1_cor_x) = stats(&x, true);
    let (cov_init, pc1_cov_init) = stats(&init, false);
    let (cor_init, pc1_cor_init) = stats(&init, true);
    vec![cov_x, cor_x, cov_init, cor_init, pc1_cov_x, pc1_cor_x, pc1_cov_init, pc1_cor_init]
}
