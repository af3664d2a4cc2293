//! Linear and quadratic regression meta-models of `y` on `X`.

use nalgebra::{DMatrix, DVector};

use super::Sample;

pub(super) const ENTRIES: [(&str, &str); 9] = [
    ("lin_simple.adj_r2", "adjusted R^2 of y ~ 1 + x"),
    ("lin_simple.intercept", "intercept of y ~ 1 + x"),
    ("lin_simple.coef.min", "smallest absolute slope of y ~ 1 + x"),
    ("lin_simple.coef.max", "largest absolute slope of y ~ 1 + x"),
    ("lin_simple.coef.max_by_min", "ratio of largest to smallest absolute slope"),
    ("lin_w_interact.adj_r2", "adjusted R^2 of y ~ 1 + x + pairwise products x_i x_j"),
    ("quad_simple.adj_r2", "adjusted R^2 of y ~ 1 + x + x^2"),
    ("quad_simple.cond", "ratio of largest to smallest absolute quadratic coefficient"),
    ("quad_w_interact.adj_r2", "adjusted R^2 of the full quadratic model with all pairwise products"),
];

#[derive(Clone, Copy)]
enum Terms {
    Linear,
    LinearInteractions,
    Quadratic,
    Full,
}

fn model_matrix(s: &Sample, terms: Terms) -> DMatrix<f64> {
    let d = s.d;
    let mut cols: Vec<Vec<f64>> = Vec::new();
    cols.push(vec![1.0; s.n]);
    for j in 0..d {
        cols.push((0..s.n).map(|i| s.row(i)[j]).collect());
    }
    if matches!(terms, Terms::Quadratic | Terms::Full) {
        for j in 0..d {
            cols.push((0..s.n).map(|i| s.row(i)[j].powi(2)).collect());
        }
    }
    if matches!(terms, Terms::LinearInteractions | Terms::Full) {
        for a in 0..d {
            for b in a + 1..d {
                cols.push((0..s.n).map(|i| s.row(i)[a] * s.row(i)[b]).collect());
            }
        }
    }
    DMatrix::from_fn(s.n, cols.len(), |i, j| cols[j][i])
}

pub(super) struct Fit {
    pub coef: Vec<f64>,
    pub adj_r2: Option<f64>,
}

fn fit(s: &Sample, terms: Terms) -> Option<Fit> {
    let a = model_matrix(s, terms);
    let (n, p) = a.shape();
    let y = DVector::from_column_slice(&s.y);
    let mean = y.mean();
    let sst: f64 = y.iter().map(|v| (v - mean).powi(2)).sum();
    if n <= p || !(sst > f64::EPSILON * mean * mean * n as f64) {
        return None;
    }
    let coef = solve_least_squares(&a, &y)?;
    let resid = &y - &a * &coef;
    let sse = resid.norm_squared();
    let r2 = 1.0 - sse / sst;
    let adj = 1.0 - (1.0 - r2) * (n as f64 - 1.0) / (n as f64 - p as f64);
    Some(Fit {
        coef: coef.iter().cloned().collect(),
        adj_r2: Some(adj),
    })
}

/// Householder QR; SVD with a rank cutoff when R is near singular.
fn solve_least_squares(a: &DMatrix<f64>, y: &DVector<f64>) -> Option<DVector<f64>> {
    let (n, p) = a.shape();
    let qr = a.clone().qr();
    let r = qr.r();
    let diag: Vec<f64> = (0..p).map(|i| r[(i, i)].abs()).collect();
    let largest = diag.iter().cloned().fold(0.0, f64::max);
    if diag.iter().all(|&v| v > largest * 1e-10) {
        let qty = qr.q().transpose() * y;
        return r.solve_upper_triangular(&qty);
    }
    let svd = a.clone().svd(true, true);
    let tol = svd.singular_values.max() * f64::EPSILON * n.max(p) as f64;
    svd.solve(y, tol).ok()
}

fn ratio(max: f64, min: f64) -> Option<f64> {
    if min > 0.0 {
        Some(max / min)
    } else {
        None
    }
}

pub(super) fn compute(s: &Sample) -> Vec<Option<f64>> {
    let d = s.d;
    let mut out = Vec::with_capacity(ENTRIES.len());
    match fit(s, Terms::Linear) {
        Some(f) => {
            let slopes: Vec<f64> = f.coef[1..=d].iter().map(|c| c.abs()).collect();
            let min = slopes.iter().cloned().fold(f64::INFINITY, f64::min);
            let max = slopes.iter().cloned().fold(0.0, f64::max);
            out.extend([f.adj_r2, Some(f.coef[0]), Some(min), Some(max), ratio(max, min)]);
        }
        None => out.extend([None; 5]),
    }
    out.push(fit(s, Terms::LinearInteractions).and_then(|f| f.adj_r2));
    match fit(s, Terms::Quadratic) {
        Some(f) => {
            let quad: Vec<f64> = f.coef[d + 1..=2 * d].iter().map(|c| c.abs()).collect();
            let min = quad.iter().cloned().fold(f64::INFINITY, f64::min);
            let max = quad.iter().cloned().fold(0.0, f64::max);
            out.extend([f.adj_r2, ratio(max, min)]);
        }
        None => out.extend([None; 2]),
    }
    out.push(fit(s, Terms::Full).and_then(|f| f.adj_r2));
    out
}

