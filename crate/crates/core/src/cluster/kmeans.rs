//! Lloyd's k-means with k-means++ seeding and best-of-restarts selection.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::doe::mix_seed;
use crate::error::{Error, Result};
use crate::matrix::{par_map, sq_euclidean, Matrix};

pub const MAX_ITER: usize = 300;

#[derive(Debug, Clone, PartialEq)]
pub struct KMeansFit {
    pub labels: Vec<usize>,
    pub centroids: Matrix,
    pub inertia: f64,
    /// Inertia reached by every restart, in restart order.
    pub restart_inertia: Vec<f64>,
    pub iterations: usize,
}

fn plus_plus(x: &Matrix, k: usize, rng: &mut ChaCha8Rng) -> Matrix {
    let n = x.nrows();
    let mut chosen = vec![false; n];
    let mut centroids = Matrix::zeros(k, x.ncols());
    let first = rng.random_range(0..n);
    chosen[first] = true;
    centroids.row_mut(0).copy_from_slice(x.row(first));
    let mut d2: Vec<f64> = (0..n).map(|i| sq_euclidean(x.row(i), x.row(first))).collect();
    for c in 1..k {
        let total: f64 = d2.iter().sum();
        let pick = if total > 0.0 {
            let target = rng.random::<f64>() * total;
            let mut acc = 0.0;
            let mut pick = None;
            for (i, &w) in d2.iter().enumerate() {
                if w > 0.0 {
                    acc += w;
                    pick = Some(i);
                    if acc > target {
                        break;
                    }
                }
            }
            pick.expect("positive total weight")
        } else {
            // every point coincides with a centre; take an unused row
            let free: Vec<usize> = (0..n).filter(|&i| !chosen[i]).collect();
            free[rng.random_range(0..free.len())]
        };
        chosen[pick] = true;
        centroids.row_mut(c).copy_from_slice(x.row(pick));
        for (i, w) in d2.iter_mut().enumerate() {
            *w = w.min(sq_euclidean(x.row(i), x.row(pick)));
        }
    }
    centroids
}

fn nearest(row: &[f64], centroids: &Matrix) -> (usize, f64) {
    let mut best = (0, f64::INFINITY);
    for c in 0..centroids.nrows() {
        let d = sq_euclidean(row, centroids.row(c));
        if d < best.1 {
            best = (c, d);
        }
    }
    best
}

fn assign(x: &Matrix, centroids: &Matrix) -> Vec<(usize, f64)> {
    par_map(x.nrows(), |i| nearest(x.row(i), centroids))
}

fn update(x: &Matrix, labels: &[(usize, f64)], k: usize) -> Matrix {
    let d = x.ncols();
    let mut sums = Matrix::zeros(k, d);
    let mut counts = vec![0usize; k];
    for (i, &(l, _)) in labels.iter().enumerate() {
        counts[l] += 1;
        for (s, v) in sums.row_mut(l).iter_mut().zip(x.row(i)) {
            *s += v;
        }
    }
    // empty clusters take the points farthest from their centres
    let mut far: Vec<usize> = (0..x.nrows()).collect();
    far.sort_by(|&a, &b| labels[b].1.total_cmp(&labels[a].1).then(a.cmp(&b)));
    let mut donors = far.into_iter();
    for c in 0..k {
        if counts[c] == 0 {
            for i in donors.by_ref() {
                let from = labels[i].0;
                if counts[from] > 1 {
                    counts[from] -= 1;
                    for (s, v) in sums.row_mut(from).iter_mut().zip(x.row(i)) {
                        *s -= v;
                    }
                    sums.row_mut(c).copy_from_slice(x.row(i));
                    counts[c] = 1;
                    break;
                }
            }
        }
    }
    for c in 0..k {
        let m = counts[c].max(1) as f64;
        for s in sums.row_mut(c) {
            *s /= m;
        }
    }
    sums
}

fn lloyd(x: &Matrix, mut centroids: Matrix) -> (Vec<usize>, Matrix, f64, usize) {
    let k = centroids.nrows();
    let mut labels = assign(x, &centroids);
    let mut iterations = 0;
    for it in 0..MAX_ITER {
        iterations = it + 1;
        centroids = update(x, &labels, k);
        let next = assign(x, &centroids);
        let stable = next.iter().zip(&labels).all(|(a, b)| a.0 == b.0);
        labels = next;
        if stable {
            break;
        }
    }
    let inertia = labels.iter().map(|l| l.1).sum();
    (labels.into_iter().map(|l| l.0).collect(), centroids, inertia, iterations)
}

/// Best of `n_init` k-means++ restarts by inertia; restart `r` is seeded from `(seed, r)`.
pub fn kmeans(x: &Matrix, k: usize, n_init: usize, seed: u64) -> Result<KMeansFit> {
    let n = x.nrows();
    if k == 0 || k > n {
        return Err(Error::domain(format!("k = {k} is outside 1..={n} for k-means")));
    }
    if n_init == 0 {
        return Err(Error::domain("k-means needs at least one restart"));
    }
    let mut best: Option<KMeansFit> = None;
    let mut restart_inertia = Vec::with_capacity(n_init);
    for r in 0..n_init {
        let mut rng = ChaCha8Rng::seed_from_u64(mix_seed(&[seed, r as u64]));
        let (labels, centroids, inertia, iterations) = lloyd(x, plus_plus(x, k, &mut rng));
        restart_inertia.push(inertia);
        if best.as_ref().is_none_or(|b| inertia < b.inertia) {
            best = Some(KMeansFit {
                labels,
                centroids,
                inertia,
                restart_inertia: Vec::new(),
                iterations,
            });
        }
    }
    let mut best = best.expect("at least one restart");
    best.restart_inertia = restart_inertia;
    Ok(best)
}
