#![allow(dead_code)]

use landmap::matrix::Matrix;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Two discs of radius 1, 50 points each, centres 20 apart; returns points and generator labels.
pub fn two_blobs(seed: u64) -> (Matrix, Vec<usize>) {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut rows = Vec::new();
    let mut truth = Vec::new();
    for (label, cx) in [(0usize, 0.0), (1, 20.0)] {
        for _ in 0..50 {
            let r = rng.random::<f64>().sqrt();
            let t = rng.random::<f64>() * std::f64::consts::TAU;
            rows.push(vec![cx + r * t.cos(), r * t.sin()]);
            truth.push(label);
        }
    }
    (Matrix::from_rows(&rows).unwrap(), truth)
}

/// Textbook silhouette, quadratic and allocation-heavy on purpose.
pub fn naive_silhouette(x: &Matrix, labels: &[usize]) -> f64 {
    let n = x.nrows();
    let dist = |i: usize, j: usize| -> f64 {
        x.row(i).iter().zip(x.row(j)).map(|(a, b)| (a - b).powi(2)).sum::<f64>().sqrt()
    };
    let mut clusters: Vec<usize> = labels.to_vec();
    clusters.sort_unstable();
    clusters.dedup();
    let mut total = 0.0;
    for i in 0..n {
        let mean_to = |c: usize| -> (f64, usize) {
            let members: Vec<usize> = (0..n).filter(|&j| j != i && labels[j] == c).collect();
            let s: f64 = members.iter().map(|&j| dist(i, j)).sum();
            (s / members.len().max(1) as f64, members.len())
        };
        let (a, own) = mean_to(labels[i]);
        if own == 0 {
            continue;
        }
        let b = clusters
            .iter()
            .filter(|&&c| c != labels[i])
            .map(|&c| mean_to(c).0)
            .fold(f64::INFINITY, f64::min);
        total += (b - a) / a.max(b);
    }
    total / n as f64
}
