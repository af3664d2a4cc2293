//! Clustering quality measures: silhouette, homogeneity/completeness/V-measure,
//! cosine similarity and the adjusted Rand index.

use std::collections::BTreeMap;

use rand::seq::index::sample;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::matrix::{euclidean, par_map, Matrix};

/// Condensed upper-triangle Euclidean distances in double precision.
#[derive(Debug, Clone)]
pub struct PairwiseDistances {
    n: usize,
    values: Vec<f64>,
}

impl PairwiseDistances {
    pub fn new(x: &Matrix) -> Self {
        let n = x.nrows();
        let rows = par_map(n, |i| {
            ((i + 1)..n)
                .map(|j| euclidean(x.row(i), x.row(j)))
                .collect::<Vec<f64>>()
        });
        PairwiseDistances {
            n,
            values: rows.concat(),
        }
    }

    pub fn len(&self) -> usize {
        self.n
    }

    pub fn is_empty(&self) -> bool {
        self.n == 0
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        if i == j {
            return 0.0;
        }
        let (a, b) = if i < j { (i, j) } else { (j, i) };
        self.values[a * self.n - a * (a + 1) / 2 + (b - a - 1)]
    }
}

/// Mean silhouette of `labels` over `x`.
///
/// With `sample_cap = Some(m)` and more than `m` rows, the score is that of a
/// seeded uniform subsample of `m` rows, computed within the subsample.
pub fn silhouette(x: &Matrix, labels: &[usize], sample_cap: Option<usize>, seed: u64) -> Result<f64> {
    if labels.len() != x.nrows() {
        return Err(Error::domain(format!(
            "{} labels for {} rows",
            labels.len(),
            x.nrows()
        )));
    }
    let idx = subsample(x.nrows(), sample_cap, seed);
    match idx {
        Some(idx) => {
            let sub = x.select_rows(&idx);
            let sub_labels: Vec<usize> = idx.iter().map(|&i| labels[i]).collect();
            silhouette_with(&PairwiseDistances::new(&sub), &sub_labels)
        }
        None => silhouette_with(&PairwiseDistances::new(x), labels),
    }
}

pub(crate) fn subsample(n: usize, cap: Option<usize>, seed: u64) -> Option<Vec<usize>> {
    let cap = cap?;
    if n <= cap {
        return None;
    }
    let mut idx = sample(&mut ChaCha8Rng::seed_from_u64(seed), n, cap).into_vec();
    idx.sort_unstable();
    Some(idx)
}

/// Silhouette over precomputed distances; singleton clusters score 0.
pub fn silhouette_with(dist: &PairwiseDistances, labels: &[usize]) -> Result<f64> {
    let scores = silhouette_samples(dist, labels)?;
    Ok(scores.iter().sum::<f64>() / scores.len() as f64)
}

/// Per-point silhouette values.
pub fn silhouette_samples(dist: &PairwiseDistances, labels: &[usize]) -> Result<Vec<f64>> {
    let n = dist.len();
    if labels.len() != n {
        return Err(Error::domain("label count differs from the distance matrix size"));
    }
    let (dense, k) = densify(labels);
    if k < 2 {
        return Err(Error::domain("silhouette needs at least two distinct labels"));
    }
    let mut sizes = vec![0usize; k];
    for &l in &dense {
        sizes[l] += 1;
    }
    let scores = par_map(n, |i| {
        let own = dense[i];
        if sizes[own] == 1 {
            return 0.0;
        }
        let mut sums = vec![0.0; k];
        for j in 0..n {
            if j != i {
                sums[dense[j]] += dist.get(i, j);
            }
        }
        let a = sums[own] / (sizes[own] - 1) as f64;
        let b = (0..k)
            .filter(|&c| c != own)
            .map(|c| sums[c] / sizes[c] as f64)
            .fold(f64::INFINITY, f64::min);
        let m = a.max(b);
        if m > 0.0 {
            (b - a) / m
        } else {
            0.0
        }
    });
    Ok(scores)
}

/// Maps arbitrary labels to `0..k` in order of first appearance.
pub(crate) fn densify(labels: &[usize]) -> (Vec<usize>, usize) {
    let mut map = BTreeMap::new();
    let mut out = Vec::with_capacity(labels.len());
    for &l in labels {
        let next = map.len();
        out.push(*map.entry(l).or_insert(next));
    }
    (out, map.len())
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct HcvScores {
    pub homogeneity: f64,
    pub completeness: f64,
    pub v_measure: f64,
}

fn entropy(counts: impl Iterator<Item = usize>, n: f64) -> f64 {
    counts
        .filter(|&c| c > 0)
        .map(|c| {
            let p = c as f64 / n;
            -p * p.ln()
        })
        .sum()
}

/// Homogeneity, completeness and V-measure of `pred` against `truth`.
pub fn hcv(truth: &[usize], pred: &[usize]) -> Result<HcvScores> {
    if truth.len() != pred.len() {
        return Err(Error::domain(format!(
            "label vectors differ in length ({} vs {})",
            truth.len(),
            pred.len()
        )));
    }
    if truth.is_empty() {
        return Err(Error::domain("hcv needs at least one label"));
    }
    let n = truth.len() as f64;
    let mut joint: BTreeMap<(usize, usize), usize> = BTreeMap::new();
    let mut t: BTreeMap<usize, usize> = BTreeMap::new();
    let mut p: BTreeMap<usize, usize> = BTreeMap::new();
    for (&a, &b) in truth.iter().zip(pred) {
        *joint.entry((a, b)).or_default() += 1;
        *t.entry(a).or_default() += 1;
        *p.entry(b).or_default() += 1;
    }
    let h_true = entropy(t.values().copied(), n);
    let h_pred = entropy(p.values().copied(), n);
    let h_joint = entropy(joint.values().copied(), n);
    // H(T|P) = H(T,P) - H(P)
    let h_true_given_pred = (h_joint - h_pred).max(0.0);
    let h_pred_given_true = (h_joint - h_true).max(0.0);
    let homogeneity = if h_true == 0.0 {
        1.0
    } else {
        (1.0 - h_true_given_pred / h_true).clamp(0.0, 1.0)
    };
    let completeness = if h_pred == 0.0 {
        1.0
    } else {
        (1.0 - h_pred_given_true / h_pred).clamp(0.0, 1.0)
    };
    let v_measure = if homogeneity + completeness > 0.0 {
        2.0 * homogeneity * completeness / (homogeneity + completeness)
    } else {
        0.0
    };
    Ok(HcvScores {
        homogeneity,
        completeness,
        v_measure,
    })
}

/// Cosine similarity; 0 when either vector has zero norm.
pub fn cosine(u: &[f64], v: &[f64]) -> Result<f64> {
    if u.len() != v.len() {
        return Err(Error::domain(format!(
            "vectors differ in length ({} vs {})",
            u.len(),
            v.len()
        )));
    }
    let dot: f64 = u.iter().zip(v).map(|(a, b)| a * b).sum();
    let nu = u.iter().map(|a| a * a).sum::<f64>().sqrt();
    let nv = v.iter().map(|a| a * a).sum::<f64>().sqrt();
    if nu == 0.0 || nv == 0.0 {
        log::debug!("cosine of a zero vector taken as 0");
        return Ok(0.0);
    }
    Ok(dot / (nu * nv))
}

/// Adjusted Rand index between two labelings.
pub fn adjusted_rand_index(a: &[usize], b: &[usize]) -> Result<f64> {
    if a.len() != b.len() {
        return Err(Error::domain("label vectors differ in length"));
    }
    let comb2 = |c: usize| (c * c.saturating_sub(1)) as f64 / 2.0;
    let mut joint: BTreeMap<(usize, usize), usize> = BTreeMap::new();
    let mut ra: BTreeMap<usize, usize> = BTreeMap::new();
    let mut rb: BTreeMap<usize, usize> = BTreeMap::new();
    for (&x, &y) in a.iter().zip(b) {
        *joint.entry((x, y)).or_default() += 1;
        *ra.entry(x).or_default() += 1;
        *rb.entry(y).or_default() += 1;
    }
    let index: f64 = joint.values().map(|&c| comb2(c)).sum();
    let sa: f64 = ra.values().map(|&c| comb2(c)).sum();
    let sb: f64 = rb.values().map(|&c| comb2(c)).sum();
    let total = comb2(a.len());
    let expected = if total > 0.0 { sa * sb / total } else { 0.0 };
    let max = 0.5 * (sa + sb);
    if max == expected {
        return Ok(1.0);
    }
    Ok((index - expected) / (max - expected))
}
