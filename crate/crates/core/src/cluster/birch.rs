//! BIRCH: a clustering-feature tree condenses the data into subclusters,
//! whose centroids are then grouped by Ward agglomeration.

use super::hierarchy::{agglomerative, Linkage};
use crate::error::{Error, Result};
use crate::matrix::{sq_euclidean, Matrix};

pub const BRANCHING_FACTOR: usize = 50;

#[derive(Debug, Clone)]
struct Feature {
    n: f64,
    linear_sum: Vec<f64>,
    square_sum: f64,
    child: Option<usize>,
}

impl Feature {
    fn point(x: &[f64]) -> Self {
        Feature {
            n: 1.0,
            linear_sum: x.to_vec(),
            square_sum: x.iter().map(|v| v * v).sum(),
            child: None,
        }
    }

    fn centroid(&self) -> Vec<f64> {
        self.linear_sum.iter().map(|v| v / self.n).collect()
    }

    fn absorb(&mut self, other: &Feature) {
        self.n += other.n;
        for (a, b) in self.linear_sum.iter_mut().zip(&other.linear_sum) {
            *a += b;
        }
        self.square_sum += other.square_sum;
    }

    fn merged_sq_radius(&self, other: &Feature) -> f64 {
        let n = self.n + other.n;
        let c2: f64 = self
            .linear_sum
            .iter()
            .zip(&other.linear_sum)
            .map(|(a, b)| ((a + b) / n).powi(2))
            .sum();
        (self.square_sum + other.square_sum) / n - c2
    }
}

#[derive(Debug, Clone)]
struct Node {
    leaf: bool,
    entries: Vec<Feature>,
}

struct Tree {
    nodes: Vec<Node>,
    root: usize,
    threshold_sq: f64,
    branching: usize,
}

fn closest(entries: &[Feature], c: &[f64]) -> usize {
    let mut best = (0, f64::INFINITY);
    for (i, e) in entries.iter().enumerate() {
        let d = sq_euclidean(&e.centroid(), c);
        if d < best.1 {
            best = (i, d);
        }
    }
    best.0
}

fn summary(entries: &[Feature], child: usize) -> Feature {
    let mut s = entries[0].clone();
    for e in &entries[1..] {
        s.absorb(e);
    }
    s.child = Some(child);
    s
}

impl Tree {
    fn new(threshold: f64, branching: usize) -> Self {
        Tree {
            nodes: vec![Node {
                leaf: true,
                entries: Vec::new(),
            }],
            root: 0,
            threshold_sq: threshold * threshold,
            branching,
        }
    }

    fn insert(&mut self, x: &[f64]) {
        if let Some((a, b)) = self.insert_into(self.root, Feature::point(x)) {
            self.nodes.push(Node {
                leaf: false,
                entries: vec![a, b],
            });
            self.root = self.nodes.len() - 1;
        }
    }

    fn insert_into(&mut self, id: usize, f: Feature) -> Option<(Feature, Feature)> {
        let centroid = f.centroid();
        if self.nodes[id].entries.is_empty() {
            self.nodes[id].entries.push(f);
            return None;
        }
        let c = closest(&self.nodes[id].entries, &centroid);
        if self.nodes[id].leaf {
            let target = &mut self.nodes[id].entries[c];
            if target.merged_sq_radius(&f) <= self.threshold_sq {
                target.absorb(&f);
                return None;
            }
            self.nodes[id].entries.push(f);
        } else {
            let child = self.nodes[id].entries[c].child.expect("inner entries own a child");
            match self.insert_into(child, f.clone()) {
                None => {
                    self.nodes[id].entries[c].absorb(&f);
                    return None;
                }
                Some((a, b)) => {
                    self.nodes[id].entries[c] = a;
                    self.nodes[id].entries.push(b);
                }
            }
        }
        if self.nodes[id].entries.len() > self.branching {
            Some(self.split(id))
        } else {
            None
        }
    }

    /// Splits around the two most distant entries; the first half keeps `id`.
    fn split(&mut self, id: usize) -> (Feature, Feature) {
        let entries = std::mem::take(&mut self.nodes[id].entries);
        let centroids: Vec<Vec<f64>> = entries.iter().map(Feature::centroid).collect();
        let (mut sa, mut sb, mut far) = (0, 1, -1.0);
        for i in 0..entries.len() {
            for j in i + 1..entries.len() {
                let d = sq_euclidean(&centroids[i], &centroids[j]);
                if d > far {
                    (sa, sb, far) = (i, j, d);
                }
            }
        }
        let (mut left, mut right) = (Vec::new(), Vec::new());
        for (i, e) in entries.into_iter().enumerate() {
            let da = sq_euclidean(&centroids[i], &centroids[sa]);
            let db = sq_euclidean(&centroids[i], &centroids[sb]);
            if i == sa || (i != sb && da <= db) {
                left.push(e);
            } else {
                right.push(e);
            }
        }
        let leaf = self.nodes[id].leaf;
        self.nodes[id].entries = left;
        self.nodes.push(Node { leaf, entries: right });
        let other = self.nodes.len() - 1;
        (
            summary(&self.nodes[id].entries, id),
            summary(&self.nodes[other].entries, other),
        )
    }

    fn leaf_entries(&self) -> Vec<&Feature> {
        let mut out = Vec::new();
        let mut stack = vec![self.root];
        while let Some(id) = stack.pop() {
            let node = &self.nodes[id];
            if node.leaf {
                out.extend(node.entries.iter());
            } else {
                stack.extend(node.entries.iter().rev().filter_map(|e| e.child));
            }
        }
        out
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct BirchFit {
    pub labels: Vec<usize>,
    pub subcluster_centers: Matrix,
    /// Cluster count actually used; below the request when there are fewer subclusters.
    pub effective_k: usize,
}

impl BirchFit {
    pub fn fell_back(&self, requested: usize) -> bool {
        self.effective_k < requested
    }
}

pub fn birch(x: &Matrix, k: usize, threshold: f64) -> Result<BirchFit> {
    if k == 0 || k > x.nrows() {
        return Err(Error::domain(format!(
            "k = {k} is outside 1..={} for BIRCH",
            x.nrows()
        )));
    }
    if !(threshold > 0.0) {
        return Err(Error::domain("BIRCH threshold must be positive"));
    }
    let mut tree = Tree::new(threshold, BRANCHING_FACTOR);
    for row in x.rows() {
        tree.insert(row);
    }
    let centers: Vec<Vec<f64>> = tree.leaf_entries().iter().map(|e| e.centroid()).collect();
    let centers = Matrix::from_rows(&centers)?;
    let effective_k = k.min(centers.nrows());
    if effective_k < k {
        log::info!(
            "BIRCH found {} subclusters, fewer than k = {k}",
            centers.nrows()
        );
    }
    let sub_labels = agglomerative(&centers, effective_k, Linkage::Ward)?.labels;
    let labels: Vec<usize> = x
        .rows()
        .map(|row| sub_labels[closest_row(&centers, row)])
        .collect();
    let labels = crate::metrics::densify(&labels).0;
    Ok(BirchFit {
        labels,
        subcluster_centers: centers,
        effective_k,
    })
}

fn closest_row(m: &Matrix, x: &[f64]) -> usize {
    let mut best = (0, f64::INFINITY);
    for (i, r) in m.rows().enumerate() {
        let d = sq_euclidean(r, x);
        if d < best.1 {
            best = (i, d);
        }
    }
    best.0
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn absorbing_threshold_collapses_to_one_cluster() {
        let rows: Vec<Vec<f64>> = (0..20).map(|i| vec![i as f64 * 0.1, 0.0]).collect();
        let fit = birch(&Matrix::from_rows(&rows).unwrap(), 3, 100.0).unwrap();
        assert_eq!(fit.subcluster_centers.nrows(), 1);
        assert_eq!(fit.effective_k, 1);
        assert!(fit.fell_back(3));
        assert!(fit.labels.iter().all(|&l| l == 0));
    }

    #[test]
    fn tree_splits_keep_every_point() {
        // tiny threshold: each point becomes its own subcluster, forcing node splits
        let rows: Vec<Vec<f64>> = (0..400).map(|i| vec![(i % 20) as f64, (i / 20) as f64]).collect();
        let x = Matrix::from_rows(&rows).unwrap();
        let mut tree = Tree::new(0.01, BRANCHING_FACTOR);
        for r in x.rows() {
            tree.insert(r);
        }
        let leaves = tree.leaf_entries();
        assert_eq!(leaves.len(), 400);
        assert_eq!(leaves.iter().map(|e| e.n).sum::<f64>(), 400.0);
        assert!(!tree.nodes[tree.root].leaf);
        let fit = birch(&x, 4, 0.01).unwrap();
        let distinct: std::collections::BTreeSet<_> = fit.labels.iter().collect();
        assert_eq!(distinct.len(), 4);
    }
}
