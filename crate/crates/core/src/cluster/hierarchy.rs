//! Agglomerative clustering by the nearest-neighbour chain algorithm with
//! Lance–Williams distance updates.

use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::matrix::{euclidean, Matrix};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Linkage {
    Ward,
    Average,
    Complete,
}

impl Linkage {
    pub const ALL: [Linkage; 3] = [Linkage::Ward, Linkage::Average, Linkage::Complete];

    pub fn name(self) -> &'static str {
        match self {
            Linkage::Ward => "ward",
            Linkage::Average => "average",
            Linkage::Complete => "complete",
        }
    }
}

impl FromStr for Linkage {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Linkage::ALL
            .into_iter()
            .find(|l| l.name() == s)
            .ok_or_else(|| Error::Config(format!("unknown linkage '{s}'")))
    }
}

/// One merge: cluster ids below `n` are leaves, `n + i` is the cluster formed by merge `i`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Merge {
    pub left: usize,
    pub right: usize,
    pub height: f64,
    pub size: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Dendrogram {
    n_leaves: usize,
    merges: Vec<Merge>,
}

pub(crate) trait Store: Copy + Send + Sync {
    fn get(self) -> f64;
    fn put(v: f64) -> Self;
}

impl Store for f32 {
    fn get(self) -> f64 {
        self as f64
    }
    fn put(v: f64) -> Self {
        v as f32
    }
}

impl Store for f64 {
    fn get(self) -> f64 {
        self
    }
    fn put(v: f64) -> Self {
        v
    }
}

#[inline]
fn idx(n: usize, i: usize, j: usize) -> usize {
    let (a, b) = if i < j { (i, j) } else { (j, i) };
    a * n - a * (a + 1) / 2 + (b - a - 1)
}

struct UnionFind {
    parent: Vec<usize>,
    size: Vec<usize>,
}

impl UnionFind {
    fn new(n: usize) -> Self {
        UnionFind {
            parent: (0..2 * n.max(1) - 1).collect(),
            size: [vec![1; n], vec![0; n.saturating_sub(1)]].concat(),
        }
    }

    fn find(&mut self, mut x: usize) -> usize {
        let mut root = x;
        while self.parent[root] != root {
            root = self.parent[root];
        }
        while self.parent[x] != root {
            let next = self.parent[x];
            self.parent[x] = root;
            x = next;
        }
        root
    }

    fn merge(&mut self, a: usize, b: usize, id: usize) -> usize {
        self.parent[a] = id;
        self.parent[b] = id;
        self.size[id] = self.size[a] + self.size[b];
        self.size[id]
    }
}

/// Builds the dendrogram from condensed pairwise distances (consumed as scratch space).
pub(crate) fn linkage_condensed<S: Store>(n: usize, mut dist: Vec<S>, linkage: Linkage) -> Dendrogram {
    debug_assert_eq!(dist.len(), n * n.saturating_sub(1) / 2);
    let mut size = vec![1usize; n];
    let mut raw: Vec<(usize, usize, f64)> = Vec::with_capacity(n.saturating_sub(1));
    let mut chain: Vec<usize> = Vec::with_capacity(n);

    for _ in 0..n.saturating_sub(1) {
        if chain.is_empty() {
            chain.push((0..n).find(|&i| size[i] > 0).expect("an active cluster remains"));
        }
        let (x, y, d_xy) = loop {
            let x = *chain.last().unwrap();
            let (mut y, mut best) = if chain.len() > 1 {
                let p = chain[chain.len() - 2];
                (p, dist[idx(n, x, p)].get())
            } else {
                (usize::MAX, f64::INFINITY)
            };
            for i in 0..n {
                if size[i] == 0 || i == x {
                    continue;
                }
                let d = dist[idx(n, x, i)].get();
                if d < best {
                    best = d;
                    y = i;
                }
            }
            if chain.len() > 1 && y == chain[chain.len() - 2] {
                break (x, y, best);
            }
            chain.push(y);
        };
        chain.pop();
        chain.pop();
        let (x, y) = if x < y { (x, y) } else { (y, x) };
        let (nx, ny) = (size[x] as f64, size[y] as f64);
        raw.push((x, y, d_xy));
        // the merged cluster lives in slot y
        size[x] = 0;
        size[y] = (nx + ny) as usize;
        for i in 0..n {
            if size[i] == 0 || i == y {
                continue;
            }
            let d_xi = dist[idx(n, x, i)].get();
            let d_yi = dist[idx(n, y, i)].get();
            let ni = size[i] as f64;
            let d = match linkage {
                Linkage::Ward => {
                    let t = 1.0 / (nx + ny + ni);
                    ((ni + nx) * t * d_xi * d_xi + (ni + ny) * t * d_yi * d_yi - ni * t * d_xy * d_xy)
                        .max(0.0)
                        .sqrt()
                }
                Linkage::Average => (nx * d_xi + ny * d_yi) / (nx + ny),
                Linkage::Complete => d_xi.max(d_yi),
            };
            dist[idx(n, y, i)] = S::put(d);
        }
    }

    // stable sort by height, then relabel slots into cluster ids
    let mut order: Vec<usize> = (0..raw.len()).collect();
    order.sort_by(|&a, &b| raw[a].2.total_cmp(&raw[b].2));
    let mut uf = UnionFind::new(n);
    let mut merges = Vec::with_capacity(raw.len());
    for (step, &o) in order.iter().enumerate() {
        let (x, y, h) = raw[o];
        let (rx, ry) = (uf.find(x), uf.find(y));
        let (left, right) = if rx < ry { (rx, ry) } else { (ry, rx) };
        let size = uf.merge(rx, ry, n + step);
        merges.push(Merge {
            left,
            right,
            height: h,
            size,
        });
    }
    Dendrogram { n_leaves: n, merges }
}

impl Dendrogram {
    /// Full hierarchy of the rows of `x` under Euclidean distance, stored in single precision.
    pub fn from_points(x: &Matrix, linkage: Linkage) -> Dendrogram {
        let n = x.nrows();
        let mut dist: Vec<f32> = Vec::with_capacity(n * n.saturating_sub(1) / 2);
        for i in 0..n {
            for j in i + 1..n {
                dist.push(euclidean(x.row(i), x.row(j)) as f32);
            }
        }
        linkage_condensed(n, dist, linkage)
    }

    pub fn n_leaves(&self) -> usize {
        self.n_leaves
    }

    pub fn merges(&self) -> &[Merge] {
        &self.merges
    }

    /// Flat labels after applying the first `n - k` merges, numbered by first appearance.
    pub fn cut(&self, k: usize) -> Result<Vec<usize>> {
        let n = self.n_leaves;
        if k == 0 || k > n {
            return Err(Error::domain(format!("cannot cut {n} leaves into {k} clusters")));
        }
        let mut uf = UnionFind::new(n);
        for (step, m) in self.merges.iter().take(n - k).enumerate() {
            let (a, b) = (uf.find(m.left), uf.find(m.right));
            uf.merge(a, b, n + step);
        }
        let roots: Vec<usize> = (0..n).map(|i| uf.find(i)).collect();
        Ok(crate::metrics::densify(&roots).0)
    }

    /// Leaves in left-to-right order of the tree drawing.
    pub fn leaf_order(&self) -> Vec<usize> {
        let n = self.n_leaves;
        if n == 0 {
            return Vec::new();
        }
        let mut out = Vec::with_capacity(n);
        let mut stack = vec![2 * n - 2];
        while let Some(node) = stack.pop() {
            if node < n {
                out.push(node);
            } else {
                let m = self.merges[node - n];
                stack.push(m.right);
                stack.push(m.left);
            }
        }
        out
    }
}

#[derive(Debug, Clone)]
pub struct AgglomerativeFit {
    pub labels: Vec<usize>,
    pub dendrogram: Dendrogram,
}

pub fn agglomerative(x: &Matrix, k: usize, linkage: Linkage) -> Result<AgglomerativeFit> {
    if k == 0 || k > x.nrows() {
        return Err(Error::domain(format!(
            "k = {k} is outside 1..={} for agglomerative clustering",
            x.nrows()
        )));
    }
    let dendrogram = Dendrogram::from_points(x, linkage);
    Ok(AgglomerativeFit {
        labels: dendrogram.cut(k)?,
        dendrogram,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn line(v: &[f64]) -> Matrix {
        Matrix::new(v.len(), 1, v.to_vec()).unwrap()
    }

    #[test]
    fn four_point_average_linkage_trace() {
        let fit = agglomerative(&line(&[0.0, 0.1, 10.0, 10.1]), 2, Linkage::Average).unwrap();
        assert_eq!(fit.labels, vec![0, 0, 1, 1]);
        let m = fit.dendrogram.merges();
        assert_eq!((m[0].left, m[0].right), (0, 1));
        assert_eq!((m[1].left, m[1].right), (2, 3));
        assert_eq!((m[2].left, m[2].right), (4, 5));
        assert!((m[0].height - 0.1).abs() < 1e-6);
        assert!((m[2].height - 10.0).abs() < 1e-5);
    }

    #[test]
    fn cut_extremes() {
        let fit = agglomerative(&line(&[3.0, 1.0, 7.0]), 1, Linkage::Complete).unwrap();
        assert_eq!(fit.labels, vec![0, 0, 0]);
        let d = fit.dendrogram;
        assert_eq!(d.cut(3).unwrap(), vec![0, 1, 2]);
        assert!(d.cut(4).is_err());
    }

    #[test]
    fn ward_heights_match_direct_formula() {
        // merging {0} and {1} then {2}: ward height of ({0,1},{2}) = sqrt(2*1/3) * |centroid gap|
        let fit = agglomerative(&line(&[0.0, 1.0, 5.0]), 1, Linkage::Ward).unwrap();
        let m = fit.dendrogram.merges();
        assert!((m[0].height - 1.0).abs() < 1e-6);
        let expected = (2.0f64 * 1.0 / 3.0).sqrt() * 4.5 * 2f64.sqrt();
        assert!((m[1].height - expected).abs() < 1e-5, "{} vs {expected}", m[1].height);
    }

    #[test]
    fn leaf_order_is_a_permutation() {
        let x = line(&[5.0, 0.0, 9.0, 1.0, 4.0, 8.5]);
        let d = Dendrogram::from_points(&x, Linkage::Average);
        let mut order = d.leaf_order();
        assert_eq!(order.len(), 6);
        order.sort_unstable();
        assert_eq!(order, (0..6).collect::<Vec<_>>());
    }

    #[test]
    fn single_leaf() {
        let d = Dendrogram::from_points(&line(&[2.0]), Linkage::Average);
        assert!(d.merges().is_empty());
        assert_eq!(d.leaf_order(), vec![0]);
    }
}
