//! Coverage matrices, cross-representation cluster similarity, overlap
//! reports and alignment of clusters with performance data.

use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::cluster::{linkage_condensed, Linkage, Merge};
use crate::error::{Error, Result};
use crate::mabbob::ProblemKey;
use crate::manifest::{format_cell, write_keyed_csv, KeyColumns, SuiteManifest};
use crate::matrix::{par_map, Matrix};
use crate::metrics::{cosine, hcv, HcvScores};

/// Combination-by-cluster counts; columns are the cluster meta-vectors.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CoverageMatrix {
    pub representation: String,
    pub combos: Vec<(u8, u8)>,
    pub n_clusters: usize,
    /// Row-major `combos.len() x n_clusters`.
    pub counts: Vec<u64>,
}

impl CoverageMatrix {
    pub fn get(&self, combo: usize, cluster: usize) -> u64 {
        self.counts[combo * self.n_clusters + cluster]
    }

    pub fn row_sums(&self) -> Vec<u64> {
        self.counts.chunks(self.n_clusters.max(1)).map(|r| r.iter().sum()).collect()
    }

    pub fn column_sums(&self) -> Vec<u64> {
        (0..self.n_clusters).map(|j| self.column(j).iter().sum()).collect()
    }

    pub fn total(&self) -> u64 {
        self.counts.iter().sum()
    }

    /// Meta-vector of cluster `j`.
    pub fn column(&self, j: usize) -> Vec<u64> {
        (0..self.combos.len()).map(|i| self.get(i, j)).collect()
    }

    fn column_f64(&self, j: usize) -> Vec<f64> {
        self.column(j).into_iter().map(|v| v as f64).collect()
    }

    pub fn write_csv(&self, path: &Path) -> Result<()> {
        let mut w = csv::Writer::from_path(path)?;
        let mut header = vec!["combo_index".to_string(), "class_i".into(), "class_j".into()];
        header.extend((0..self.n_clusters).map(|j| format!("cluster_{j}")));
        w.write_record(&header)?;
        for (i, (a, b)) in self.combos.iter().enumerate() {
            let mut rec = vec![i.to_string(), a.to_string(), b.to_string()];
            rec.extend((0..self.n_clusters).map(|j| self.get(i, j).to_string()));
            w.write_record(&rec)?;
        }
        w.flush().map_err(|e| Error::io(path, e))
    }
}

/// Counts the instances of every combination in every cluster.
pub fn coverage(representation: &str, labels: &[usize], manifest: &SuiteManifest) -> Result<CoverageMatrix> {
    if labels.len() != manifest.len() {
        return Err(Error::data(format!(
            "{representation}: {} labels for {} manifest rows",
            labels.len(),
            manifest.len()
        )));
    }
    let combos = manifest.combinations();
    let n_clusters = labels.iter().max().map_or(0, |m| m + 1);
    let mut counts = vec![0u64; combos.len() * n_clusters];
    for (rec, &l) in manifest.records.iter().zip(labels) {
        counts[rec.combo_index * n_clusters + l] += 1;
    }
    Ok(CoverageMatrix {
        representation: representation.to_string(),
        combos,
        n_clusters,
        counts,
    })
}

/// Leaf orders and merge trees of the rows and columns of a similarity matrix.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DendrogramOrder {
    pub row_order: Vec<usize>,
    pub col_order: Vec<usize>,
    pub row_merges: Vec<Merge>,
    pub col_merges: Vec<Merge>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SimilarityMatrix {
    pub rep_a: String,
    pub rep_b: String,
    pub values: Matrix,
    pub order: DendrogramOrder,
}

impl SimilarityMatrix {
    pub fn write_csv(&self, path: &Path) -> Result<()> {
        let mut w = csv::Writer::from_path(path)?;
        let mut header = vec![format!("{}\\{}", self.rep_a, self.rep_b)];
        header.extend((0..self.values.ncols()).map(|j| format!("{}_{j}", self.rep_b)));
        w.write_record(&header)?;
        for i in 0..self.values.nrows() {
            let mut rec = vec![format!("{}_{i}", self.rep_a)];
            rec.extend(self.values.row(i).iter().map(|v| format_cell(*v)));
            w.write_record(&rec)?;
        }
        w.flush().map_err(|e| Error::io(path, e))
    }
}

/// Cosine similarity of every pair of meta-vectors, with dendrogram orders attached.
pub fn cross_similarity(a: &CoverageMatrix, b: &CoverageMatrix) -> Result<SimilarityMatrix> {
    if a.combos != b.combos {
        return Err(Error::data(format!(
            "coverage matrices of {} and {} have different combination rows",
            a.representation, b.representation
        )));
    }
    let cols_b: Vec<Vec<f64>> = (0..b.n_clusters).map(|l| b.column_f64(l)).collect();
    let rows = par_map(a.n_clusters, |j| {
        let cj = a.column_f64(j);
        cols_b.iter().map(|cl| cosine(&cj, cl)).collect::<Result<Vec<f64>>>()
    });
    let rows = rows.into_iter().collect::<Result<Vec<_>>>()?;
    let values = if rows.is_empty() {
        Matrix::zeros(0, b.n_clusters)
    } else {
        Matrix::from_rows(&rows)?
    };
    let order = dendrogram_order(&values);
    Ok(SimilarityMatrix {
        rep_a: a.representation.clone(),
        rep_b: b.representation.clone(),
        values,
        order,
    })
}

fn profile_tree(profiles: &Matrix) -> (Vec<usize>, Vec<Merge>) {
    let n = profiles.nrows();
    let mut dist = Vec::with_capacity(n * n.saturating_sub(1) / 2);
    for i in 0..n {
        for j in i + 1..n {
            let c = cosine(profiles.row(i), profiles.row(j)).expect("rows share a length");
            dist.push((1.0 - c).max(0.0));
        }
    }
    let tree = linkage_condensed::<f64>(n, dist, Linkage::Average);
    (tree.leaf_order(), tree.merges().to_vec())
}

/// Average-linkage trees over rows and over columns, distance `1 - cosine` of their profiles.
pub fn dendrogram_order(s: &Matrix) -> DendrogramOrder {
    let (row_order, row_merges) = profile_tree(s);
    let (col_order, col_merges) = profile_tree(&s.transpose());
    DendrogramOrder {
        row_order,
        col_order,
        row_merges,
        col_merges,
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Contribution {
    pub combo_index: usize,
    pub class_i: u8,
    pub class_j: u8,
    pub contribution: f64,
    pub share: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OverlapEntry {
    pub cluster_a: usize,
    pub cluster_b: usize,
    pub similarity: f64,
    pub contributors: Vec<Contribution>,
}

/// For every cluster pair at or above `threshold`, the `top_m` combinations
/// contributing most to the dot product of their meta-vectors.
pub fn overlap_report(
    s: &SimilarityMatrix,
    a: &CoverageMatrix,
    b: &CoverageMatrix,
    threshold: f64,
    top_m: usize,
) -> Result<Vec<OverlapEntry>> {
    if !(threshold > 0.0 && threshold <= 1.0) {
        return Err(Error::domain(format!("overlap threshold {threshold} is outside (0, 1]")));
    }
    if a.combos != b.combos || s.values.nrows() != a.n_clusters || s.values.ncols() != b.n_clusters {
        return Err(Error::data("similarity and coverage matrices do not correspond"));
    }
    // cosine of identical vectors can miss 1.0 by an ulp
    let cut = threshold - 1e-12;
    let mut out = Vec::new();
    for j in 0..a.n_clusters {
        for l in 0..b.n_clusters {
            let sim = s.values.get(j, l);
            if sim < cut {
                continue;
            }
            let mut parts: Vec<(usize, f64)> = (0..a.combos.len())
                .map(|i| (i, a.get(i, j) as f64 * b.get(i, l) as f64))
                .filter(|p| p.1 > 0.0)
                .collect();
            let dot: f64 = parts.iter().map(|p| p.1).sum();
            parts.sort_by(|x, y| y.1.total_cmp(&x.1).then(x.0.cmp(&y.0)));
            parts.truncate(top_m);
            out.push(OverlapEntry {
                cluster_a: j,
                cluster_b: l,
                similarity: sim,
                contributors: parts
                    .into_iter()
                    .map(|(i, c)| Contribution {
                        combo_index: i,
                        class_i: a.combos[i].0,
                        class_j: a.combos[i].1,
                        contribution: c,
                        share: c / dot,
                    })
                    .collect(),
            });
        }
    }
    Ok(out)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Orientation {
    #[default]
    Lower,
    Higher,
}

/// Scores of one portfolio's configurations per problem.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PerformanceTable {
    pub portfolio: String,
    pub config_ids: Vec<String>,
    pub keys: Vec<ProblemKey>,
    pub scores: Matrix,
    pub orientation: Orientation,
}

pub const PORTFOLIO_SIZE: usize = 5;

impl PerformanceTable {
    pub fn new(
        portfolio: &str,
        config_ids: Vec<String>,
        keys: Vec<ProblemKey>,
        scores: Matrix,
        orientation: Orientation,
    ) -> Result<Self> {
        if config_ids.len() != PORTFOLIO_SIZE || scores.ncols() != PORTFOLIO_SIZE {
            return Err(Error::data(format!(
                "portfolio {portfolio} needs exactly {PORTFOLIO_SIZE} configurations"
            )));
        }
        if scores.nrows() != keys.len() {
            return Err(Error::data(format!("portfolio {portfolio}: scores and keys differ in length")));
        }
        Ok(PerformanceTable {
            portfolio: portfolio.to_string(),
            config_ids,
            keys,
            scores,
            orientation,
        })
    }

    /// Index of the best configuration per row; the lowest index wins ties.
    pub fn best_config(&self) -> Vec<usize> {
        let mut ties = 0usize;
        let best = self
            .scores
            .rows()
            .map(|r| {
                let better = |a: f64, b: f64| match self.orientation {
                    Orientation::Lower => a < b,
                    Orientation::Higher => a > b,
                };
                let mut b = 0;
                for c in 1..r.len() {
                    if better(r[c], r[b]) {
                        b = c;
                    }
                }
                if r.iter().enumerate().any(|(c, v)| c != b && *v == r[b]) {
                    ties += 1;
                }
                b
            })
            .collect();
        if ties > 0 {
            log::info!("{}: {ties} rows had tied best configurations", self.portfolio);
        }
        best
    }

    /// Reads a table with key columns, a `portfolio` column and five score
    /// columns; rows of different portfolios become separate tables.
    pub fn read_csv(path: &Path, orientation: Orientation) -> Result<Vec<PerformanceTable>> {
        let mut r = csv::Reader::from_path(path)?;
        let header = r.headers()?.clone();
        let keys = KeyColumns::find(&header, path)?;
        let pcol = header
            .iter()
            .position(|h| h.trim() == "portfolio")
            .ok_or_else(|| Error::data(format!("{}: missing 'portfolio' column", path.display())))?;
        let score_cols: Vec<usize> = (0..header.len()).filter(|i| *i != pcol && !keys.all.contains(i)).collect();
        if score_cols.len() != PORTFOLIO_SIZE {
            return Err(Error::data(format!(
                "{}: expected {PORTFOLIO_SIZE} score columns, found {}",
                path.display(),
                score_cols.len()
            )));
        }
        let config_ids: Vec<String> = score_cols.iter().map(|&c| header[c].trim().to_string()).collect();
        let mut groups: Vec<(String, Vec<ProblemKey>, Vec<f64>)> = Vec::new();
        for (line, rec) in r.records().enumerate() {
            let rec = rec?;
            let line = line as u64 + 2;
            let key = keys.parse(&rec, line, path)?;
            let name = rec.get(pcol).unwrap_or("").trim().to_string();
            let pos = match groups.iter().position(|g| g.0 == name) {
                Some(p) => p,
                None => {
                    groups.push((name, Vec::new(), Vec::new()));
                    groups.len() - 1
                }
            };
            groups[pos].1.push(key);
            for &c in &score_cols {
                let cell = rec.get(c).unwrap_or("").trim();
                let v: f64 = cell.parse().map_err(|_| {
                    Error::data(format!("{}: line {line}: invalid score '{cell}'", path.display()))
                })?;
                groups[pos].2.push(v);
            }
        }
        groups
            .into_iter()
            .map(|(name, keys, scores)| {
                let n = keys.len();
                PerformanceTable::new(&name, config_ids.clone(), keys, Matrix::new(n, PORTFOLIO_SIZE, scores)?, orientation)
            })
            .collect()
    }

    /// Scores per configuration keyed in manifest order.
    pub fn write_csv(&self, path: &Path, manifest: &SuiteManifest) -> Result<()> {
        self.labels_for(&manifest.keys())?;
        let index: std::collections::HashMap<ProblemKey, usize> =
            self.keys.iter().enumerate().map(|(i, k)| (*k, i)).collect();
        let mut columns = vec!["portfolio".to_string()];
        columns.extend(self.config_ids.iter().cloned());
        write_keyed_csv(path, manifest, &columns, |row| {
            let i = index[&manifest.records[row].key()];
            std::iter::once(self.portfolio.clone())
                .chain(self.scores.row(i).iter().map(|v| format_cell(*v)))
                .collect()
        })
    }

    /// Best configuration for each key; errors name any key without scores.
    pub fn labels_for(&self, keys: &[ProblemKey]) -> Result<Vec<usize>> {
        let best = self.best_config();
        let index: std::collections::HashMap<ProblemKey, usize> =
            self.keys.iter().enumerate().map(|(i, k)| (*k, best[i])).collect();
        let missing: Vec<String> = keys
            .iter()
            .filter(|k| !index.contains_key(k))
            .take(10)
            .map(ToString::to_string)
            .collect();
        if !missing.is_empty() {
            let total = keys.iter().filter(|k| !index.contains_key(k)).count();
            return Err(Error::data(format!(
                "portfolio {} has no scores for {total} problems: {}",
                self.portfolio,
                missing.join(", ")
            )));
        }
        Ok(keys.iter().map(|k| index[k]).collect())
    }
}

/// Homogeneity/completeness of clusters against the best configuration per problem.
pub fn perf_alignment(labels: &[usize], keys: &[ProblemKey], perf: &PerformanceTable) -> Result<HcvScores> {
    if labels.len() != keys.len() {
        return Err(Error::domain("labels and keys differ in length"));
    }
    hcv(&perf.labels_for(keys)?, labels)
}

/// Homogeneity/completeness of clusters against the problem combination of each row.
pub fn combo_alignment(labels: &[usize], manifest: &SuiteManifest) -> Result<HcvScores> {
    let truth: Vec<usize> = manifest.records.iter().map(|r| r.combo_index).collect();
    hcv(&truth, labels)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cov(name: &str, cols: &[&[u64]]) -> CoverageMatrix {
        let rows = cols[0].len();
        let k = cols.len();
        let mut counts = vec![0; rows * k];
        for (j, c) in cols.iter().enumerate() {
            for (i, v) in c.iter().enumerate() {
                counts[i * k + j] = *v;
            }
        }
        CoverageMatrix {
            representation: name.into(),
            combos: (0..rows).map(|i| (1, i as u8 + 2)).collect(),
            n_clusters: k,
            counts,
        }
    }

    #[test]
    fn three_by_two_similarity() {
        let a = cov("a", &[&[1, 0, 2], &[0, 3, 0], &[4, 4, 0]]);
        let b = cov("b", &[&[2, 1, 0], &[0, 0, 5]]);
        let s = cross_similarity(&a, &b).unwrap();
        assert_eq!((s.values.nrows(), s.values.ncols()), (3, 2));
        assert!((s.values.get(0, 0) - 2.0 / (5f64.sqrt() * 5f64.sqrt())).abs() < 1e-15);
        assert!((s.values.get(0, 1) - 10.0 / (5f64.sqrt() * 5.0)).abs() < 1e-15);
        assert!((s.values.get(1, 0) - 3.0 / (3.0 * 5f64.sqrt())).abs() < 1e-15);
        assert_eq!(s.values.get(1, 1), 0.0);
        assert!((s.values.get(2, 0) - 12.0 / (32f64.sqrt() * 5f64.sqrt())).abs() < 1e-15);
    }

    #[test]
    fn overlap_shares() {
        let mut a_col = vec![0u64; 10];
        let mut b_col = vec![0u64; 10];
        (a_col[3], a_col[7]) = (5, 10);
        (b_col[3], b_col[7]) = (10, 5);
        let a = cov("a", &[&a_col]);
        let b = cov("b", &[&b_col]);
        let s = cross_similarity(&a, &b).unwrap();
        let r = overlap_report(&s, &a, &b, 0.5, 5).unwrap();
        let c = &r[0].contributors;
        assert_eq!(c.len(), 2);
        assert_eq!((c[0].contribution, c[1].contribution), (50.0, 50.0));
        assert_eq!((c[0].combo_index, c[1].combo_index), (3, 7));
        assert_eq!((c[0].share, c[1].share), (0.5, 0.5));
        assert!(overlap_report(&s, &a, &b, 0.0, 5).is_err());
    }

    #[test]
    fn single_shared_combination_is_the_sole_contributor() {
        let a = cov("a", &[&[0, 4, 1]]);
        let b = cov("b", &[&[0, 2, 0]]);
        let s = cross_similarity(&a, &b).unwrap();
        let r = overlap_report(&s, &a, &b, 0.1, 3).unwrap();
        assert_eq!(r[0].contributors.len(), 1);
        assert_eq!(r[0].contributors[0].share, 1.0);
    }

    #[test]
    fn threshold_one_without_identical_columns_is_empty() {
        let a = cov("a", &[&[1, 2, 0], &[0, 1, 1]]);
        let b = cov("b", &[&[2, 1, 0], &[1, 0, 1]]);
        let s = cross_similarity(&a, &b).unwrap();
        assert!(overlap_report(&s, &a, &b, 1.0, 3).unwrap().is_empty());
    }

    #[test]
    fn best_config_ties_and_orientation() {
        let scores = Matrix::from_rows(&[vec![3.0, 1.0, 1.0, 5.0, 2.0], vec![0.0, 0.0, 0.0, 0.0, 0.0]]).unwrap();
        let keys = vec![ProblemKey::new(1, 2, 1, 0.5), ProblemKey::new(1, 2, 2, 0.5)];
        let ids: Vec<String> = (0..5).map(|i| format!("c{i}")).collect();
        let t = PerformanceTable::new("DE", ids.clone(), keys.clone(), scores.clone(), Orientation::Lower).unwrap();
        assert_eq!(t.best_config(), vec![1, 0]);
        let t = PerformanceTable::new("DE", ids, keys, scores, Orientation::Higher).unwrap();
        assert_eq!(t.best_config(), vec![3, 0]);
    }

    #[test]
    fn one_by_one_order() {
        let o = dendrogram_order(&Matrix::new(1, 1, vec![0.7]).unwrap());
        assert_eq!((o.row_order, o.col_order), (vec![0], vec![0]));
    }
}
