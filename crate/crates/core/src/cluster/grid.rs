//! Hyperparameter grid: spec parsing, parallel scoring and persisted tables.

use std::path::Path;
use std::time::Instant;

use serde::{Deserialize, Serialize};

use super::{fit, n_distinct, Algorithm, ClusterAssignment, ClusteringConfig, CovarianceType, Linkage, Params};
use crate::error::{Error, Result};
use crate::manifest::{write_keyed_csv, KeyColumns, SuiteManifest};
use crate::matrix::{par_map, Matrix};
use crate::metrics::{silhouette_with, subsample, PairwiseDistances};

/// `5, 10, ..., 500`.
pub const DEFAULT_K_VALUES: (usize, usize, usize) = (5, 500, 5);

fn default_values(a: Algorithm) -> Vec<Params> {
    match a {
        Algorithm::KMeans => [10, 20].map(|n_init| Params::KMeans { n_init }).to_vec(),
        Algorithm::Agglomerative => Linkage::ALL.map(|linkage| Params::Agglomerative { linkage }).to_vec(),
        Algorithm::Gmm => CovarianceType::ALL
            .map(|covariance_type| Params::Gmm { covariance_type })
            .to_vec(),
        Algorithm::Birch => [0.5, 1.0].map(|threshold| Params::Birch { threshold }).to_vec(),
    }
}

fn k_range(lo: usize, hi: usize, step: usize) -> Vec<usize> {
    (lo..=hi).step_by(step.max(1)).collect()
}

/// Every algorithm family and parameter value of the search space, `k = 5..500` step 5.
pub const DEFAULT_GRID: &str = "kmeans k=5..500:5 n_init=10,20; \
agglomerative k=5..500:5 linkage=ward,average,complete; \
gmm k=5..500:5 covariance_type=full,tied,diag; \
birch k=5..500:5 threshold=0.5,1.0";

fn parse_ks(v: &str) -> Result<Vec<usize>> {
    let bad = || Error::Config(format!("invalid k list '{v}'"));
    if let Some((range, step)) = v.split_once(':').or(v.contains("..").then_some((v, "1"))) {
        let (lo, hi) = range.split_once("..").ok_or_else(bad)?;
        let lo: usize = lo.trim().parse().map_err(|_| bad())?;
        let hi: usize = hi.trim().parse().map_err(|_| bad())?;
        let step: usize = step.trim().parse().map_err(|_| bad())?;
        if step == 0 || lo > hi {
            return Err(bad());
        }
        return Ok(k_range(lo, hi, step));
    }
    v.split(',').map(|s| s.trim().parse().map_err(|_| bad())).collect()
}

/// Parses cells such as `kmeans k=5..500:5 n_init=10,20`, separated by `;` or newlines.
///
/// Omitted parameters take every value of the default search space; an
/// omitted `k` takes `5..500:5`. A `seed=` token overrides `seed` for that cell.
pub fn parse_grid(spec: &str, seed: u64) -> Result<Vec<ClusteringConfig>> {
    let mut out = Vec::new();
    for cell in spec.split([';', '\n']).map(str::trim).filter(|c| !c.is_empty()) {
        let mut tokens = cell.split_whitespace();
        let algorithm = Algorithm::from_name(tokens.next().expect("non-empty cell"))?;
        let (lo, hi, step) = DEFAULT_K_VALUES;
        let mut ks = k_range(lo, hi, step);
        let mut params = default_values(algorithm);
        let mut cell_seed = seed;
        for t in tokens {
            let (key, value) = t
                .split_once('=')
                .ok_or_else(|| Error::Config(format!("expected name=value, got '{t}'")))?;
            let values = value.split(',').map(str::trim);
            let unknown = || Error::Config(format!("'{key}' is not a parameter of {}", algorithm.name()));
            let number = |v: &str| Error::Config(format!("invalid value '{v}' for {key}"));
            params = match (algorithm, key) {
                (_, "k" | "n_clusters" | "n_components") => {
                    ks = parse_ks(value)?;
                    continue;
                }
                (_, "seed" | "random_state") => {
                    cell_seed = value.parse().map_err(|_| number(value))?;
                    continue;
                }
                (Algorithm::KMeans, "n_init") => values
                    .map(|v| v.parse().map(|n_init| Params::KMeans { n_init }).map_err(|_| number(v)))
                    .collect::<Result<_>>()?,
                (Algorithm::Agglomerative, "linkage") => values
                    .map(|v| v.parse().map(|linkage| Params::Agglomerative { linkage }))
                    .collect::<Result<_>>()?,
                (Algorithm::Gmm, "covariance_type" | "covariance") => values
                    .map(|v| v.parse().map(|covariance_type| Params::Gmm { covariance_type }))
                    .collect::<Result<_>>()?,
                (Algorithm::Birch, "threshold") => values
                    .map(|v| v.parse().map(|threshold| Params::Birch { threshold }).map_err(|_| number(v)))
                    .collect::<Result<_>>()?,
                _ => return Err(unknown()),
            };
        }
        for p in &params {
            out.extend(ks.iter().map(|&k| ClusteringConfig::new(k, *p, cell_seed)));
        }
    }
    if out.is_empty() {
        return Err(Error::Config("the grid specification is empty".into()));
    }
    Ok(out)
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct GridOptions {
    /// Score on a seeded subsample of this many rows when the data is larger.
    pub sample_cap: Option<usize>,
    pub sample_seed: u64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScoreRow {
    pub representation: String,
    pub algorithm: String,
    pub params: String,
    pub k: usize,
    pub silhouette: Option<f64>,
    pub n_effective_clusters: Option<usize>,
    pub wall_time_ms: u64,
    /// `ok`, or `failed: <reason>`.
    pub status: String,
}

#[derive(Debug, Clone)]
pub struct GridOutcome {
    pub best: ClusterAssignment,
    pub scores: Vec<ScoreRow>,
}

/// Scores every configuration by silhouette and returns the best one.
///
/// Ties go to the smaller `k`, then the algorithm name, then grid order.
/// Failing cells are recorded and skipped.
pub fn grid_search(
    x: &Matrix,
    grid: &[ClusteringConfig],
    representation: &str,
    options: &GridOptions,
) -> Result<GridOutcome> {
    if grid.is_empty() {
        return Err(Error::domain("empty clustering grid"));
    }
    let sub = subsample(x.nrows(), options.sample_cap, options.sample_seed);
    let dist = match &sub {
        Some(idx) => PairwiseDistances::new(&x.select_rows(idx)),
        None => PairwiseDistances::new(x),
    };
    let cells = par_map(grid.len(), |i| {
        let config = &grid[i];
        let start = Instant::now();
        let result = config.validate(x.nrows()).and_then(|_| fit(x, config)).and_then(|f| {
            let n_eff = n_distinct(&f.labels);
            if n_eff < 2 {
                return Err(Error::Numerical("only one cluster was formed".into()));
            }
            let scored: Vec<usize> = match &sub {
                Some(idx) => idx.iter().map(|&r| f.labels[r]).collect(),
                None => f.labels.clone(),
            };
            let s = silhouette_with(&dist, &scored)?;
            Ok((f, n_eff, s))
        });
        (result, start.elapsed().as_millis() as u64)
    });

    let mut scores = Vec::with_capacity(grid.len());
    let mut best: Option<(usize, f64)> = None;
    let mut fitted = Vec::with_capacity(grid.len());
    for (i, (result, ms)) in cells.into_iter().enumerate() {
        let config = &grid[i];
        let mut row = ScoreRow {
            representation: representation.to_string(),
            algorithm: config.algorithm().name().to_string(),
            params: config.params.canonical(),
            k: config.k,
            silhouette: None,
            n_effective_clusters: None,
            wall_time_ms: ms,
            status: "ok".into(),
        };
        match result {
            Ok((f, n_eff, s)) => {
                row.silhouette = Some(s);
                row.n_effective_clusters = Some(n_eff);
                let better = match best {
                    None => true,
                    Some((b, bs)) => {
                        let bc = &grid[b];
                        s > bs
                            || (s == bs
                                && (config.k, config.algorithm().name()) < (bc.k, bc.algorithm().name()))
                    }
                };
                if better {
                    best = Some((i, s));
                }
                fitted.push(Some((f, n_eff, s)));
            }
            Err(e) => {
                log::warn!(
                    "{representation}: {} k={} {} failed: {e}",
                    row.algorithm,
                    row.k,
                    row.params
                );
                row.status = format!("failed: {e}");
                fitted.push(None);
            }
        }
        scores.push(row);
    }
    let (b, _) = best.ok_or_else(|| Error::Numerical("every grid configuration failed".into()))?;
    let (f, n_eff, s) = fitted.swap_remove(b).expect("best cell succeeded");
    Ok(GridOutcome {
        best: ClusterAssignment {
            config: grid[b],
            representation: representation.to_string(),
            labels: f.labels,
            silhouette: s,
            n_effective_clusters: n_eff,
            note: f.note,
        },
        scores,
    })
}

/// Deterministic score table; timings live in a separate file.
pub fn write_scores_csv(path: &Path, rows: &[ScoreRow]) -> Result<()> {
    let mut w = csv::Writer::from_path(path)?;
    w.write_record(["representation", "algorithm", "params", "k", "silhouette", "n_effective_clusters", "status"])?;
    for r in rows {
        w.write_record([
            r.representation.clone(),
            r.algorithm.clone(),
            r.params.clone(),
            r.k.to_string(),
            r.silhouette.map(|v| v.to_string()).unwrap_or_default(),
            r.n_effective_clusters.map(|v| v.to_string()).unwrap_or_default(),
            r.status.clone(),
        ])?;
    }
    w.flush().map_err(|e| Error::io(path, e))
}

pub fn write_timings_csv(path: &Path, rows: &[ScoreRow]) -> Result<()> {
    let mut w = csv::Writer::from_path(path)?;
    w.write_record(["representation", "algorithm", "params", "k", "wall_time_ms", "status"])?;
    for r in rows {
        w.write_record([
            r.representation.clone(),
            r.algorithm.clone(),
            r.params.clone(),
            r.k.to_string(),
            r.wall_time_ms.to_string(),
            r.status.clone(),
        ])?;
    }
    w.flush().map_err(|e| Error::io(path, e))
}

pub fn write_assignment_csv(path: &Path, manifest: &SuiteManifest, labels: &[usize]) -> Result<()> {
    if labels.len() != manifest.len() {
        return Err(Error::domain("assignment length differs from the manifest"));
    }
    write_keyed_csv(path, manifest, &["label".to_string()], |row| vec![labels[row].to_string()])
}

/// Labels in manifest order.
pub fn read_assignment_csv(path: &Path, manifest: &SuiteManifest) -> Result<Vec<usize>> {
    let mut r = csv::Reader::from_path(path)?;
    let header = r.headers()?.clone();
    let keys = KeyColumns::find(&header, path)?;
    let col = header
        .iter()
        .position(|h| h == "label")
        .ok_or_else(|| Error::data(format!("{}: missing 'label' column", path.display())))?;
    let index = manifest.row_index();
    let mut labels = vec![None; manifest.len()];
    for (line, rec) in r.records().enumerate() {
        let rec = rec?;
        let line = line as u64 + 2;
        let key = keys.parse(&rec, line, path)?;
        let row = *index
            .get(&key)
            .ok_or_else(|| Error::data(format!("{}: line {line}: {key} is not in the manifest", path.display())))?;
        let label = rec
            .get(col)
            .and_then(|v| v.trim().parse().ok())
            .ok_or_else(|| Error::data(format!("{}: line {line}: invalid label", path.display())))?;
        if labels[row].replace(label).is_some() {
            return Err(Error::data(format!("{}: duplicate row {key}", path.display())));
        }
    }
    labels
        .into_iter()
        .enumerate()
        .map(|(row, l)| {
            l.ok_or_else(|| Error::data(format!("{}: no label for {}", path.display(), manifest.records[row].key())))
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn spec_counts() {
        assert_eq!(parse_grid("kmeans k=5..500:5 n_init=10,20", 42).unwrap().len(), 200);
        assert_eq!(parse_grid("agglomerative k=2,3", 0).unwrap().len(), 6);
        let g = parse_grid("gmm k=5..25:5 covariance_type=diag; birch k=7 threshold=0.5 seed=3", 42).unwrap();
        assert_eq!(g.len(), 6);
        assert_eq!(g[5].seed, 3);
        assert_eq!(g[0].seed, 42);
        assert_eq!(parse_grid(DEFAULT_GRID, 42).unwrap().len(), 1000);
        assert!(parse_grid("spectral k=5", 0).is_err());
        assert!(parse_grid("kmeans linkage=ward", 0).is_err());
        assert!(parse_grid("kmeans k=9..3:1", 0).is_err());
    }

    #[test]
    fn failing_cells_do_not_abort_the_search() {
        let x = Matrix::from_rows(&(0..12).map(|i| vec![(i / 4) as f64 * 10.0 + (i % 4) as f64 * 0.1]).collect::<Vec<_>>()).unwrap();
        let grid = parse_grid("kmeans k=3,40 n_init=2", 1).unwrap();
        let out = grid_search(&x, &grid, "t", &GridOptions::default()).unwrap();
        assert_eq!(out.best.config.k, 3);
        assert!(out.scores[1].status.starts_with("failed"));
        assert!(grid_search(&x, &grid[1..], "t", &GridOptions::default()).is_err());
    }
}
