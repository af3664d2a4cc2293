//! Sample-based landscape features computed from an evaluated design `(X, y)`.
//!
//! Only groups that need no additional function evaluations are provided. The
//! exact feature set and its order are fixed by [`catalog`]; the extractor
//! refuses to emit anything else.
//!
//! Rows are put into a canonical order (lexicographic on the coordinates, then
//! `y`) before any computation, which makes every feature exactly invariant to
//! row permutations, including index-based tie-breaking.

mod disp;
mod distr;
mod ic;
mod meta;
mod nbc;
mod pca;
pub(crate) mod stats;

use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::doe::DesignMatrix;
use crate::error::{Error, Result};

/// Smallest sample accepted by [`compute_features`].
pub const MIN_SAMPLES: usize = 30;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum FeatureGroup {
    #[serde(rename = "ela_distr")]
    Distribution,
    #[serde(rename = "ela_meta")]
    MetaModel,
    #[serde(rename = "disp")]
    Dispersion,
    #[serde(rename = "nbc")]
    NearestBetter,
    #[serde(rename = "ic")]
    InformationContent,
    #[serde(rename = "pca")]
    Pca,
}

impl FeatureGroup {
    pub const ALL: [FeatureGroup; 6] = [
        FeatureGroup::Distribution,
        FeatureGroup::MetaModel,
        FeatureGroup::Dispersion,
        FeatureGroup::NearestBetter,
        FeatureGroup::InformationContent,
        FeatureGroup::Pca,
    ];

    pub fn prefix(self) -> &'static str {
        match self {
            FeatureGroup::Distribution => "ela_distr",
            FeatureGroup::MetaModel => "ela_meta",
            FeatureGroup::Dispersion => "disp",
            FeatureGroup::NearestBetter => "nbc",
            FeatureGroup::InformationContent => "ic",
            FeatureGroup::Pca => "pca",
        }
    }

    pub fn from_prefix(s: &str) -> Option<FeatureGroup> {
        FeatureGroup::ALL.into_iter().find(|g| g.prefix() == s)
    }

    fn entries(self) -> Vec<(String, &'static str)> {
        match self {
            FeatureGroup::Distribution => distr::ENTRIES.iter().map(|(n, d)| (n.to_string(), *d)).collect(),
            FeatureGroup::MetaModel => meta::ENTRIES.iter().map(|(n, d)| (n.to_string(), *d)).collect(),
            FeatureGroup::Dispersion => disp::entries(),
            FeatureGroup::NearestBetter => nbc::ENTRIES.iter().map(|(n, d)| (n.to_string(), *d)).collect(),
            FeatureGroup::InformationContent => ic::ENTRIES.iter().map(|(n, d)| (n.to_string(), *d)).collect(),
            FeatureGroup::Pca => pca::ENTRIES.iter().map(|(n, d)| (n.to_string(), *d)).collect(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CatalogEntry {
    pub group: FeatureGroup,
    /// Full identifier, `group.feature`.
    pub name: String,
    pub definition: String,
}

/// Catalog of the requested groups in fixed group order.
pub fn catalog(groups: &[FeatureGroup]) -> Vec<CatalogEntry> {
    let mut groups = groups.to_vec();
    groups.sort();
    groups.dedup();
    groups
        .into_iter()
        .flat_map(|g| {
            g.entries().into_iter().map(move |(name, def)| CatalogEntry {
                group: g,
                name: format!("{}.{}", g.prefix(), name),
                definition: def.to_string(),
            })
        })
        .collect()
}

pub fn write_catalog(path: &Path, entries: &[CatalogEntry]) -> Result<()> {
    let text = serde_json::to_string_pretty(entries)?;
    std::fs::write(path, text + "\n").map_err(|e| Error::io(path, e))
}

pub fn read_catalog(path: &Path) -> Result<Vec<CatalogEntry>> {
    let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    Ok(serde_json::from_str(&text)?)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum FeatureStatus {
    Ok,
    Degenerate,
}

#[derive(Debug, Clone, PartialEq)]
pub struct FeatureVector {
    pub names: Vec<String>,
    /// Degenerate entries hold NaN; their flag says so.
    pub values: Vec<f64>,
    pub flags: Vec<FeatureStatus>,
}

impl FeatureVector {
    pub fn get(&self, name: &str) -> Option<f64> {
        self.names.iter().position(|n| n == name).map(|i| self.values[i])
    }

    pub fn status(&self, name: &str) -> Option<FeatureStatus> {
        self.names.iter().position(|n| n == name).map(|i| self.flags[i])
    }

    pub fn n_degenerate(&self) -> usize {
        self.flags.iter().filter(|f| **f == FeatureStatus::Degenerate).count()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ElaOptions {
    pub groups: Vec<FeatureGroup>,
    /// Picks the start of the information-content tour.
    pub seed: u64,
}

impl Default for ElaOptions {
    fn default() -> Self {
        ElaOptions {
            groups: FeatureGroup::ALL.to_vec(),
            seed: 0,
        }
    }
}

/// Sample in canonical row order with its pairwise distances.
pub(crate) struct Sample {
    pub n: usize,
    pub d: usize,
    /// Row-major points.
    pub x: Vec<f64>,
    pub y: Vec<f64>,
    /// Condensed upper-triangle Euclidean distances.
    dist: Vec<f64>,
}

impl Sample {
    pub(crate) fn new(design: &DesignMatrix, y: &[f64]) -> Sample {
        let n = design.n_samples();
        let d = design.dim();
        let mut order: Vec<usize> = (0..n).collect();
        order.sort_by(|&a, &b| {
            let ra = design.row(a);
            let rb = design.row(b);
            ra.iter()
                .zip(rb)
                .map(|(u, v)| u.total_cmp(v))
                .find(|o| o.is_ne())
                .unwrap_or(std::cmp::Ordering::Equal)
                .then(y[a].total_cmp(&y[b]))
        });
        let mut x = Vec::with_capacity(n * d);
        for &i in &order {
            x.extend_from_slice(design.row(i));
        }
        let y = order.iter().map(|&i| y[i]).collect();
        let mut dist = Vec::with_capacity(n * (n - 1) / 2);
        for i in 0..n {
            for j in i + 1..n {
                let s: f64 = x[i * d..(i + 1) * d]
                    .iter()
                    .zip(&x[j * d..(j + 1) * d])
                    .map(|(a, b)| (a - b) * (a - b))
                    .sum();
                dist.push(s.sqrt());
            }
        }
        Sample { n, d, x, y, dist }
    }

    pub fn row(&self, i: usize) -> &[f64] {
        &self.x[i * self.d..(i + 1) * self.d]
    }

    pub fn dist(&self, i: usize, j: usize) -> f64 {
        if i == j {
            return 0.0;
        }
        let (a, b) = if i < j { (i, j) } else { (j, i) };
        self.dist[a * self.n - a * (a + 1) / 2 + (b - a - 1)]
    }

    pub fn all_distances(&self) -> &[f64] {
        &self.dist
    }
}

/// Computes the requested feature groups in catalog order.
pub fn compute_features(design: &DesignMatrix, y: &[f64], options: &ElaOptions) -> Result<FeatureVector> {
    if y.len() != design.n_samples() {
        return Err(Error::domain(format!(
            "{} objective values for a design of {} points",
            y.len(),
            design.n_samples()
        )));
    }
    if y.len() < MIN_SAMPLES {
        return Err(Error::domain(format!(
            "feature computation needs at least {MIN_SAMPLES} samples, got {}",
            y.len()
        )));
    }
    if y.iter().any(|v| !v.is_finite()) {
        return Err(Error::domain("objective values must be finite"));
    }
    let sample = Sample::new(design, y);
    let expected = catalog(&options.groups);
    let mut groups = options.groups.clone();
    groups.sort();
    groups.dedup();

    let mut raw: Vec<Option<f64>> = Vec::with_capacity(expected.len());
    for g in groups {
        let part = match g {
            FeatureGroup::Distribution => distr::compute(&sample),
            FeatureGroup::MetaModel => meta::compute(&sample),
            FeatureGroup::Dispersion => disp::compute(&sample),
            FeatureGroup::NearestBetter => nbc::compute(&sample),
            FeatureGroup::InformationContent => ic::compute(&sample, options.seed),
            FeatureGroup::Pca => pca::compute(&sample),
        };
        if part.len() != g.entries().len() {
            return Err(Error::Numerical(format!(
                "group {} emitted {} features, catalog lists {}",
                g.prefix(),
                part.len(),
                g.entries().len()
            )));
        }
        raw.extend(part);
    }

    let mut values = Vec::with_capacity(raw.len());
    let mut flags = Vec::with_capacity(raw.len());
    for v in raw {
        match v {
            Some(v) if v.is_finite() => {
                values.push(v);
                flags.push(FeatureStatus::Ok);
            }
            _ => {
                values.push(f64::NAN);
                flags.push(FeatureStatus::Degenerate);
            }
        }
    }
    Ok(FeatureVector {
        names: expected.into_iter().map(|e| e.name).collect(),
        values,
        flags,
    })
}
