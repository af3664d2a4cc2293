//! Clustering algorithms, their configurations and the silhouette-driven grid search.

mod birch;
mod gmm;
mod grid;
mod hierarchy;
mod kmeans;

use serde::{Deserialize, Serialize};

pub use birch::{birch, BirchFit, BRANCHING_FACTOR};
pub use gmm::{gmm, CovarianceType, GmmFit, COVARIANCE_FLOOR};
pub use grid::{
    grid_search, parse_grid, read_assignment_csv, write_assignment_csv, write_scores_csv,
    write_timings_csv, GridOptions, GridOutcome, ScoreRow, DEFAULT_GRID, DEFAULT_K_VALUES,
};
pub use hierarchy::{agglomerative, AgglomerativeFit, Dendrogram, Linkage, Merge};
pub use kmeans::{kmeans, KMeansFit};

pub(crate) use hierarchy::linkage_condensed;

use crate::error::{Error, Result};
use crate::matrix::Matrix;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Algorithm {
    KMeans,
    Agglomerative,
    Gmm,
    Birch,
}

impl Algorithm {
    pub const ALL: [Algorithm; 4] = [Algorithm::KMeans, Algorithm::Agglomerative, Algorithm::Gmm, Algorithm::Birch];

    pub fn name(self) -> &'static str {
        match self {
            Algorithm::KMeans => "kmeans",
            Algorithm::Agglomerative => "agglomerative",
            Algorithm::Gmm => "gmm",
            Algorithm::Birch => "birch",
        }
    }

    pub fn from_name(s: &str) -> Result<Algorithm> {
        Algorithm::ALL
            .into_iter()
            .find(|a| a.name() == s)
            .ok_or_else(|| Error::Config(format!("unknown clustering algorithm '{s}'")))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "algorithm", rename_all = "lowercase")]
pub enum Params {
    #[serde(rename = "kmeans")]
    KMeans { n_init: usize },
    Agglomerative { linkage: Linkage },
    Gmm { covariance_type: CovarianceType },
    Birch { threshold: f64 },
}

impl Params {
    pub fn algorithm(&self) -> Algorithm {
        match self {
            Params::KMeans { .. } => Algorithm::KMeans,
            Params::Agglomerative { .. } => Algorithm::Agglomerative,
            Params::Gmm { .. } => Algorithm::Gmm,
            Params::Birch { .. } => Algorithm::Birch,
        }
    }

    /// `name=value` form used in score tables.
    pub fn canonical(&self) -> String {
        match self {
            Params::KMeans { n_init } => format!("n_init={n_init}"),
            Params::Agglomerative { linkage } => format!("linkage={}", linkage.name()),
            Params::Gmm { covariance_type } => format!("covariance_type={}", covariance_type.name()),
            Params::Birch { threshold } => format!("threshold={threshold}"),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ClusteringConfig {
    pub k: usize,
    pub params: Params,
    pub seed: u64,
}

impl ClusteringConfig {
    pub fn new(k: usize, params: Params, seed: u64) -> Self {
        ClusteringConfig { k, params, seed }
    }

    pub fn algorithm(&self) -> Algorithm {
        self.params.algorithm()
    }

    /// Silhouette is defined only for `2 <= k <= n - 1`.
    pub fn validate(&self, n: usize) -> Result<()> {
        if self.k < 2 || self.k + 1 > n {
            return Err(Error::domain(format!(
                "k = {} is outside 2..={} for {n} rows",
                self.k,
                n.saturating_sub(1)
            )));
        }
        match self.params {
            Params::KMeans { n_init: 0 } => Err(Error::domain("n_init must be positive")),
            Params::Birch { threshold } if !(threshold > 0.0) => Err(Error::domain("threshold must be positive")),
            _ => Ok(()),
        }
    }
}

/// Labels from one fitted configuration, before scoring.
#[derive(Debug, Clone, PartialEq)]
pub struct Fitted {
    pub labels: Vec<usize>,
    pub note: Option<String>,
}

pub fn fit(x: &Matrix, config: &ClusteringConfig) -> Result<Fitted> {
    let k = config.k;
    let (labels, note) = match config.params {
        Params::KMeans { n_init } => (kmeans(x, k, n_init, config.seed)?.labels, None),
        Params::Agglomerative { linkage } => (agglomerative(x, k, linkage)?.labels, None),
        Params::Gmm { covariance_type } => {
            let f = gmm(x, k, covariance_type, config.seed)?;
            let note = (f.restarts > 0).then(|| format!("{} restarts", f.restarts));
            (f.labels, note)
        }
        Params::Birch { threshold } => {
            let f = birch(x, k, threshold)?;
            let note = f
                .fell_back(k)
                .then(|| format!("k reduced to {} subclusters", f.effective_k));
            (f.labels, note)
        }
    };
    Ok(Fitted { labels, note })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ClusterAssignment {
    pub config: ClusteringConfig,
    pub representation: String,
    pub labels: Vec<usize>,
    pub silhouette: f64,
    pub n_effective_clusters: usize,
    pub note: Option<String>,
}

pub(crate) fn n_distinct(labels: &[usize]) -> usize {
    crate::metrics::densify(labels).1
}
