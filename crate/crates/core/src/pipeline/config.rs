use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::analysis::Orientation;
use crate::doe::SamplingConfig;
use crate::ela::FeatureGroup;
use crate::error::{Error, Result};
use crate::mabbob::SuiteConfig;
use crate::repr::ImputePolicy;

pub const DEFAULT_MASTER_SEED: u64 = 42;

/// Whole-pipeline configuration, read from TOML.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Config {
    pub master_seed: u64,
    pub suite: SuiteConfig,
    pub sampling: SamplingConfig,
    pub features: FeaturesConfig,
    pub representations: Vec<RepresentationSource>,
    pub cluster: ClusterConfig,
    pub analysis: AnalysisConfig,
}

impl Default for Config {
    fn default() -> Self {
        Config {
            master_seed: DEFAULT_MASTER_SEED,
            suite: SuiteConfig::default(),
            sampling: SamplingConfig::default(),
            features: FeaturesConfig::default(),
            representations: Vec::new(),
            cluster: ClusterConfig::default(),
            analysis: AnalysisConfig::default(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct FeaturesConfig {
    pub groups: Vec<FeatureGroup>,
    /// Also cluster the locally computed ELA table.
    pub enabled: bool,
}

impl Default for FeaturesConfig {
    fn default() -> Self {
        FeaturesConfig {
            groups: FeatureGroup::ALL.to_vec(),
            enabled: true,
        }
    }
}

/// An externally computed representation to ingest.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RepresentationSource {
    pub name: String,
    pub path: PathBuf,
    /// Defaults to on for `ela` and off otherwise.
    #[serde(default)]
    pub standardize: Option<bool>,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ClusterConfig {
    /// Grid specification; the full search space when absent.
    pub grid: Option<String>,
    pub sample_cap: Option<usize>,
    pub impute: ImputePolicy,
    /// Overrides the standardisation default of the local ELA table.
    pub standardize_ela: Option<bool>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct AnalysisConfig {
    pub threshold: f64,
    pub top_m: usize,
    pub orientation: Orientation,
    pub performance: Vec<PathBuf>,
}

impl Default for AnalysisConfig {
    fn default() -> Self {
        AnalysisConfig {
            threshold: 0.5,
            top_m: 5,
            orientation: Orientation::Lower,
            performance: Vec::new(),
        }
    }
}

pub const ELA: &str = "ela";

/// Standardisation default: on for the ELA table, off for learned representations.
pub fn default_standardize(name: &str) -> bool {
    name == ELA
}

impl Config {
    /// Reads TOML; relative input paths resolve against the file's directory.
    pub fn load(path: &Path) -> Result<Config> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        let mut c: Config =
            toml::from_str(&text).map_err(|e| Error::Config(format!("{}: {e}", path.display())))?;
        let base = path.parent().unwrap_or(Path::new("."));
        for r in &mut c.representations {
            if r.path.is_relative() {
                r.path = base.join(&r.path);
            }
        }
        for p in &mut c.analysis.performance {
            if p.is_relative() {
                *p = base.join(&*p);
            }
        }
        c.validate()?;
        Ok(c)
    }

    pub fn validate(&self) -> Result<()> {
        let cfg = |e: Error| Error::Config(e.to_string());
        self.suite.normalized().map_err(cfg)?;
        if self.sampling.samples_per_dim == 0 {
            return Err(Error::Config("samples_per_dim must be positive".into()));
        }
        if self.features.groups.is_empty() {
            return Err(Error::Config("at least one feature group is required".into()));
        }
        let mut names: Vec<&str> = self.representations.iter().map(|r| r.name.as_str()).collect();
        if self.features.enabled {
            names.push(ELA);
        }
        for n in &names {
            if n.is_empty() || !n.chars().all(|c| c.is_ascii_alphanumeric() || c == '_' || c == '-') {
                return Err(Error::Config(format!("representation name '{n}' must be [A-Za-z0-9_-]+")));
            }
        }
        let mut sorted = names.clone();
        sorted.sort_unstable();
        sorted.dedup();
        if sorted.len() != names.len() {
            return Err(Error::Config("representation names must be unique".into()));
        }
        crate::cluster::parse_grid(self.grid_spec(), self.master_seed).map_err(cfg)?;
        if !(self.analysis.threshold > 0.0 && self.analysis.threshold <= 1.0) {
            return Err(Error::Config("analysis.threshold must lie in (0, 1]".into()));
        }
        Ok(())
    }

    pub fn grid_spec(&self) -> &str {
        self.cluster.grid.as_deref().unwrap_or(crate::cluster::DEFAULT_GRID)
    }

    /// Representation names in processing order: ELA first, then ingested ones.
    pub fn representation_names(&self) -> Vec<String> {
        let mut v = Vec::new();
        if self.features.enabled {
            v.push(ELA.to_string());
        }
        v.extend(self.representations.iter().map(|r| r.name.clone()));
        v
    }

    pub fn standardize(&self, name: &str) -> bool {
        if name == ELA {
            if let Some(s) = self.cluster.standardize_ela {
                return s;
            }
        }
        self.representations
            .iter()
            .find(|r| r.name == name)
            .and_then(|r| r.standardize)
            .unwrap_or_else(|| default_standardize(name))
    }
}
