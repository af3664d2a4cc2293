//! End-to-end orchestration: configuration, resumable stages and run manifests.
//!
//! Every stage records a fingerprint of its parameters and input hashes plus
//! the SHA-256 of each file it writes. A stage whose fingerprint and outputs
//! are unchanged is skipped unless forced.

mod commands;
mod config;

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

pub use commands::BestSummary;
pub use config::{
    default_standardize, AnalysisConfig, ClusterConfig, Config, FeaturesConfig, RepresentationSource,
    DEFAULT_MASTER_SEED, ELA,
};

use crate::error::{Error, Result};
use crate::repr::PreprocessRecord;

pub const RUN_MANIFEST: &str = "run_manifest.json";
pub const TOOL_VERSION: &str = env!("CARGO_PKG_VERSION");

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct StageRecord {
    pub fingerprint: String,
    /// Output path (relative to the run directory) to SHA-256.
    pub outputs: BTreeMap<String, String>,
    /// Outputs whose content legitimately varies between runs, e.g. timings.
    pub volatile: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunManifest {
    pub tool_version: String,
    pub config: Config,
    pub bounds: Vec<(f64, f64)>,
    pub grid: String,
    pub preprocessing: BTreeMap<String, PreprocessRecord>,
    pub stages: BTreeMap<String, StageRecord>,
}

impl RunManifest {
    fn new(config: &Config) -> Self {
        RunManifest {
            tool_version: TOOL_VERSION.to_string(),
            config: config.clone(),
            bounds: crate::doe::default_bounds(config.suite.dim),
            grid: config.grid_spec().to_string(),
            preprocessing: BTreeMap::new(),
            stages: BTreeMap::new(),
        }
    }

    /// Hashes of every deterministic artifact across all stages.
    pub fn artifacts(&self) -> BTreeMap<String, String> {
        self.stages
            .values()
            .flat_map(|s| s.outputs.iter().map(|(k, v)| (k.clone(), v.clone())))
            .collect()
    }

    pub fn read(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Ok(serde_json::from_str(&text)?)
    }

    fn write(&self, path: &Path) -> Result<()> {
        let text = serde_json::to_string_pretty(self)?;
        std::fs::write(path, text + "\n").map_err(|e| Error::io(path, e))
    }
}

pub fn sha256_file(path: &Path) -> Result<String> {
    let bytes = std::fs::read(path).map_err(|e| Error::io(path, e))?;
    Ok(hex::encode(Sha256::digest(&bytes)))
}

/// What a stage reports back to the caller.
#[derive(Debug, Clone, PartialEq)]
pub struct Report {
    pub stage: String,
    pub skipped: bool,
    pub lines: Vec<String>,
}

#[derive(Default)]
pub(crate) struct StageOutput {
    pub files: Vec<String>,
    pub volatile: Vec<String>,
    pub lines: Vec<String>,
    pub preprocessing: Option<(String, PreprocessRecord)>,
}

/// A run directory bound to a configuration.
pub struct Pipeline {
    out_dir: PathBuf,
    config: Config,
    force: bool,
    run: RunManifest,
}

impl Pipeline {
    pub fn open(out_dir: &Path, config: Config, force: bool) -> Result<Self> {
        config.validate()?;
        std::fs::create_dir_all(out_dir).map_err(|e| Error::io(out_dir, e))?;
        let path = out_dir.join(RUN_MANIFEST);
        let mut run = if path.exists() {
            RunManifest::read(&path)?
        } else {
            RunManifest::new(&config)
        };
        let fresh = RunManifest::new(&config);
        run.tool_version = fresh.tool_version;
        run.config = fresh.config;
        run.bounds = fresh.bounds;
        run.grid = fresh.grid;
        Ok(Pipeline {
            out_dir: out_dir.to_path_buf(),
            config,
            force,
            run,
        })
    }

    pub fn config(&self) -> &Config {
        &self.config
    }

    pub fn out_dir(&self) -> &Path {
        &self.out_dir
    }

    pub fn run_manifest(&self) -> &RunManifest {
        &self.run
    }

    pub(crate) fn path(&self, rel: &str) -> PathBuf {
        self.out_dir.join(rel)
    }

    pub(crate) fn ensure_dir(&self, rel: &str) -> Result<()> {
        let p = self.path(rel);
        std::fs::create_dir_all(&p).map_err(|e| Error::io(p, e))
    }

    /// Hash of a file the stage reads, failing with a hint when it is absent.
    pub(crate) fn input_hash(&self, path: &Path, hint: &str) -> Result<String> {
        if !path.exists() {
            return Err(Error::data(format!("{} is missing; {hint}", path.display())));
        }
        sha256_file(path)
    }

    fn up_to_date(&self, name: &str, fingerprint: &str) -> bool {
        let Some(rec) = self.run.stages.get(name) else {
            return false;
        };
        rec.fingerprint == fingerprint
            && rec
                .outputs
                .iter()
                .all(|(rel, hash)| sha256_file(&self.path(rel)).is_ok_and(|h| &h == hash))
            && rec.volatile.iter().all(|rel| self.path(rel).exists())
    }

    pub(crate) fn stage<F>(
        &mut self,
        name: &str,
        params: serde_json::Value,
        inputs: BTreeMap<String, String>,
        body: F,
    ) -> Result<Report>
    where
        F: FnOnce(&Pipeline) -> Result<StageOutput>,
    {
        let fingerprint = hex::encode(Sha256::digest(
            serde_json::to_string(&serde_json::json!({
                "stage": name,
                "version": TOOL_VERSION,
                "params": params,
                "inputs": inputs,
            }))?
            .as_bytes(),
        ));
        if !self.force && self.up_to_date(name, &fingerprint) {
            log::info!("{name}: up to date");
            return Ok(Report {
                stage: name.to_string(),
                skipped: true,
                lines: vec![format!("{name}: up to date, reusing existing artifacts")],
            });
        }
        let out = body(self)?;
        let mut outputs = BTreeMap::new();
        for rel in &out.files {
            outputs.insert(rel.clone(), sha256_file(&self.path(rel))?);
        }
        if let Some((rep, record)) = out.preprocessing {
            self.run.preprocessing.insert(rep, record);
        }
        self.run.stages.insert(
            name.to_string(),
            StageRecord {
                fingerprint,
                outputs,
                volatile: out.volatile,
            },
        );
        self.run.write(&self.path(RUN_MANIFEST))?;
        Ok(Report {
            stage: name.to_string(),
            skipped: false,
            lines: out.lines,
        })
    }

    /// Every stage except raw sample dumps, in dependency order.
    pub fn run_all(&mut self) -> Result<Vec<Report>> {
        let mut reports = vec![self.generate()?];
        if self.config.features.enabled {
            reports.push(self.features()?);
        }
        reports.extend(self.ingest(None)?);
        reports.extend(self.cluster(None)?);
        reports.push(self.analyze()?);
        reports.push(self.export_viz()?);
        Ok(reports)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ReplayReport {
    pub checked: usize,
    /// `(artifact, recorded hash, replayed hash)`.
    pub mismatches: Vec<(String, String, String)>,
}

/// Re-executes the run recorded in `manifest` into `out_dir` and compares artifact hashes.
pub fn replay(manifest: &Path, out_dir: &Path) -> Result<ReplayReport> {
    let recorded = RunManifest::read(manifest)?;
    let mut p = Pipeline::open(out_dir, recorded.config.clone(), true)?;
    p.run_all()?;
    if recorded.stages.contains_key("sample") {
        p.sample()?;
    }
    let now = p.run_manifest().artifacts();
    let expected = recorded.artifacts();
    let mut mismatches = Vec::new();
    for (rel, hash) in &expected {
        let got = now.get(rel).cloned().unwrap_or_else(|| "missing".into());
        if &got != hash {
            mismatches.push((rel.clone(), hash.clone(), got));
        }
    }
    Ok(ReplayReport {
        checked: expected.len(),
        mismatches,
    })
}

/// Runs `f` on a worker pool of `jobs` threads, or the global pool when `None`.
pub fn with_jobs<T: Send>(jobs: Option<usize>, f: impl FnOnce() -> T + Send) -> Result<T> {
    #[cfg(feature = "parallel")]
    if let Some(n) = jobs {
        let pool = rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build()
            .map_err(|e| Error::Config(format!("cannot start {n} workers: {e}")))?;
        return Ok(pool.install(f));
    }
    #[cfg(not(feature = "parallel"))]
    let _ = jobs;
    Ok(f())
}
