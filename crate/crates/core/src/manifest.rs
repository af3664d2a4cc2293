//! Suite manifest: one record per generated problem, keying every downstream table.

use std::collections::HashMap;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::bbob::make_problem;
use crate::doe::{default_bounds, design_seed, lhs, shared_design_seed, DesignMatrix, SamplingConfig};
use crate::error::{Error, Result};
use crate::mabbob::{generate_suite, AffineProblem, ProblemKey, SuiteConfig, CLAMP_EPS};

/// Key columns written at the front of every per-problem CSV.
pub const KEY_COLUMNS: [&str; 5] = ["combo_index", "class_i", "class_j", "instance", "alpha"];

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct SeedBundle {
    /// BBOB instance seeds of the two operands.
    pub first: i64,
    pub second: i64,
    pub design: u64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ManifestRecord {
    pub row: usize,
    pub combo_index: usize,
    pub class_i: u8,
    pub class_j: u8,
    pub instance: u32,
    pub alpha: f64,
    pub dim: usize,
    pub seeds: SeedBundle,
}

impl ManifestRecord {
    pub fn key(&self) -> ProblemKey {
        ProblemKey::new(self.class_i, self.class_j, self.instance, self.alpha)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SuiteManifest {
    pub suite: SuiteConfig,
    pub sampling: SamplingConfig,
    pub bounds: Vec<(f64, f64)>,
    pub master_seed: u64,
    pub clamp_eps: f64,
    pub records: Vec<ManifestRecord>,
}

impl SuiteManifest {
    pub fn build(suite: &SuiteConfig, sampling: &SamplingConfig, master_seed: u64) -> Result<Self> {
        let suite = suite.normalized()?;
        let entries = generate_suite(&suite)?;
        let records = entries
            .iter()
            .map(|e| {
                let (class_i, class_j) = e.problem.combo_key();
                let (instance, alpha) = e.problem.variant_key();
                let design = if sampling.shared_design {
                    shared_design_seed(master_seed)
                } else {
                    design_seed(e.combo_index, instance, alpha, master_seed)
                };
                ManifestRecord {
                    row: e.row,
                    combo_index: e.combo_index,
                    class_i,
                    class_j,
                    instance,
                    alpha,
                    dim: suite.dim,
                    seeds: SeedBundle {
                        first: e.problem.first().seed(),
                        second: e.problem.second().seed(),
                        design,
                    },
                }
            })
            .collect();
        Ok(SuiteManifest {
            bounds: default_bounds(suite.dim),
            suite,
            sampling: sampling.clone(),
            master_seed,
            clamp_eps: CLAMP_EPS,
            records,
        })
    }

    pub fn len(&self) -> usize {
        self.records.len()
    }

    pub fn is_empty(&self) -> bool {
        self.records.is_empty()
    }

    pub fn keys(&self) -> Vec<ProblemKey> {
        self.records.iter().map(ManifestRecord::key).collect()
    }

    /// Ordered class pairs in combo-index order.
    pub fn combinations(&self) -> Vec<(u8, u8)> {
        self.suite.combinations()
    }

    pub fn variants_per_combination(&self) -> usize {
        self.suite.variants_per_combination()
    }

    pub fn row_index(&self) -> HashMap<ProblemKey, usize> {
        self.records.iter().map(|r| (r.key(), r.row)).collect()
    }

    pub fn problem(&self, row: usize) -> Result<AffineProblem> {
        let r = self.record(row)?;
        AffineProblem::new(
            make_problem(r.class_i, r.instance, r.dim)?,
            make_problem(r.class_j, r.instance, r.dim)?,
            r.alpha,
        )
    }

    pub fn design(&self, row: usize) -> Result<DesignMatrix> {
        let r = self.record(row)?;
        lhs(
            self.sampling.sample_size(r.dim),
            r.dim,
            &self.bounds,
            r.seeds.design,
            self.sampling.placement,
        )
    }

    fn record(&self, row: usize) -> Result<&ManifestRecord> {
        self.records
            .get(row)
            .ok_or_else(|| Error::domain(format!("row {row} is not in the manifest")))
    }

    pub fn write(&self, path: &Path) -> Result<()> {
        let text = serde_json::to_string_pretty(self)?;
        std::fs::write(path, text + "\n").map_err(|e| Error::io(path, e))
    }

    pub fn read(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        let m: SuiteManifest = serde_json::from_str(&text)?;
        let rebuilt = SuiteManifest::build(&m.suite, &m.sampling, m.master_seed)?;
        if rebuilt.records != m.records {
            return Err(Error::data(format!(
                "{} does not match the suite its configuration generates",
                path.display()
            )));
        }
        Ok(m)
    }

    /// The five key fields of `row` as CSV cells.
    pub fn key_cells(&self, row: usize) -> [String; 5] {
        let r = &self.records[row];
        [
            r.combo_index.to_string(),
            r.class_i.to_string(),
            r.class_j.to_string(),
            r.instance.to_string(),
            r.alpha.to_string(),
        ]
    }
}

/// Float cell: shortest round-trip decimal, `NaN` for missing values.
pub fn format_cell(v: f64) -> String {
    if v.is_nan() {
        "NaN".to_string()
    } else {
        v.to_string()
    }
}

/// Writes `header` then one line per row, keyed by manifest order.
pub(crate) fn write_keyed_csv(
    path: &Path,
    manifest: &SuiteManifest,
    columns: &[String],
    mut cells: impl FnMut(usize) -> Vec<String>,
) -> Result<()> {
    let mut w = csv::Writer::from_path(path)?;
    let header: Vec<&str> = KEY_COLUMNS.iter().copied().chain(columns.iter().map(String::as_str)).collect();
    w.write_record(&header)?;
    for row in 0..manifest.len() {
        let mut rec: Vec<String> = manifest.key_cells(row).to_vec();
        rec.extend(cells(row));
        w.write_record(&rec)?;
    }
    w.flush().map_err(|e| Error::io(path, e))
}

/// Locates the key columns in a header; `combo_index` is optional.
pub(crate) struct KeyColumns {
    class_i: usize,
    class_j: usize,
    instance: usize,
    alpha: usize,
    pub all: Vec<usize>,
}

impl KeyColumns {
    pub fn find(header: &csv::StringRecord, path: &Path) -> Result<Self> {
        let pos = |name: &str| header.iter().position(|h| h.trim() == name);
        let need = |name: &str| {
            pos(name).ok_or_else(|| Error::data(format!("{}: missing key column '{name}'", path.display())))
        };
        let class_i = need("class_i")?;
        let class_j = need("class_j")?;
        let instance = need("instance")?;
        let alpha = need("alpha")?;
        let mut all = vec![class_i, class_j, instance, alpha];
        all.extend(pos("combo_index"));
        Ok(KeyColumns {
            class_i,
            class_j,
            instance,
            alpha,
            all,
        })
    }

    pub fn parse(&self, rec: &csv::StringRecord, line: u64, path: &Path) -> Result<ProblemKey> {
        let bad = |col: &str| Error::data(format!("{}: line {line}: invalid {col}", path.display()));
        let cell = |i: usize| rec.get(i).unwrap_or("").trim();
        Ok(ProblemKey::new(
            cell(self.class_i).parse().map_err(|_| bad("class_i"))?,
            cell(self.class_j).parse().map_err(|_| bad("class_j"))?,
            cell(self.instance).parse().map_err(|_| bad("instance"))?,
            cell(self.alpha).parse().map_err(|_| bad("alpha"))?,
        ))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn reduced() -> SuiteConfig {
        SuiteConfig {
            classes: vec![1, 2, 3],
            instances: vec![1, 2],
            alphas: vec![0.5],
            dim: 4,
        }
    }

    #[test]
    fn records_follow_suite_order() {
        let m = SuiteManifest::build(&reduced(), &SamplingConfig::default(), 7).unwrap();
        assert_eq!(m.len(), 12);
        assert_eq!(m.combinations().len(), 6);
        assert!(m.keys().windows(2).all(|w| w[0] < w[1]));
        assert_eq!(m.records[2].combo_index, 1);
        assert_eq!(m.design(3).unwrap().n_samples(), 200);
    }

    #[test]
    fn shared_designs_share_the_seed() {
        let sampling = SamplingConfig {
            shared_design: true,
            ..SamplingConfig::default()
        };
        let m = SuiteManifest::build(&reduced(), &sampling, 7).unwrap();
        assert!(m.records.iter().all(|r| r.seeds.design == m.records[0].seeds.design));
    }

    #[test]
    fn roundtrip_and_tamper_detection() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("m.json");
        let m = SuiteManifest::build(&reduced(), &SamplingConfig::default(), 7).unwrap();
        m.write(&path).unwrap();
        assert_eq!(SuiteManifest::read(&path).unwrap(), m);
        let mut bad = m.clone();
        bad.records[0].seeds.design += 1;
        bad.write(&path).unwrap();
        assert!(matches!(SuiteManifest::read(&path), Err(Error::Data(_))));
    }
}
