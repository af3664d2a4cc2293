//! The individual pipeline stages.

use std::collections::BTreeMap;
use std::path::Path;

use serde::{Deserialize, Serialize};
use serde_json::json;

use super::{sha256_file, Pipeline, Report, StageOutput, ELA};
use crate::analysis::{
    combo_alignment, coverage, cross_similarity, overlap_report, perf_alignment, CoverageMatrix, PerformanceTable,
};
use crate::cluster::{
    grid_search, parse_grid, read_assignment_csv, write_assignment_csv, write_scores_csv, write_timings_csv,
    GridOptions,
};
use crate::doe::{evaluate_design, write_sample_csv};
use crate::ela::{catalog, compute_features, write_catalog, ElaOptions, FeatureStatus};
use crate::error::{Error, Result};
use crate::manifest::{format_cell, write_keyed_csv, SuiteManifest, KEY_COLUMNS};
use crate::matrix::par_map;
use crate::repr::{ingest_csv, preprocess};

const MANIFEST: &str = "manifest.json";

/// Best configuration of one representation, as written next to its assignment.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BestSummary {
    pub representation: String,
    pub algorithm: String,
    pub params: String,
    pub k: usize,
    pub seed: u64,
    pub silhouette: f64,
    pub n_effective_clusters: usize,
    pub note: Option<String>,
    pub n_rows: usize,
    pub dim: usize,
    pub cells: usize,
    pub failed_cells: usize,
}

fn write_json<T: Serialize>(path: &Path, value: &T) -> Result<()> {
    let text = serde_json::to_string_pretty(value)?;
    std::fs::write(path, text + "\n").map_err(|e| Error::io(path, e))
}

fn read_json<T: for<'de> Deserialize<'de>>(path: &Path) -> Result<T> {
    let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    Ok(serde_json::from_str(&text)?)
}

fn copy(from: &Path, to: &Path) -> Result<()> {
    std::fs::copy(from, to).map(|_| ()).map_err(|e| Error::io(from, e))
}

fn inputs(list: Vec<(String, String)>) -> BTreeMap<String, String> {
    list.into_iter().collect()
}

impl Pipeline {
    fn manifest_input(&self) -> Result<(String, String)> {
        let hash = self.input_hash(&self.path(MANIFEST), "run `generate` first")?;
        Ok((MANIFEST.to_string(), hash))
    }

    fn load_manifest(&self) -> Result<SuiteManifest> {
        SuiteManifest::read(&self.path(MANIFEST))
    }

    /// Source table of a representation inside the run directory.
    fn source_rel(name: &str) -> String {
        if name == ELA {
            "features/ela.csv".into()
        } else {
            format!("representations/{name}.csv")
        }
    }

    fn selected(&self, names: Option<&[String]>, pool: Vec<String>) -> Result<Vec<String>> {
        match names {
            None => Ok(pool),
            Some(sel) => {
                let unknown: Vec<&String> = sel.iter().filter(|n| !pool.contains(n)).collect();
                if !unknown.is_empty() {
                    return Err(Error::Config(format!(
                        "unknown representation(s) {unknown:?}; configured: {pool:?}"
                    )));
                }
                Ok(pool.into_iter().filter(|n| sel.contains(n)).collect())
            }
        }
    }

    pub fn generate(&mut self) -> Result<Report> {
        let c = self.config().clone();
        let params = json!({"suite": c.suite, "sampling": c.sampling, "master_seed": c.master_seed});
        self.stage("generate", params, BTreeMap::new(), |p| {
            let m = SuiteManifest::build(&c.suite, &c.sampling, c.master_seed)?;
            m.write(&p.path(MANIFEST))?;
            Ok(StageOutput {
                files: vec![MANIFEST.into()],
                lines: vec![format!(
                    "generated {} problems: {} combinations x {} variants, d = {}",
                    m.len(),
                    m.combinations().len(),
                    m.variants_per_combination(),
                    m.suite.dim
                )],
                ..Default::default()
            })
        })
    }

    /// Raw design points and objective values per problem.
    pub fn sample(&mut self) -> Result<Report> {
        let ins = inputs(vec![self.manifest_input()?]);
        self.stage("sample", json!({}), ins, |p| {
            let m = p.load_manifest()?;
            p.ensure_dir("samples")?;
            let files = par_map(m.len(), |row| {
                let rel = format!("samples/row_{row:05}.csv");
                let design = m.design(row)?;
                let y = evaluate_design(&m.problem(row)?, &design)?;
                write_sample_csv(&p.path(&rel), &design, &y)?;
                Ok(rel)
            })
            .into_iter()
            .collect::<Result<Vec<_>>>()?;
            Ok(StageOutput {
                lines: vec![format!("wrote {} sample files", files.len())],
                files,
                ..Default::default()
            })
        })
    }

    pub fn features(&mut self) -> Result<Report> {
        let groups = self.config().features.groups.clone();
        let seed = self.config().master_seed;
        let ins = inputs(vec![self.manifest_input()?]);
        self.stage("features", json!({"groups": groups, "seed": seed}), ins, |p| {
            let m = p.load_manifest()?;
            let options = ElaOptions { groups: groups.clone(), seed };
            let entries = catalog(&groups);
            let done = std::sync::atomic::AtomicUsize::new(0);
            let rows = par_map(m.len(), |row| {
                let design = m.design(row)?;
                let y = evaluate_design(&m.problem(row)?, &design)?;
                let fv = compute_features(&design, &y, &options)?;
                let n = done.fetch_add(1, std::sync::atomic::Ordering::Relaxed) + 1;
                if n % 500 == 0 || n == m.len() {
                    log::info!("features: {n}/{} problems", m.len());
                }
                Ok(fv)
            })
            .into_iter()
            .collect::<Result<Vec<_>>>()?;
            p.ensure_dir("features")?;
            let names: Vec<String> = entries.iter().map(|e| e.name.clone()).collect();
            write_keyed_csv(&p.path("features/ela.csv"), &m, &names, |row| {
                rows[row].values.iter().map(|v| format_cell(*v)).collect()
            })?;
            write_catalog(&p.path("features/catalog.json"), &entries)?;

            let mut per_feature = vec![0usize; names.len()];
            for fv in &rows {
                for (c, f) in fv.flags.iter().enumerate() {
                    if *f == FeatureStatus::Degenerate {
                        per_feature[c] += 1;
                    }
                }
            }
            let mut w = csv::Writer::from_path(p.path("features/degenerate.csv"))?;
            w.write_record(["feature", "degenerate_rows"])?;
            for (n, c) in names.iter().zip(&per_feature) {
                w.write_record([n.clone(), c.to_string()])?;
            }
            w.flush().map_err(|e| Error::io(p.path("features/degenerate.csv"), e))?;

            let cells: usize = per_feature.iter().sum();
            let affected = per_feature.iter().filter(|c| **c > 0).count();
            let mut lines = vec![format!(
                "computed {} features for {} problems; {cells} degenerate cells in {affected} features",
                names.len(),
                rows.len()
            )];
            for (n, c) in names.iter().zip(&per_feature).filter(|(_, c)| **c > 0) {
                lines.push(format!("  {n}: {c} degenerate rows"));
            }
            Ok(StageOutput {
                files: vec![
                    "features/ela.csv".into(),
                    "features/catalog.json".into(),
                    "features/degenerate.csv".into(),
                ],
                lines,
                ..Default::default()
            })
        })
    }

    /// Copies external representation tables into the run, keyed and in manifest order.
    pub fn ingest(&mut self, names: Option<&[String]>) -> Result<Vec<Report>> {
        let pool = self.config().representations.iter().map(|r| r.name.clone()).collect();
        let mut reports = Vec::new();
        for name in self.selected(names, pool)? {
            let src = self
                .config()
                .representations
                .iter()
                .find(|r| r.name == name)
                .expect("selected from config")
                .path
                .clone();
            let ins = inputs(vec![
                self.manifest_input()?,
                (src.display().to_string(), self.input_hash(&src, "check the representation path")?),
            ]);
            let stage = format!("ingest:{name}");
            reports.push(self.stage(&stage, json!({"name": name}), ins, |p| {
                let m = p.load_manifest()?;
                let r = ingest_csv(&src, &name, &m)?;
                p.ensure_dir("representations")?;
                let rel = Pipeline::source_rel(&name);
                r.write_csv(&p.path(&rel), &m)?;
                let missing = r.values.values().iter().filter(|v| !v.is_finite()).count();
                Ok(StageOutput {
                    files: vec![rel],
                    lines: vec![format!(
                        "{name}: {} rows x {} columns, {missing} missing cells",
                        r.n_rows(),
                        r.dim()
                    )],
                    ..Default::default()
                })
            })?);
        }
        Ok(reports)
    }

    /// Preprocesses each representation and runs the grid search on it.
    pub fn cluster(&mut self, names: Option<&[String]>) -> Result<Vec<Report>> {
        let pool = self.config().representation_names();
        let mut reports = Vec::new();
        for name in self.selected(names, pool)? {
            let c = self.config().clone();
            let src_rel = Pipeline::source_rel(&name);
            let hint = if name == ELA { "run `features` first" } else { "run `ingest` first" };
            let ins = inputs(vec![
                self.manifest_input()?,
                (src_rel.clone(), self.input_hash(&self.path(&src_rel), hint)?),
            ]);
            let standardize = c.standardize(&name);
            let params = json!({
                "grid": c.grid_spec(),
                "seed": c.master_seed,
                "sample_cap": c.cluster.sample_cap,
                "impute": c.cluster.impute,
                "standardize": standardize,
            });
            let stage = format!("cluster:{name}");
            reports.push(self.stage(&stage, params, ins, |p| {
                let m = p.load_manifest()?;
                let raw = ingest_csv(&p.path(&src_rel), &name, &m)?;
                let processed = preprocess(&raw, c.cluster.impute, standardize)?;
                let record = processed.preprocessing.clone().expect("preprocess records itself");
                p.ensure_dir("processed")?;
                p.ensure_dir("clusters")?;
                let proc_rel = format!("processed/{name}.csv");
                let rec_rel = format!("processed/{name}_preprocess.json");
                processed.write_csv(&p.path(&proc_rel), &m)?;
                write_json(&p.path(&rec_rel), &record)?;

                let grid = parse_grid(c.grid_spec(), c.master_seed)?;
                let options = GridOptions {
                    sample_cap: c.cluster.sample_cap,
                    sample_seed: c.master_seed,
                };
                let outcome = grid_search(&processed.values, &grid, &name, &options)?;
                let scores_rel = format!("clusters/{name}_scores.csv");
                let timings_rel = format!("clusters/{name}_timings.csv");
                let assign_rel = format!("clusters/{name}_assignment.csv");
                let best_rel = format!("clusters/{name}_best.json");
                write_scores_csv(&p.path(&scores_rel), &outcome.scores)?;
                write_timings_csv(&p.path(&timings_rel), &outcome.scores)?;
                write_assignment_csv(&p.path(&assign_rel), &m, &outcome.best.labels)?;
                let b = &outcome.best;
                let failed = outcome.scores.iter().filter(|r| r.status != "ok").count();
                let summary = BestSummary {
                    representation: name.clone(),
                    algorithm: b.config.algorithm().name().to_string(),
                    params: b.config.params.canonical(),
                    k: b.config.k,
                    seed: b.config.seed,
                    silhouette: b.silhouette,
                    n_effective_clusters: b.n_effective_clusters,
                    note: b.note.clone(),
                    n_rows: processed.n_rows(),
                    dim: processed.dim(),
                    cells: grid.len(),
                    failed_cells: failed,
                };
                write_json(&p.path(&best_rel), &summary)?;
                let total_ms: u64 = outcome.scores.iter().map(|r| r.wall_time_ms).sum();
                let mut lines = vec![format!(
                    "{name}: best {} {} k={} silhouette={:.6} ({} of {} cells scored, {total_ms} ms cell time)",
                    summary.algorithm,
                    summary.params,
                    summary.k,
                    summary.silhouette,
                    grid.len() - failed,
                    grid.len()
                )];
                if let Some(note) = &summary.note {
                    lines.push(format!("  note: {note}"));
                }
                for d in &record.dropped_columns {
                    lines.push(format!("  dropped column {}: {}", d.name, d.reason));
                }
                Ok(StageOutput {
                    files: vec![proc_rel, rec_rel, scores_rel, assign_rel, best_rel],
                    volatile: vec![timings_rel],
                    lines,
                    preprocessing: Some((name.clone(), record)),
                })
            })?);
        }
        Ok(reports)
    }

    /// Representations with a finished clustering, in configuration order.
    fn clustered(&self) -> Vec<String> {
        self.config()
            .representation_names()
            .into_iter()
            .filter(|n| self.path(&format!("clusters/{n}_assignment.csv")).exists())
            .collect()
    }

    pub fn analyze(&mut self) -> Result<Report> {
        let reps = self.clustered();
        if reps.is_empty() {
            return Err(Error::data("no cluster assignments found; run `cluster` first"));
        }
        for n in self.config().representation_names() {
            if !reps.contains(&n) {
                log::warn!("analyze: {n} has no assignment and is left out");
            }
        }
        let c = self.config().clone();
        let mut ins = vec![self.manifest_input()?];
        for n in &reps {
            for rel in [format!("clusters/{n}_assignment.csv"), format!("clusters/{n}_best.json")] {
                let h = self.input_hash(&self.path(&rel), "run `cluster` first")?;
                ins.push((rel, h));
            }
        }
        for perf in &c.analysis.performance {
            ins.push((perf.display().to_string(), self.input_hash(perf, "check analysis.performance")?));
        }
        let params = json!({
            "threshold": c.analysis.threshold,
            "top_m": c.analysis.top_m,
            "orientation": c.analysis.orientation,
            "representations": reps,
        });
        self.stage("analyze", params, inputs(ins), |p| {
            let m = p.load_manifest()?;
            p.ensure_dir("analysis")?;
            let mut files = Vec::new();
            let mut lines = Vec::new();
            let mut labels = Vec::new();
            let mut covs: Vec<CoverageMatrix> = Vec::new();

            let mut w = csv::Writer::from_path(p.path("analysis/summary.csv"))?;
            w.write_record([
                "representation",
                "algorithm",
                "params",
                "k",
                "silhouette",
                "n_effective_clusters",
                "homogeneity",
                "completeness",
                "v_measure",
            ])?;
            for n in &reps {
                let l = read_assignment_csv(&p.path(&format!("clusters/{n}_assignment.csv")), &m)?;
                let best: BestSummary = read_json(&p.path(&format!("clusters/{n}_best.json")))?;
                let cov = coverage(n, &l, &m)?;
                let rel = format!("analysis/coverage_{n}.csv");
                cov.write_csv(&p.path(&rel))?;
                files.push(rel);
                let h = combo_alignment(&l, &m)?;
                w.write_record([
                    n.clone(),
                    best.algorithm.clone(),
                    best.params.clone(),
                    best.k.to_string(),
                    best.silhouette.to_string(),
                    best.n_effective_clusters.to_string(),
                    h.homogeneity.to_string(),
                    h.completeness.to_string(),
                    h.v_measure.to_string(),
                ])?;
                lines.push(format!(
                    "{n}: {} {} k={} silhouette={:.6}; against combinations h={:.4} c={:.4} v={:.4}",
                    best.algorithm, best.params, best.k, best.silhouette, h.homogeneity, h.completeness, h.v_measure
                ));
                labels.push(l);
                covs.push(cov);
            }
            w.flush().map_err(|e| Error::io(p.path("analysis/summary.csv"), e))?;
            files.push("analysis/summary.csv".into());

            for a in 0..reps.len() {
                for b in a + 1..reps.len() {
                    let stem = format!("{}__{}", reps[a], reps[b]);
                    let s = cross_similarity(&covs[a], &covs[b])?;
                    let overlaps = overlap_report(&s, &covs[a], &covs[b], c.analysis.threshold, c.analysis.top_m)?;
                    let sim_rel = format!("analysis/similarity_{stem}.csv");
                    let order_rel = format!("analysis/similarity_{stem}_order.json");
                    let overlap_rel = format!("analysis/overlap_{stem}.json");
                    s.write_csv(&p.path(&sim_rel))?;
                    write_json(&p.path(&order_rel), &s.order)?;
                    write_json(&p.path(&overlap_rel), &overlaps)?;
                    lines.push(format!(
                        "{} vs {}: {} cluster pairs with similarity >= {}",
                        reps[a],
                        reps[b],
                        overlaps.len(),
                        c.analysis.threshold
                    ));
                    files.extend([sim_rel, order_rel, overlap_rel]);
                }
            }

            if !c.analysis.performance.is_empty() {
                let keys = m.keys();
                let rel = "analysis/performance_alignment.csv";
                let mut w = csv::Writer::from_path(p.path(rel))?;
                w.write_record(["representation", "portfolio", "homogeneity", "completeness", "v_measure"])?;
                for path in &c.analysis.performance {
                    for table in PerformanceTable::read_csv(path, c.analysis.orientation)? {
                        for (n, l) in reps.iter().zip(&labels) {
                            let h = perf_alignment(l, &keys, &table)?;
                            w.write_record([
                                n.clone(),
                                table.portfolio.clone(),
                                h.homogeneity.to_string(),
                                h.completeness.to_string(),
                                h.v_measure.to_string(),
                            ])?;
                            lines.push(format!(
                                "{n} vs best {} configuration: h={:.4} c={:.4} v={:.4}",
                                table.portfolio, h.homogeneity, h.completeness, h.v_measure
                            ));
                        }
                    }
                }
                w.flush().map_err(|e| Error::io(p.path(rel), e))?;
                files.push(rel.into());
            }
            Ok(StageOutput {
                files,
                lines,
                ..Default::default()
            })
        })
    }

    /// Collects matrices, labels, ground truth and similarities into `viz/`.
    pub fn export_viz(&mut self) -> Result<Report> {
        let reps = self.clustered();
        let mut needed: Vec<String> = vec![MANIFEST.into()];
        for n in &reps {
            needed.push(format!("processed/{n}.csv"));
            needed.push(format!("clusters/{n}_assignment.csv"));
            needed.push(format!("clusters/{n}_best.json"));
        }
        for a in 0..reps.len() {
            for b in a + 1..reps.len() {
                needed.push(format!("analysis/similarity_{}__{}.csv", reps[a], reps[b]));
                needed.push(format!("analysis/similarity_{}__{}_order.json", reps[a], reps[b]));
            }
        }
        let missing: Vec<&String> = needed.iter().filter(|r| !self.path(r).exists()).collect();
        if reps.is_empty() || !missing.is_empty() {
            let list = if reps.is_empty() {
                "cluster assignments".to_string()
            } else {
                missing.iter().map(|s| s.as_str()).collect::<Vec<_>>().join(", ")
            };
            return Err(Error::data(format!("cannot export the viz bundle; missing: {list}")));
        }
        let mut ins = Vec::new();
        for rel in &needed {
            ins.push((rel.clone(), sha256_file(&self.path(rel))?));
        }
        self.stage("export-viz", json!({"representations": reps}), inputs(ins), |p| {
            let m = p.load_manifest()?;
            for d in ["viz/representations", "viz/labels", "viz/similarity"] {
                p.ensure_dir(d)?;
            }
            let mut rels: Vec<String> = Vec::new();
            let mut rep_entries = Vec::new();
            for n in &reps {
                let matrix = format!("representations/{n}.csv");
                let labels = format!("labels/{n}.csv");
                copy(&p.path(&format!("processed/{n}.csv")), &p.path(&format!("viz/{matrix}")))?;
                copy(
                    &p.path(&format!("clusters/{n}_assignment.csv")),
                    &p.path(&format!("viz/{labels}")),
                )?;
                let best: BestSummary = read_json(&p.path(&format!("clusters/{n}_best.json")))?;
                rep_entries.push(json!({
                    "name": n,
                    "matrix": matrix,
                    "labels": labels,
                    "n_rows": best.n_rows,
                    "dim": best.dim,
                    "algorithm": best.algorithm,
                    "params": best.params,
                    "k": best.k,
                    "silhouette": best.silhouette,
                }));
                rels.extend([matrix, labels]);
            }
            let gt = "ground_truth.csv";
            write_keyed_csv(&p.path(&format!("viz/{gt}")), &m, &["combination".into()], |row| {
                let r = &m.records[row];
                vec![format!("f{}+f{}", r.class_i, r.class_j)]
            })?;
            rels.push(gt.into());
            let mut sims = Vec::new();
            for a in 0..reps.len() {
                for b in a + 1..reps.len() {
                    let stem = format!("{}__{}", reps[a], reps[b]);
                    let matrix = format!("similarity/{stem}.csv");
                    let order = format!("similarity/{stem}_order.json");
                    copy(
                        &p.path(&format!("analysis/similarity_{stem}.csv")),
                        &p.path(&format!("viz/{matrix}")),
                    )?;
                    copy(
                        &p.path(&format!("analysis/similarity_{stem}_order.json")),
                        &p.path(&format!("viz/{order}")),
                    )?;
                    sims.push(json!({"rep_a": reps[a], "rep_b": reps[b], "matrix": matrix, "order": order}));
                    rels.extend([matrix, order]);
                }
            }
            let mut hashes = BTreeMap::new();
            for rel in &rels {
                hashes.insert(rel.clone(), sha256_file(&p.path(&format!("viz/{rel}")))?);
            }
            let bundle = json!({
                "schema_version": 1,
                "manifest_sha256": sha256_file(&p.path(MANIFEST))?,
                "n_rows": m.len(),
                "key_columns": KEY_COLUMNS,
                "ground_truth": gt,
                "representations": rep_entries,
                "similarities": sims,
                "files": hashes,
            });
            write_json(&p.path("viz/bundle.json"), &bundle)?;
            let mut files: Vec<String> = rels.iter().map(|r| format!("viz/{r}")).collect();
            files.push("viz/bundle.json".into());
            Ok(StageOutput {
                lines: vec![format!(
                    "exported {} representations and {} similarity matrices to {}",
                    reps.len(),
                    sims.len(),
                    p.path("viz").display()
                )],
                files,
                ..Default::default()
            })
        })
    }
}

