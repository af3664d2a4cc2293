//! Named representation matrices aligned to the suite manifest, and their preprocessing.

use std::collections::{BTreeSet, HashSet};
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::mabbob::ProblemKey;
use crate::manifest::{format_cell, write_keyed_csv, KeyColumns, SuiteManifest};
use crate::matrix::Matrix;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RepresentationMatrix {
    pub name: String,
    pub keys: Vec<ProblemKey>,
    pub columns: Vec<String>,
    pub values: Matrix,
    pub preprocessing: Option<PreprocessRecord>,
}

impl RepresentationMatrix {
    pub fn new(name: &str, keys: Vec<ProblemKey>, columns: Vec<String>, values: Matrix) -> Result<Self> {
        if values.nrows() != keys.len() || values.ncols() != columns.len() {
            return Err(Error::domain(format!(
                "{name}: {}x{} values for {} keys and {} columns",
                values.nrows(),
                values.ncols(),
                keys.len(),
                columns.len()
            )));
        }
        let mut seen = HashSet::new();
        if let Some(dup) = keys.iter().find(|k| !seen.insert(**k)) {
            return Err(Error::data(format!("{name}: duplicate row {dup}")));
        }
        let mut cols = HashSet::new();
        if let Some(dup) = columns.iter().find(|c| !cols.insert(c.as_str())) {
            return Err(Error::data(format!("{name}: duplicate column '{dup}'")));
        }
        Ok(RepresentationMatrix {
            name: name.to_string(),
            keys,
            columns,
            values,
            preprocessing: None,
        })
    }

    pub fn n_rows(&self) -> usize {
        self.keys.len()
    }

    pub fn dim(&self) -> usize {
        self.columns.len()
    }

    /// Rows sorted by key, which is manifest order.
    pub fn sorted(&self) -> RepresentationMatrix {
        let mut order: Vec<usize> = (0..self.keys.len()).collect();
        order.sort_by(|&a, &b| self.keys[a].cmp(&self.keys[b]));
        RepresentationMatrix {
            name: self.name.clone(),
            keys: order.iter().map(|&i| self.keys[i]).collect(),
            columns: self.columns.clone(),
            values: self.values.select_rows(&order),
            preprocessing: self.preprocessing.clone(),
        }
    }

    pub fn write_csv(&self, path: &Path, manifest: &SuiteManifest) -> Result<()> {
        if self.keys != manifest.keys() {
            return Err(Error::data(format!("{}: rows are not in manifest order", self.name)));
        }
        write_keyed_csv(path, manifest, &self.columns, |row| {
            self.values.row(row).iter().map(|v| format_cell(*v)).collect()
        })
    }
}

fn describe_keys(keys: &[ProblemKey]) -> String {
    const SHOWN: usize = 10;
    let mut s: Vec<String> = keys.iter().take(SHOWN).map(ToString::to_string).collect();
    if keys.len() > SHOWN {
        s.push(format!("... and {} more", keys.len() - SHOWN));
    }
    s.join(", ")
}

/// Reads a keyed feature table and reorders it to manifest order.
///
/// Key columns are `class_i, class_j, instance, alpha` plus an optional
/// `combo_index`; every other column must be numeric. `NaN` and empty cells
/// are read as missing values for later imputation.
pub fn ingest_csv(path: &Path, name: &str, manifest: &SuiteManifest) -> Result<RepresentationMatrix> {
    let mut r = csv::Reader::from_path(path)?;
    let header = r.headers()?.clone();
    let keys = KeyColumns::find(&header, path)?;
    let feature_cols: Vec<usize> = (0..header.len()).filter(|i| !keys.all.contains(i)).collect();
    if feature_cols.is_empty() {
        return Err(Error::data(format!("{}: no feature columns", path.display())));
    }
    let columns: Vec<String> = feature_cols.iter().map(|&i| header[i].trim().to_string()).collect();
    let index = manifest.row_index();
    let mut rows: Vec<Option<Vec<f64>>> = vec![None; manifest.len()];
    let mut unknown = Vec::new();
    for (line, rec) in r.records().enumerate() {
        let rec = rec?;
        let line = line as u64 + 2;
        let key = keys.parse(&rec, line, path)?;
        let values = feature_cols
            .iter()
            .map(|&c| {
                let cell = rec.get(c).unwrap_or("").trim();
                if cell.is_empty() || cell.eq_ignore_ascii_case("nan") {
                    return Ok(f64::NAN);
                }
                cell.parse::<f64>().map_err(|_| {
                    Error::data(format!(
                        "{}: line {line}, column '{}': non-numeric value '{cell}'",
                        path.display(),
                        header[c].trim()
                    ))
                })
            })
            .collect::<Result<Vec<f64>>>()?;
        match index.get(&key) {
            Some(&row) => {
                if rows[row].replace(values).is_some() {
                    return Err(Error::data(format!("{}: duplicate row {key}", path.display())));
                }
            }
            None => unknown.push(key),
        }
    }
    if !unknown.is_empty() {
        return Err(Error::data(format!(
            "{}: {} rows are not in the manifest: {}",
            path.display(),
            unknown.len(),
            describe_keys(&unknown)
        )));
    }
    let missing: Vec<ProblemKey> = rows
        .iter()
        .zip(&manifest.records)
        .filter(|(r, _)| r.is_none())
        .map(|(_, rec)| rec.key())
        .collect();
    if !missing.is_empty() {
        return Err(Error::data(format!(
            "{}: {} manifest problems are missing: {}",
            path.display(),
            missing.len(),
            describe_keys(&missing)
        )));
    }
    let flat: Vec<f64> = rows.into_iter().flatten().flatten().collect();
    let values = Matrix::new(manifest.len(), columns.len(), flat)?;
    RepresentationMatrix::new(name, manifest.keys(), columns, values)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ImputePolicy {
    #[default]
    Median,
    Mean,
}

/// Everything needed to replay preprocessing on the raw matrix.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PreprocessRecord {
    pub impute: ImputePolicy,
    pub standardize: bool,
    pub input_columns: Vec<String>,
    /// Fill value per input column; `None` for columns with no finite entry.
    pub fill_values: Vec<Option<f64>>,
    pub kept_columns: Vec<String>,
    pub dropped_columns: Vec<DroppedColumn>,
    pub imputed_cells: usize,
    /// Per kept column: subtracted centre and divisor (0 and 1 without standardisation).
    pub centers: Vec<f64>,
    pub scales: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DroppedColumn {
    pub name: String,
    pub reason: String,
}

fn fill_value(values: &[f64], policy: ImputePolicy) -> Option<f64> {
    let mut finite: Vec<f64> = values.iter().copied().filter(|v| v.is_finite()).collect();
    if finite.is_empty() {
        return None;
    }
    Some(match policy {
        ImputePolicy::Mean => finite.iter().sum::<f64>() / finite.len() as f64,
        ImputePolicy::Median => {
            finite.sort_by(f64::total_cmp);
            let m = finite.len() / 2;
            if finite.len() % 2 == 1 {
                finite[m]
            } else {
                0.5 * (finite[m - 1] + finite[m])
            }
        }
    })
}

/// Imputes non-finite cells, drops constant columns and optionally standardises
/// with the population standard deviation.
pub fn preprocess(m: &RepresentationMatrix, impute: ImputePolicy, standardize: bool) -> Result<RepresentationMatrix> {
    let n = m.n_rows();
    let mut fill_values = Vec::with_capacity(m.dim());
    let mut dropped = Vec::new();
    let mut kept = Vec::new();
    let mut centers = Vec::new();
    let mut scales = Vec::new();
    let mut imputed_cells = 0;
    for j in 0..m.dim() {
        let col = m.values.column(j);
        let fill = fill_value(&col, impute);
        fill_values.push(fill);
        let Some(fill) = fill else {
            log::warn!("{}: column '{}' has no finite value and is dropped", m.name, m.columns[j]);
            dropped.push(DroppedColumn {
                name: m.columns[j].clone(),
                reason: "no finite values".into(),
            });
            continue;
        };
        imputed_cells += col.iter().filter(|v| !v.is_finite()).count();
        let filled: Vec<f64> = col.iter().map(|&v| if v.is_finite() { v } else { fill }).collect();
        if filled.iter().all(|&v| v == filled[0]) {
            log::warn!("{}: column '{}' is constant and is dropped", m.name, m.columns[j]);
            dropped.push(DroppedColumn {
                name: m.columns[j].clone(),
                reason: "zero variance".into(),
            });
            continue;
        }
        let (c, s) = if standardize {
            let mean = filled.iter().sum::<f64>() / n as f64;
            let var = filled.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / n as f64;
            (mean, var.sqrt())
        } else {
            (0.0, 1.0)
        };
        kept.push(j);
        centers.push(c);
        scales.push(s);
    }
    let record = PreprocessRecord {
        impute,
        standardize,
        input_columns: m.columns.clone(),
        fill_values,
        kept_columns: kept.iter().map(|&j| m.columns[j].clone()).collect(),
        dropped_columns: dropped,
        imputed_cells,
        centers,
        scales,
    };
    apply_record(m, &record)
}

/// Replays a recorded preprocessing on a raw matrix.
pub fn apply_record(m: &RepresentationMatrix, record: &PreprocessRecord) -> Result<RepresentationMatrix> {
    if m.columns != record.input_columns {
        return Err(Error::data(format!(
            "{}: columns differ from those the preprocessing was recorded on",
            m.name
        )));
    }
    let kept: Vec<usize> = record
        .kept_columns
        .iter()
        .map(|c| m.columns.iter().position(|x| x == c).expect("kept column is an input column"))
        .collect();
    let mut out = Matrix::zeros(m.n_rows(), kept.len());
    for (k, &j) in kept.iter().enumerate() {
        let fill = record.fill_values[j].expect("kept columns have a fill value");
        for i in 0..m.n_rows() {
            let v = m.values.get(i, j);
            let v = if v.is_finite() { v } else { fill };
            out.set(i, k, (v - record.centers[k]) / record.scales[k]);
        }
    }
    Ok(RepresentationMatrix {
        name: m.name.clone(),
        keys: m.keys.clone(),
        columns: record.kept_columns.clone(),
        values: out,
        preprocessing: Some(record.clone()),
    })
}

/// Checks that all matrices cover the same problems and returns them in key order.
pub fn align(matrices: Vec<RepresentationMatrix>) -> Result<Vec<RepresentationMatrix>> {
    if matrices.len() < 2 {
        return Err(Error::domain("alignment needs at least two representations"));
    }
    let reference: BTreeSet<ProblemKey> = matrices[0].keys.iter().copied().collect();
    for m in &matrices[1..] {
        let other: BTreeSet<ProblemKey> = m.keys.iter().copied().collect();
        if other != reference {
            let diff: Vec<ProblemKey> = reference.symmetric_difference(&other).copied().collect();
            return Err(Error::data(format!(
                "{} and {} differ on {} rows: {}",
                matrices[0].name,
                m.name,
                diff.len(),
                describe_keys(&diff)
            )));
        }
    }
    Ok(matrices.iter().map(RepresentationMatrix::sorted).collect())
}
