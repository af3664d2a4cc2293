//! Latin Hypercube designs and their evaluation.

use std::io::Write;
use std::path::Path;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::bbob::{Objective, LOWER_BOUND, UPPER_BOUND};
use crate::error::{Error, Result};

/// Samples per dimension used for every problem (`n = 50 d`).
pub const SAMPLES_PER_DIM: usize = 50;

/// Where a point is placed inside its stratum.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "lowercase")]
pub enum Placement {
    #[default]
    Random,
    Midpoint,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SamplingConfig {
    pub samples_per_dim: usize,
    /// One design reused for every problem instead of a per-problem draw.
    pub shared_design: bool,
    pub placement: Placement,
}

impl Default for SamplingConfig {
    fn default() -> Self {
        SamplingConfig {
            samples_per_dim: SAMPLES_PER_DIM,
            shared_design: false,
            placement: Placement::Random,
        }
    }
}

impl SamplingConfig {
    pub fn sample_size(&self, dim: usize) -> usize {
        self.samples_per_dim * dim
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct DesignMatrix {
    n_samples: usize,
    dim: usize,
    /// Row-major `n_samples x dim`.
    points: Vec<f64>,
    bounds: Vec<(f64, f64)>,
    seed: u64,
}

impl DesignMatrix {
    /// Wraps explicit points. Each row must lie within `bounds`.
    pub fn from_rows(rows: &[Vec<f64>], bounds: Vec<(f64, f64)>, seed: u64) -> Result<Self> {
        let dim = bounds.len();
        if rows.is_empty() || dim == 0 {
            return Err(Error::domain("a design needs at least one point and one dimension"));
        }
        let mut points = Vec::with_capacity(rows.len() * dim);
        for (r, row) in rows.iter().enumerate() {
            if row.len() != dim {
                return Err(Error::domain(format!(
                    "row {r} has {} coordinates, expected {dim}",
                    row.len()
                )));
            }
            for (v, (lo, hi)) in row.iter().zip(&bounds) {
                if !(v >= lo && v <= hi) {
                    return Err(Error::domain(format!("row {r} lies outside the bounds")));
                }
            }
            points.extend_from_slice(row);
        }
        Ok(DesignMatrix {
            n_samples: rows.len(),
            dim,
            points,
            bounds,
            seed,
        })
    }

    pub fn n_samples(&self) -> usize {
        self.n_samples
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn bounds(&self) -> &[(f64, f64)] {
        &self.bounds
    }

    pub fn row(&self, i: usize) -> &[f64] {
        &self.points[i * self.dim..(i + 1) * self.dim]
    }

    pub fn rows(&self) -> impl Iterator<Item = &[f64]> {
        self.points.chunks_exact(self.dim)
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.points
    }

    /// Appends a point, e.g. to probe a known optimum alongside the design.
    pub fn with_point(mut self, x: &[f64]) -> Result<Self> {
        if x.len() != self.dim {
            return Err(Error::domain("appended point has the wrong dimension"));
        }
        self.points.extend_from_slice(x);
        self.n_samples += 1;
        Ok(self)
    }

    /// Whether each dimension has exactly one point per equal-width stratum.
    pub fn is_latin(&self) -> bool {
        let n = self.n_samples;
        (0..self.dim).all(|d| {
            let (lo, hi) = self.bounds[d];
            let mut seen = vec![false; n];
            self.rows().all(|row| {
                let t = (row[d] - lo) / (hi - lo) * n as f64;
                let stratum = (t.floor() as usize).min(n - 1);
                !std::mem::replace(&mut seen[stratum], true)
            })
        })
    }
}

/// Canonical BBOB box `[-5, 5]^dim`.
pub fn default_bounds(dim: usize) -> Vec<(f64, f64)> {
    vec![(LOWER_BOUND, UPPER_BOUND); dim]
}

/// Latin Hypercube sample with one point per stratum in each dimension.
pub fn lhs(
    n_samples: usize,
    dim: usize,
    bounds: &[(f64, f64)],
    seed: u64,
    placement: Placement,
) -> Result<DesignMatrix> {
    if n_samples == 0 || dim == 0 {
        return Err(Error::domain(format!(
            "design sizes must be positive, got n_samples={n_samples}, dim={dim}"
        )));
    }
    if bounds.len() != dim {
        return Err(Error::domain(format!(
            "{} bounds given for dimension {dim}",
            bounds.len()
        )));
    }
    if let Some((lo, hi)) = bounds.iter().find(|(lo, hi)| !(lo < hi)) {
        return Err(Error::domain(format!("empty interval [{lo}, {hi}]")));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut points = vec![0.0; n_samples * dim];
    let mut strata: Vec<usize> = (0..n_samples).collect();
    for (d, &(lo, hi)) in bounds.iter().enumerate() {
        strata.shuffle(&mut rng);
        let width = (hi - lo) / n_samples as f64;
        for (i, &s) in strata.iter().enumerate() {
            let offset = match placement {
                Placement::Random => rng.random::<f64>(),
                Placement::Midpoint => 0.5,
            };
            points[i * dim + d] = (lo + (s as f64 + offset) * width).min(hi);
        }
    }
    Ok(DesignMatrix {
        n_samples,
        dim,
        points,
        bounds: bounds.to_vec(),
        seed,
    })
}

/// Objective values at every design row, in row order.
pub fn evaluate_design<O: Objective + ?Sized>(problem: &O, design: &DesignMatrix) -> Result<Vec<f64>> {
    if problem.dim() != design.dim() {
        return Err(Error::domain(format!(
            "design has dimension {}, problem expects {}",
            design.dim(),
            problem.dim()
        )));
    }
    let y: Vec<f64> = design.rows().map(|x| problem.value(x)).collect();
    if let Some(k) = y.iter().position(|v| !v.is_finite()) {
        return Err(Error::Numerical(format!("non-finite objective value at design row {k}")));
    }
    Ok(y)
}

fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Mixes integer parts into one seed below 2^53 (exact in JSON readers using doubles).
pub fn mix_seed(parts: &[u64]) -> u64 {
    let h = parts
        .iter()
        .fold(0x5EED_u64, |acc, &p| splitmix64(acc ^ splitmix64(p)));
    h & ((1u64 << 53) - 1)
}

/// Per-problem design seed from `(combo_index, instance, alpha, master_seed)`.
pub fn design_seed(combo_index: usize, instance: u32, alpha: f64, master_seed: u64) -> u64 {
    mix_seed(&[
        combo_index as u64,
        u64::from(instance),
        alpha.to_bits(),
        master_seed,
    ])
}

/// Seed of the single design used when designs are shared.
pub fn shared_design_seed(master_seed: u64) -> u64 {
    mix_seed(&[u64::MAX, master_seed])
}

/// Raw sample dump: header `x1..xd,y`, one row per design point.
pub fn write_sample_csv(path: &Path, design: &DesignMatrix, y: &[f64]) -> Result<()> {
    if y.len() != design.n_samples() {
        return Err(Error::domain("objective vector length differs from design size"));
    }
    let mut out = Vec::new();
    let header: Vec<String> = (1..=design.dim())
        .map(|i| format!("x{i}"))
        .chain(std::iter::once("y".to_string()))
        .collect();
    writeln!(out, "{}", header.join(",")).expect("write to vec");
    for (row, v) in design.rows().zip(y) {
        let fields: Vec<String> = row.iter().chain(std::iter::once(v)).map(|x| x.to_string()).collect();
        writeln!(out, "{}", fields.join(",")).expect("write to vec");
    }
    std::fs::write(path, out).map_err(|e| Error::io(path, e))
}

/// Reads a dump written by [`write_sample_csv`] back into points and values.
pub fn read_sample_csv(path: &Path) -> Result<(Vec<Vec<f64>>, Vec<f64>)> {
    let mut reader = csv::Reader::from_path(path)?;
    let headers = reader.headers()?.clone();
    if headers.iter().last() != Some("y") {
        return Err(Error::data(format!("{}: last column must be y", path.display())));
    }
    let mut xs = Vec::new();
    let mut ys = Vec::new();
    for (r, rec) in reader.records().enumerate() {
        let rec = rec?;
        let vals: Vec<f64> = rec
            .iter()
            .map(|f| f.trim().parse::<f64>())
            .collect::<std::result::Result<_, _>>()
            .map_err(|e| Error::data(format!("{} row {}: {e}", path.display(), r + 1)))?;
        let (y, x) = vals.split_last().expect("non-empty record");
        ys.push(*y);
        xs.push(x.to_vec());
    }
    Ok((xs, ys))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bbob::make_problem;

    struct Constant;

    impl Objective for Constant {
        fn dim(&self) -> usize {
            3
        }
        fn value(&self, _x: &[f64]) -> f64 {
            7.0
        }
    }

    #[test]
    fn one_point_per_unit_stratum() {
        let d = lhs(4, 1, &[(0.0, 4.0)], 9, Placement::Random).unwrap();
        let mut strata: Vec<usize> = d.rows().map(|r| r[0].floor() as usize).collect();
        strata.sort_unstable();
        assert_eq!(strata, vec![0, 1, 2, 3]);
        assert!(d.is_latin());
    }

    #[test]
    fn default_sample_size() {
        let cfg = SamplingConfig::default();
        assert_eq!(cfg.sample_size(10), 500);
        let d = lhs(500, 10, &default_bounds(10), 1, Placement::Random).unwrap();
        assert!(d.is_latin());
        assert!(d.rows().all(|r| r.iter().all(|v| (-5.0..=5.0).contains(v))));
    }

    #[test]
    fn seeding_is_deterministic() {
        let b = default_bounds(3);
        let a = lhs(20, 3, &b, 5, Placement::Random).unwrap();
        assert_eq!(a, lhs(20, 3, &b, 5, Placement::Random).unwrap());
        assert_ne!(a, lhs(20, 3, &b, 6, Placement::Random).unwrap());
    }

    #[test]
    fn midpoint_placement_centres_points() {
        let d = lhs(5, 2, &[(0.0, 5.0), (0.0, 5.0)], 3, Placement::Midpoint).unwrap();
        assert!(d.as_slice().iter().all(|v| (v - v.floor() - 0.5).abs() < 1e-12));
    }

    #[test]
    fn invalid_sizes_are_domain_errors() {
        assert!(matches!(lhs(0, 2, &default_bounds(2), 0, Placement::Random), Err(Error::Domain(_))));
        assert!(matches!(lhs(3, 0, &[], 0, Placement::Random), Err(Error::Domain(_))));
        assert!(matches!(lhs(3, 2, &default_bounds(3), 0, Placement::Random), Err(Error::Domain(_))));
    }

    #[test]
    fn constant_objective_gives_constant_vector() {
        let d = lhs(12, 3, &default_bounds(3), 2, Placement::Random).unwrap();
        assert_eq!(evaluate_design(&Constant, &d).unwrap(), vec![7.0; 12]);
    }

    #[test]
    fn evaluation_order_and_dimension_check() {
        let p = make_problem(1, 1, 10).unwrap();
        let d = lhs(50, 10, &default_bounds(10), 4, Placement::Random).unwrap();
        let y = evaluate_design(&p, &d).unwrap();
        assert!(y.iter().all(|&v| v >= p.f_opt()));
        for (k, row) in d.rows().enumerate() {
            assert_eq!(y[k], p.value(row));
        }
        let wrong = lhs(5, 3, &default_bounds(3), 4, Placement::Random).unwrap();
        assert!(matches!(evaluate_design(&p, &wrong), Err(Error::Domain(_))));
    }

    #[test]
    fn design_seeds_differ_per_problem() {
        let a = design_seed(0, 1, 0.25, 42);
        assert_ne!(a, design_seed(0, 1, 0.5, 42));
        assert_ne!(a, design_seed(1, 1, 0.25, 42));
        assert_ne!(a, design_seed(0, 1, 0.25, 43));
        assert!(a < 1 << 53);
    }

    #[test]
    fn sample_csv_round_trip() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("s.csv");
        let d = lhs(6, 2, &default_bounds(2), 8, Placement::Random).unwrap();
        let y: Vec<f64> = (0..6).map(|i| i as f64 * 0.1).collect();
        write_sample_csv(&path, &d, &y).unwrap();
        let text = std::fs::read_to_string(&path).unwrap();
        assert!(text.starts_with("x1,x2,y\n"));
        let (xs, ys) = read_sample_csv(&path).unwrap();
        assert_eq!(ys, y);
        assert_eq!(xs[3], d.row(3));
    }
}
