//! The 24 noiseless BBOB problem classes.
//!
//! Instances are parameterised exactly as in the reference COCO generator: the
//! optimum, optimal value, rotations and per-class constants all derive from the
//! instance seed `class + 10000 * instance`, so values agree with the reference
//! implementation to floating-point roundoff.

mod functions;
mod rng;
mod transforms;

use std::ops::{Index, IndexMut};

use crate::error::{Error, Result};

/// Canonical BBOB search box.
pub const LOWER_BOUND: f64 = -5.0;
pub const UPPER_BOUND: f64 = 5.0;

pub const CLASS_NAMES: [&str; 24] = [
    "Sphere",
    "Ellipsoid separable",
    "Rastrigin separable",
    "Bueche-Rastrigin",
    "Linear slope",
    "Attractive sector",
    "Step ellipsoid",
    "Rosenbrock original",
    "Rosenbrock rotated",
    "Ellipsoid",
    "Discus",
    "Bent cigar",
    "Sharp ridge",
    "Different powers",
    "Rastrigin",
    "Weierstrass",
    "Schaffers F7",
    "Schaffers F7 ill-conditioned",
    "Griewank-Rosenbrock",
    "Schwefel",
    "Gallagher 101 peaks",
    "Gallagher 21 peaks",
    "Katsuura",
    "Lunacek bi-Rastrigin",
];

/// Anything that can be evaluated on a point of fixed dimension.
pub trait Objective: Send + Sync {
    fn dim(&self) -> usize;

    /// Evaluates without checking the length of `x`.
    fn value(&self, x: &[f64]) -> f64;

    fn evaluate(&self, x: &[f64]) -> Result<f64> {
        if x.len() != self.dim() {
            return Err(Error::domain(format!(
                "point has dimension {}, problem expects {}",
                x.len(),
                self.dim()
            )));
        }
        Ok(self.value(x))
    }
}

/// Dense square matrix in row-major order.
#[derive(Debug, Clone, PartialEq)]
pub struct Mat {
    n: usize,
    data: Vec<f64>,
}

impl Mat {
    pub(crate) fn zeros(n: usize) -> Self {
        Mat {
            n,
            data: vec![0.0; n * n],
        }
    }

    pub fn size(&self) -> usize {
        self.n
    }

    pub fn row(&self, i: usize) -> &[f64] {
        &self.data[i * self.n..(i + 1) * self.n]
    }

    pub(crate) fn mul_vec(&self, x: &[f64]) -> Vec<f64> {
        (0..self.n)
            .map(|i| self.row(i).iter().zip(x).map(|(a, b)| a * b).sum())
            .collect()
    }

    pub(crate) fn transpose_mul_vec(&self, x: &[f64]) -> Vec<f64> {
        (0..self.n)
            .map(|j| (0..self.n).map(|i| self[(i, j)] * x[i]).sum())
            .collect()
    }

    /// `left * diag(scales) * right`.
    pub(crate) fn sandwich(left: &Mat, scales: &[f64], right: &Mat) -> Mat {
        let n = left.n;
        let mut out = Mat::zeros(n);
        for i in 0..n {
            for j in 0..n {
                let mut acc = 0.0;
                for k in 0..n {
                    acc += left[(i, k)] * scales[k] * right[(k, j)];
                }
                out[(i, j)] = acc;
            }
        }
        out
    }

    /// Largest absolute entry of `selfᵀ self − I`.
    pub fn orthonormality_error(&self) -> f64 {
        let n = self.n;
        let mut worst = 0.0f64;
        for i in 0..n {
            for j in 0..n {
                let dot: f64 = (0..n).map(|k| self[(k, i)] * self[(k, j)]).sum();
                let target = if i == j { 1.0 } else { 0.0 };
                worst = worst.max((dot - target).abs());
            }
        }
        worst
    }
}

impl Index<(usize, usize)> for Mat {
    type Output = f64;
    fn index(&self, (i, j): (usize, usize)) -> &f64 {
        &self.data[i * self.n + j]
    }
}

impl IndexMut<(usize, usize)> for Mat {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut f64 {
        &mut self.data[i * self.n + j]
    }
}

/// Per-class transformation parameters. Fields unused by a class stay empty.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct TransformParams {
    /// Seed the instance was derived from.
    pub seed: i64,
    /// Offset subtracted from `x` before any other transformation.
    pub(crate) shift: Vec<f64>,
    pub(crate) rot1: Option<Mat>,
    pub(crate) rot2: Option<Mat>,
    /// Composite linear map (rotation, scaling, rotation) where a class uses one.
    pub(crate) linear: Option<Mat>,
    pub(crate) scale: f64,
    pub(crate) gallagher: Option<Box<functions::GallagherPeaks>>,
}

impl TransformParams {
    /// Rotation matrices held by this instance.
    pub fn rotations(&self) -> Vec<&Mat> {
        self.rot1.iter().chain(self.rot2.iter()).collect()
    }
}

/// One BBOB class/instance/dimension with its transformation parameters.
#[derive(Debug, Clone, PartialEq)]
pub struct BbobProblem {
    class_id: u8,
    instance_id: u32,
    dim: usize,
    x_opt: Vec<f64>,
    f_opt: f64,
    params: TransformParams,
}

/// Builds a fully parameterised problem.
pub fn make_problem(class_id: u8, instance_id: u32, dim: usize) -> Result<BbobProblem> {
    if !(1..=24).contains(&class_id) {
        return Err(Error::domain(format!(
            "BBOB class id must be in 1..=24, got {class_id}"
        )));
    }
    if instance_id < 1 {
        return Err(Error::domain("BBOB instance id must be at least 1"));
    }
    if dim < 2 {
        return Err(Error::domain(format!(
            "BBOB dimension must be at least 2, got {dim}"
        )));
    }
    let (params, x_opt) = functions::build(class_id, instance_id, dim);
    let f_opt = rng::fopt(class_id, instance_id);
    Ok(BbobProblem {
        class_id,
        instance_id,
        dim,
        x_opt,
        f_opt,
        params,
    })
}

impl BbobProblem {
    pub fn class_id(&self) -> u8 {
        self.class_id
    }

    pub fn instance_id(&self) -> u32 {
        self.instance_id
    }

    pub fn name(&self) -> &'static str {
        CLASS_NAMES[usize::from(self.class_id) - 1]
    }

    pub fn x_opt(&self) -> &[f64] {
        &self.x_opt
    }

    pub fn f_opt(&self) -> f64 {
        self.f_opt
    }

    pub fn optimum(&self) -> (Vec<f64>, f64) {
        (self.x_opt.clone(), self.f_opt)
    }

    pub fn params(&self) -> &TransformParams {
        &self.params
    }

    /// Seed of the instance transformation, as recorded in manifests.
    pub fn seed(&self) -> i64 {
        self.params.seed
    }
}

impl Objective for BbobProblem {
    fn dim(&self) -> usize {
        self.dim
    }

    fn value(&self, x: &[f64]) -> f64 {
        functions::evaluate(self.class_id, &self.params, x) + self.f_opt
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_out_of_range_arguments() {
        assert!(matches!(make_problem(0, 1, 10), Err(Error::Domain(_))));
        assert!(matches!(make_problem(25, 1, 10), Err(Error::Domain(_))));
        assert!(matches!(make_problem(1, 1, 1), Err(Error::Domain(_))));
        assert!(matches!(make_problem(1, 0, 10), Err(Error::Domain(_))));
    }

    #[test]
    fn sphere_unit_step_adds_one() {
        let p = make_problem(1, 1, 10).unwrap();
        let (mut x, f) = p.optimum();
        assert_eq!(p.evaluate(&x).unwrap(), f);
        x[0] += 1.0;
        assert!((p.evaluate(&x).unwrap() - (f + 1.0)).abs() < 1e-12);
    }

    #[test]
    fn dimension_mismatch_is_a_domain_error() {
        let p = make_problem(8, 3, 10).unwrap();
        assert!(matches!(p.evaluate(&[0.0; 9]), Err(Error::Domain(_))));
    }

    #[test]
    fn construction_is_deterministic() {
        for c in 1..=24 {
            assert_eq!(make_problem(c, 2, 10).unwrap(), make_problem(c, 2, 10).unwrap());
        }
    }

    #[test]
    fn instances_differ_in_optimum() {
        for c in 1..=24 {
            let a = make_problem(c, 1, 10).unwrap();
            let b = make_problem(c, 2, 10).unwrap();
            assert_ne!(a.x_opt(), b.x_opt(), "class {c}");
        }
    }
}
