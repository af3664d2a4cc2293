//! Affine recombinations of BBOB problem pairs and enumeration of the suite.
//!
//! A blended problem is
//!
//! ```text
//! F(x) = exp[ a * ln(P_i(x) - P_i(O_i)) + (1 - a) * ln(P_j(x - O_i + O_j) - P_j(O_j)) ]
//! ```
//!
//! where `O_*` are the operand optima. Both log arguments are floored at
//! [`CLAMP_EPS`], so the global minimum `CLAMP_EPS` sits at `O_i`.

use std::cmp::Ordering;
use std::hash::{Hash, Hasher};

use serde::{Deserialize, Serialize};

use crate::bbob::{make_problem, BbobProblem, Objective};
use crate::error::{Error, Result};

pub const CLAMP_EPS: f64 = 1e-12;
pub const DEFAULT_ALPHAS: [f64; 3] = [0.25, 0.5, 0.75];
pub const DEFAULT_INSTANCES: [u32; 5] = [1, 2, 3, 4, 5];
pub const DEFAULT_DIM: usize = 10;

#[derive(Debug, Clone, PartialEq)]
pub struct AffineProblem {
    first: BbobProblem,
    second: BbobProblem,
    alpha: f64,
    clamp_eps: f64,
}

impl AffineProblem {
    /// Blends two instances of distinct classes sharing instance id and dimension, with `0 < alpha < 1`.
    pub fn new(first: BbobProblem, second: BbobProblem, alpha: f64) -> Result<Self> {
        if first.class_id() == second.class_id() {
            return Err(Error::domain(format!(
                "affine operands must be distinct classes, got {} twice",
                first.class_id()
            )));
        }
        if first.instance_id() != second.instance_id() {
            return Err(Error::domain(format!(
                "affine operands must share the instance id ({} vs {})",
                first.instance_id(),
                second.instance_id()
            )));
        }
        if !(alpha > 0.0 && alpha < 1.0) {
            return Err(Error::domain(format!(
                "blend weight must lie in (0, 1), got {alpha}"
            )));
        }
        Self::limit_case(first, second, alpha)
    }

    /// Test entry point for the analytic limits: allows `alpha = 1` and same-class
    /// or cross-instance pairs. Never used by suite enumeration.
    pub fn limit_case(first: BbobProblem, second: BbobProblem, alpha: f64) -> Result<Self> {
        if first.dim() != second.dim() {
            return Err(Error::domain(format!(
                "affine operands must share the dimension ({} vs {})",
                first.dim(),
                second.dim()
            )));
        }
        if !(alpha > 0.0 && alpha <= 1.0) {
            return Err(Error::domain(format!(
                "blend weight must lie in (0, 1], got {alpha}"
            )));
        }
        Ok(AffineProblem {
            first,
            second,
            alpha,
            clamp_eps: CLAMP_EPS,
        })
    }

    pub fn first(&self) -> &BbobProblem {
        &self.first
    }

    pub fn second(&self) -> &BbobProblem {
        &self.second
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    pub fn clamp_eps(&self) -> f64 {
        self.clamp_eps
    }

    /// Ordered class pair identifying the problem combination.
    pub fn combo_key(&self) -> (u8, u8) {
        (self.first.class_id(), self.second.class_id())
    }

    pub fn variant_key(&self) -> (u32, f64) {
        (self.first.instance_id(), self.alpha)
    }

    pub fn key(&self) -> ProblemKey {
        ProblemKey::new(
            self.first.class_id(),
            self.second.class_id(),
            self.first.instance_id(),
            self.alpha,
        )
    }

    /// Location of the global minimum (the first operand's optimum).
    pub fn optimum(&self) -> (Vec<f64>, f64) {
        (self.first.x_opt().to_vec(), self.clamp_eps)
    }

    /// The two clamped, optimum-shifted operand values at `x`.
    pub fn operand_gaps(&self, x: &[f64]) -> (f64, f64) {
        let gap_first = self.first.value(x) - self.first.f_opt();
        let moved: Vec<f64> = x
            .iter()
            .zip(self.first.x_opt())
            .zip(self.second.x_opt())
            .map(|((xi, oi), oj)| xi - oi + oj)
            .collect();
        let gap_second = self.second.value(&moved) - self.second.f_opt();
        (gap_first.max(self.clamp_eps), gap_second.max(self.clamp_eps))
    }
}

impl Objective for AffineProblem {
    fn dim(&self) -> usize {
        self.first.dim()
    }

    fn value(&self, x: &[f64]) -> f64 {
        let (a, b) = self.operand_gaps(x);
        (self.alpha * a.ln() + (1.0 - self.alpha) * b.ln()).exp()
    }
}

/// Row key shared by every per-problem table: ordered class pair, instance, blend weight.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct ProblemKey {
    pub class_i: u8,
    pub class_j: u8,
    pub instance: u32,
    pub alpha: f64,
}

impl ProblemKey {
    pub fn new(class_i: u8, class_j: u8, instance: u32, alpha: f64) -> Self {
        // -0.0 and 0.0 must compare equal under the bitwise ordering below
        let alpha = if alpha == 0.0 { 0.0 } else { alpha };
        ProblemKey {
            class_i,
            class_j,
            instance,
            alpha,
        }
    }
}

impl std::fmt::Display for ProblemKey {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(
            f,
            "(class_i={}, class_j={}, instance={}, alpha={})",
            self.class_i, self.class_j, self.instance, self.alpha
        )
    }
}

impl PartialEq for ProblemKey {
    fn eq(&self, other: &Self) -> bool {
        self.cmp(other) == Ordering::Equal
    }
}

impl Eq for ProblemKey {}

impl PartialOrd for ProblemKey {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for ProblemKey {
    fn cmp(&self, other: &Self) -> Ordering {
        (self.class_i, self.class_j, self.instance)
            .cmp(&(other.class_i, other.class_j, other.instance))
            .then(self.alpha.total_cmp(&other.alpha))
    }
}

impl Hash for ProblemKey {
    fn hash<H: Hasher>(&self, state: &mut H) {
        self.class_i.hash(state);
        self.class_j.hash(state);
        self.instance.hash(state);
        self.alpha.to_bits().hash(state);
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SuiteConfig {
    pub classes: Vec<u8>,
    pub instances: Vec<u32>,
    pub alphas: Vec<f64>,
    pub dim: usize,
}

impl Default for SuiteConfig {
    fn default() -> Self {
        SuiteConfig {
            classes: (1..=24).collect(),
            instances: DEFAULT_INSTANCES.to_vec(),
            alphas: DEFAULT_ALPHAS.to_vec(),
            dim: DEFAULT_DIM,
        }
    }
}

impl SuiteConfig {
    /// Sorted, de-duplicated copy; errors on invalid members.
    pub fn normalized(&self) -> Result<SuiteConfig> {
        let mut classes = self.classes.clone();
        classes.sort_unstable();
        classes.dedup();
        if let Some(bad) = classes.iter().find(|c| !(1..=24).contains(*c)) {
            return Err(Error::domain(format!("class id {bad} outside 1..=24")));
        }
        if classes.len() < 2 {
            return Err(Error::domain(format!(
                "the suite needs at least 2 distinct classes, got {}",
                classes.len()
            )));
        }
        let mut instances = self.instances.clone();
        instances.sort_unstable();
        instances.dedup();
        if instances.is_empty() || instances[0] == 0 {
            return Err(Error::domain("instance ids must be a non-empty set of positive integers"));
        }
        let mut alphas = self.alphas.clone();
        if alphas.is_empty() || alphas.iter().any(|a| !(*a > 0.0 && *a < 1.0)) {
            return Err(Error::domain("blend weights must be a non-empty subset of (0, 1)"));
        }
        alphas.sort_by(f64::total_cmp);
        alphas.dedup();
        if self.dim < 2 {
            return Err(Error::domain(format!("dimension must be at least 2, got {}", self.dim)));
        }
        Ok(SuiteConfig {
            classes,
            instances,
            alphas,
            dim: self.dim,
        })
    }

    /// Ordered class pairs `(i, j)`, `i != j`, in lexicographic order.
    pub fn combinations(&self) -> Vec<(u8, u8)> {
        let mut out = Vec::new();
        for &i in &self.classes {
            for &j in &self.classes {
                if i != j {
                    out.push((i, j));
                }
            }
        }
        out
    }

    pub fn variants_per_combination(&self) -> usize {
        self.instances.len() * self.alphas.len()
    }
}

#[derive(Debug, Clone)]
pub struct SuiteEntry {
    /// Row index in manifest order.
    pub row: usize,
    pub combo_index: usize,
    pub problem: AffineProblem,
}

/// Every ordered class pair, instance and blend weight, lexicographic by `(i, j, m, alpha)`.
pub fn generate_suite(config: &SuiteConfig) -> Result<Vec<SuiteEntry>> {
    let config = config.normalized()?;
    let mut base = std::collections::BTreeMap::new();
    for &c in &config.classes {
        for &m in &config.instances {
            base.insert((c, m), make_problem(c, m, config.dim)?);
        }
    }
    let mut out = Vec::with_capacity(
        config.classes.len() * (config.classes.len() - 1) * config.variants_per_combination(),
    );
    for (combo_index, (i, j)) in config.combinations().into_iter().enumerate() {
        for &m in &config.instances {
            for &alpha in &config.alphas {
                let problem = AffineProblem::new(base[&(i, m)].clone(), base[&(j, m)].clone(), alpha)?;
                out.push(SuiteEntry {
                    row: out.len(),
                    combo_index,
                    problem,
                });
            }
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn pair(i: u8, j: u8, m: u32) -> (BbobProblem, BbobProblem) {
        (make_problem(i, m, 10).unwrap(), make_problem(j, m, 10).unwrap())
    }

    #[test]
    fn rejects_same_class_and_mixed_instances() {
        let (a, _) = pair(3, 3, 1);
        assert!(AffineProblem::new(a.clone(), a.clone(), 0.5).is_err());
        let b = make_problem(5, 2, 10).unwrap();
        assert!(AffineProblem::new(a.clone(), b, 0.5).is_err());
        let c = make_problem(5, 1, 10).unwrap();
        assert!(AffineProblem::new(a.clone(), c.clone(), 1.0).is_err());
        assert!(AffineProblem::new(a.clone(), c.clone(), 0.0).is_err());
        let d = make_problem(5, 1, 5).unwrap();
        assert!(AffineProblem::limit_case(a, d, 0.5).is_err());
    }

    #[test]
    fn value_at_first_optimum_is_clamp_eps() {
        for (i, j) in [(1, 2), (8, 21), (24, 7), (5, 20)] {
            let (a, b) = pair(i, j, 2);
            let f = AffineProblem::new(a, b, 0.25).unwrap();
            let (x, v) = f.optimum();
            let got = f.evaluate(&x).unwrap();
            assert!((got - CLAMP_EPS).abs() <= 1e-12 * CLAMP_EPS, "{i},{j}: {got}");
            assert_eq!(v, CLAMP_EPS);
        }
    }

    #[test]
    fn dimension_mismatch_is_rejected() {
        let (a, b) = pair(1, 2, 1);
        let f = AffineProblem::new(a, b, 0.5).unwrap();
        assert!(matches!(f.evaluate(&[0.0; 3]), Err(Error::Domain(_))));
    }

    #[test]
    fn reduced_suite_counts() {
        let cfg = SuiteConfig {
            classes: vec![1, 2, 3, 4, 5, 6],
            instances: vec![1, 2],
            alphas: vec![0.5],
            dim: 10,
        };
        let suite = generate_suite(&cfg).unwrap();
        assert_eq!(suite.len(), 60);
        assert_eq!(suite.last().unwrap().combo_index, 29);
    }

    #[test]
    fn suite_needs_two_classes() {
        let cfg = SuiteConfig {
            classes: vec![7, 7],
            ..SuiteConfig::default()
        };
        assert!(matches!(generate_suite(&cfg), Err(Error::Domain(_))));
    }

    #[test]
    fn suite_is_lexicographic() {
        let cfg = SuiteConfig {
            classes: vec![9, 2, 4],
            instances: vec![3, 1],
            alphas: vec![0.75, 0.25],
            dim: 4,
        };
        let suite = generate_suite(&cfg).unwrap();
        let keys: Vec<ProblemKey> = suite.iter().map(|e| e.problem.key()).collect();
        let mut sorted = keys.clone();
        sorted.sort();
        assert_eq!(keys, sorted);
        assert!(suite.iter().enumerate().all(|(r, e)| e.row == r));
    }

    #[test]
    fn key_equality_ignores_signed_zero() {
        assert_eq!(ProblemKey::new(1, 2, 1, 0.0), ProblemKey::new(1, 2, 1, -0.0));
        assert_ne!(ProblemKey::new(1, 2, 1, 0.25), ProblemKey::new(1, 2, 1, 0.5));
    }
}
