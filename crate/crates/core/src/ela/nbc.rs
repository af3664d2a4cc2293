//! Nearest-better clustering statistics.

use super::stats::{correlation, mean, sd};
use super::Sample;

pub(super) const ENTRIES: [(&str, &str); 5] = [
    ("nn_nb.sd_ratio", "sd of nearest-neighbour distances over sd of nearest-better distances"),
    ("nn_nb.mean_ratio", "mean nearest-neighbour distance over mean nearest-better distance"),
    ("nn_nb.cor", "correlation of nearest-neighbour and nearest-better distances"),
    ("dist_ratio.coeff_var", "coefficient of variation of the ratio nearest-neighbour / nearest-better distance"),
    ("nb_fitness.cor", "correlation between how often a point is someone's nearest better point and its y"),
];

fn ratio(a: f64, b: f64) -> Option<f64> {
    if b > 0.0 && a.is_finite() {
        Some(a / b)
    } else {
        None
    }
}

pub(super) fn compute(s: &Sample) -> Vec<Option<f64>> {
    let n = s.n;
    let mut nn = Vec::with_capacity(n);
    let mut nb = Vec::with_capacity(n);
    let mut indegree = vec![0.0; n];
    for i in 0..n {
        let mut best_nn = f64::INFINITY;
        let mut best_nb = f64::INFINITY;
        let mut nb_target = None;
        for j in 0..n {
            if i == j {
                continue;
            }
            let d = s.dist(i, j);
            if d < best_nn {
                best_nn = d;
            }
            if s.y[j] < s.y[i] && d < best_nb {
                best_nb = d;
                nb_target = Some(j);
            }
        }
        if let Some(t) = nb_target {
            indegree[t] += 1.0;
            nn.push(best_nn);
            nb.push(best_nb);
        }
    }
    if nn.len() < 2 {
        return vec![None; ENTRIES.len()];
    }
    let quotients: Vec<f64> = nn.iter().zip(&nb).map(|(a, b)| a / b).collect();
    let finite = |v: f64| if v.is_finite() { Some(v) } else { None };
    vec![
        ratio(sd(&nn), sd(&nb)),
        ratio(mean(&nn), mean(&nb)),
        finite(correlation(&nn, &nb)),
        if quotients.iter().all(|q| q.is_finite()) {
            ratio(sd(&quotients), mean(&quotients))
        } else {
            None
        },
        finite(correlation(&indegree, &s.y)),
    ]
}
