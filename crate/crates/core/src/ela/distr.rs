//! Distribution of the objective values.

use super::stats::{mean, quantile, sd};
use super::Sample;

pub(super) const ENTRIES: [(&str, &str); 3] = [
    ("skewness", "moment skewness m3 / m2^1.5 of y"),
    ("kurtosis", "excess moment kurtosis m4 / m2^2 - 3 of y"),
    (
        "number_of_peaks",
        "modes of a Gaussian kernel density of y (Silverman bandwidth, 512-point grid) holding more than 1% of the mass",
    ),
];

const GRID: usize = 512;
const MODE_MASS: f64 = 0.01;

pub(super) fn compute(s: &Sample) -> Vec<Option<f64>> {
    let (skew, kurt) = moments(&s.y);
    vec![skew, kurt, number_of_peaks(&s.y)]
}

fn moments(y: &[f64]) -> (Option<f64>, Option<f64>) {
    let m = mean(y);
    let n = y.len() as f64;
    let m2 = y.iter().map(|v| (v - m).powi(2)).sum::<f64>() / n;
    if !(m2 > 0.0) || m2 <= f64::EPSILON * m * m {
        return (None, None);
    }
    let m3 = y.iter().map(|v| (v - m).powi(3)).sum::<f64>() / n;
    let m4 = y.iter().map(|v| (v - m).powi(4)).sum::<f64>() / n;
    (Some(m3 / m2.powf(1.5)), Some(m4 / (m2 * m2) - 3.0))
}

/// Silverman's rule of thumb, `0.9 min(sd, IQR / 1.34) n^(-1/5)`.
pub(crate) fn silverman_bandwidth(y: &[f64]) -> f64 {
    let iqr = quantile(y, 0.75) - quantile(y, 0.25);
    let s = sd(y);
    let spread = if iqr > 0.0 { s.min(iqr / 1.34) } else { s };
    0.9 * spread * (y.len() as f64).powf(-0.2)
}

fn number_of_peaks(y: &[f64]) -> Option<f64> {
    let bw = silverman_bandwidth(y);
    if !(bw > 0.0) || !bw.is_finite() {
        return None;
    }
    let lo = y.iter().cloned().fold(f64::INFINITY, f64::min) - 3.0 * bw;
    let hi = y.iter().cloned().fold(f64::NEG_INFINITY, f64::max) + 3.0 * bw;
    let step = (hi - lo) / (GRID - 1) as f64;
    let dens: Vec<f64> = (0..GRID)
        .map(|k| {
            let t = lo + k as f64 * step;
            y.iter()
                .map(|v| {
                    let u = (t - v) / bw;
                    (-0.5 * u * u).exp()
                })
                .sum::<f64>()
        })
        .collect();
    let mut minima = vec![0];
    for k in 1..GRID - 1 {
        if dens[k] < dens[k - 1] && dens[k] < dens[k + 1] {
            minima.push(k);
        }
    }
    minima.push(GRID - 1);
    let total: f64 = dens.iter().sum();
    let peaks = minima
        .windows(2)
        .filter(|w| dens[w[0]..w[1]].iter().sum::<f64>() / total > MODE_MASS)
        .count();
    Some(peaks as f64)
}
