//! Dispersion of the best points relative to the whole sample.

use super::stats::{mean, median, quantile};
use super::Sample;

pub(super) const QUANTILES: [f64; 4] = [0.02, 0.05, 0.10, 0.25];

pub(super) fn entries() -> Vec<(String, &'static str)> {
    let mut out = Vec::new();
    let kinds: [(&str, &'static str); 4] = [
        (
            "ratio_mean",
            "mean pairwise distance among points with y at or below the quantile, divided by the mean over all points",
        ),
        ("ratio_median", "as ratio_mean with medians of the pairwise distances"),
        ("diff_mean", "mean pairwise distance of the best points minus the mean over all points"),
        ("diff_median", "as diff_mean with medians of the pairwise distances"),
    ];
    for (kind, def) in kinds {
        for q in QUANTILES {
            out.push((format!("{kind}_{:02}", (q * 100.0).round() as u32), def));
        }
    }
    out
}

pub(super) fn compute(s: &Sample) -> Vec<Option<f64>> {
    let all = s.all_distances();
    let all_mean = mean(all);
    let all_median = median(all);
    let mut ratio_mean = Vec::new();
    let mut ratio_median = Vec::new();
    let mut diff_mean = Vec::new();
    let mut diff_median = Vec::new();
    for q in QUANTILES {
        let threshold = quantile(&s.y, q);
        let best: Vec<usize> = (0..s.n).filter(|&i| s.y[i] <= threshold).collect();
        if best.len() < 2 || !(all_mean > 0.0) {
            ratio_mean.push(None);
            ratio_median.push(None);
            diff_mean.push(None);
            diff_median.push(None);
            continue;
        }
        let mut d = Vec::with_capacity(best.len() * (best.len() - 1) / 2);
        for (a, &i) in best.iter().enumerate() {
            for &j in &best[a + 1..] {
                d.push(s.dist(i, j));
            }
        }
        let m = mean(&d);
        let med = median(&d);
        ratio_mean.push(Some(m / all_mean));
        ratio_median.push(if all_median > 0.0 { Some(med / all_median) } else { None });
        diff_mean.push(Some(m - all_mean));
        diff_median.push(Some(med - all_median));
    }
    [ratio_mean, ratio_median, diff_mean, diff_median].concat()
}
