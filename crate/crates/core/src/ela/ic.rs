//! Information content of a nearest-neighbour random walk through the sample.

use super::Sample;

pub(super) const ENTRIES: [(&str, &str); 5] = [
    ("h_max", "maximum over epsilon of the entropy of consecutive symbol pairs (base 6, in [0, 1])"),
    ("eps_s", "log10 of the smallest epsilon at which the entropy falls below 0.05"),
    ("eps_max", "log10 of the (median) positive epsilon attaining h_max"),
    ("eps_ratio", "log10 of the largest epsilon whose partial information exceeds half of m0"),
    ("m0", "partial information at epsilon = 0"),
];

const SETTLING: f64 = 0.05;
const RATIO: f64 = 0.5;

/// `0` followed by `10^k` for `k = -5, -4.95, ..., 15`.
pub(crate) fn epsilon_grid() -> Vec<f64> {
    std::iter::once(0.0)
        .chain((0..=400).map(|k| 10f64.powf(-5.0 + 0.05 * k as f64)))
        .collect()
}

/// Greedy nearest-neighbour tour over all points from `start`; ties go to the lower index.
fn tour(s: &Sample, start: usize) -> Vec<usize> {
    let mut visited = vec![false; s.n];
    let mut order = Vec::with_capacity(s.n);
    let mut current = start;
    visited[current] = true;
    order.push(current);
    for _ in 1..s.n {
        let mut next = None;
        let mut best = f64::INFINITY;
        for j in 0..s.n {
            if !visited[j] {
                let d = s.dist(current, j);
                if d < best {
                    best = d;
                    next = Some(j);
                }
            }
        }
        let j = next.expect("unvisited point remains");
        visited[j] = true;
        order.push(j);
        current = j;
    }
    order
}

fn symbols(psi: &[f64], eps: f64) -> Vec<i8> {
    psi.iter()
        .map(|&v| {
            if v > eps {
                1
            } else if v < -eps {
                -1
            } else {
                0
            }
        })
        .collect()
}

/// Entropy of ordered pairs of distinct consecutive symbols, log base 6.
pub(crate) fn entropy(sym: &[i8]) -> f64 {
    if sym.len() < 2 {
        return 0.0;
    }
    let mut counts = [[0usize; 3]; 3];
    for w in sym.windows(2) {
        counts[(w[0] + 1) as usize][(w[1] + 1) as usize] += 1;
    }
    let total = (sym.len() - 1) as f64;
    let mut h = 0.0;
    for (a, row) in counts.iter().enumerate() {
        for (b, &c) in row.iter().enumerate() {
            if a != b && c > 0 {
                let p = c as f64 / total;
                h -= p * p.ln() / 6f64.ln();
            }
        }
    }
    h
}

/// Length of the sign-alternating subsequence of non-zero symbols, over the sequence length.
pub(crate) fn partial_information(sym: &[i8]) -> f64 {
    if sym.is_empty() {
        return 0.0;
    }
    let mut count = 0usize;
    let mut last = 0i8;
    for &v in sym {
        if v != 0 && v != last {
            count += 1;
            last = v;
        }
    }
    count as f64 / sym.len() as f64
}

pub(super) fn compute(s: &Sample, seed: u64) -> Vec<Option<f64>> {
    let start = (seed % s.n as u64) as usize;
    let order = tour(s, start);
    let psi: Vec<f64> = order
        .windows(2)
        .filter_map(|w| {
            let d = s.dist(w[0], w[1]);
            if d > 0.0 {
                Some((s.y[w[1]] - s.y[w[0]]) / d)
            } else {
                None
            }
        })
        .collect();
    if psi.len() < 2 {
        return vec![None; ENTRIES.len()];
    }
    let grid = epsilon_grid();
    let h: Vec<f64> = grid.iter().map(|&e| entropy(&symbols(&psi, e))).collect();
    let m: Vec<f64> = grid.iter().map(|&e| partial_information(&symbols(&psi, e))).collect();

    let h_max = h.iter().cloned().fold(0.0, f64::max);
    let eps_s = grid
        .iter()
        .zip(&h)
        .skip(1)
        .find(|(_, &v)| v < SETTLING)
        .map(|(e, _)| e.log10());
    let at_max: Vec<f64> = grid
        .iter()
        .zip(&h)
        .skip(1)
        .filter(|(_, &v)| (v - h_max).abs() <= 1e-12)
        .map(|(e, _)| e.log10())
        .collect();
    let eps_max = if at_max.is_empty() {
        None
    } else {
        Some(super::stats::median(&at_max))
    };
    let m0 = m[0];
    let eps_ratio = if m0 > 0.0 {
        grid.iter()
            .zip(&m)
            .skip(1)
            .filter(|(_, &v)| v > RATIO * m0)
            .map(|(e, _)| e.log10())
            .last()
    } else {
        None
    };
    vec![Some(h_max), eps_s, eps_max, eps_ratio, Some(m0)]
}
