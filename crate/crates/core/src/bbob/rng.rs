//! The legacy BBOB pseudo-random generator and the instance quantities derived
//! from it (optimum location, optimal value, rotation matrices).
//!
//! Every routine here reproduces the reference generator bit for bit; the
//! arithmetic order is kept as is, even where a shorter form exists.

use super::Mat;

const MODULUS: i64 = 2_147_483_647;

fn park_miller_step(seed: i64) -> i64 {
    let tmp = seed / 127_773;
    let next = 16_807 * (seed - tmp * 127_773) - 2_836 * tmp;
    if next < 0 {
        next + MODULUS
    } else {
        next
    }
}

/// `n` uniform draws in (0, 1) from the shuffled Park-Miller generator.
pub(crate) fn uniform(n: usize, seed: i64) -> Vec<f64> {
    let mut seed = seed.abs().max(1);
    let mut table = [0i64; 32];
    for i in (0..40).rev() {
        seed = park_miller_step(seed);
        if i < 32 {
            table[i] = seed;
        }
    }
    let mut current = table[0];
    let mut out = Vec::with_capacity(n);
    for _ in 0..n {
        seed = park_miller_step(seed);
        let slot = (current / 67_108_865) as usize;
        current = table[slot];
        table[slot] = seed;
        let mut r = current as f64 / 2.147483647e9;
        if r == 0.0 {
            r = 1e-99;
        }
        out.push(r);
    }
    out
}

/// `n` standard normal draws via Box-Muller over `2n` uniforms.
pub(crate) fn gauss(n: usize, seed: i64) -> Vec<f64> {
    let u = uniform(2 * n, seed);
    (0..n)
        .map(|i| {
            let g = (-2.0 * u[i].ln()).sqrt() * (2.0 * std::f64::consts::PI * u[n + i]).cos();
            if g == 0.0 {
                1e-99
            } else {
                g
            }
        })
        .collect()
}

/// Orthonormal matrix from Gram-Schmidt on seeded Gaussian columns.
pub(crate) fn rotation(seed: i64, dim: usize) -> Mat {
    let g = gauss(dim * dim, seed);
    let mut b = Mat::zeros(dim);
    for i in 0..dim {
        for j in 0..dim {
            b[(i, j)] = g[j * dim + i];
        }
    }
    for i in 0..dim {
        for j in 0..i {
            let mut prod = 0.0;
            for k in 0..dim {
                prod += b[(k, i)] * b[(k, j)];
            }
            for k in 0..dim {
                let v = b[(k, j)];
                b[(k, i)] -= prod * v;
            }
        }
        let mut prod = 0.0;
        for k in 0..dim {
            prod += b[(k, i)] * b[(k, i)];
        }
        let norm = prod.sqrt();
        for k in 0..dim {
            b[(k, i)] /= norm;
        }
    }
    b
}

/// Optimum location on the 1e-4 lattice of [-4, 4], never exactly zero.
pub(crate) fn xopt(seed: i64, dim: usize) -> Vec<f64> {
    uniform(dim, seed)
        .into_iter()
        .map(|u| {
            let x = 8.0 * (1e4 * u).floor() / 1e4 - 4.0;
            if x == 0.0 {
                -1e-5
            } else {
                x
            }
        })
        .collect()
}

fn round_half_up(x: f64) -> f64 {
    (x + 0.5).floor()
}

/// Optimal function value of a class/instance, rounded to 1e-2 and clamped to [-1000, 1000].
pub(crate) fn fopt(class_id: u8, instance_id: u32) -> f64 {
    let base = match class_id {
        4 => 3,
        18 => 17,
        c => i64::from(c),
    };
    let seed = base + 10_000 * i64::from(instance_id);
    let g1 = gauss(1, seed)[0];
    let g2 = gauss(1, seed + 1)[0];
    let v = round_half_up(100.0 * 100.0 * g1 / g2) / 100.0;
    v.clamp(-1000.0, 1000.0)
}

/// Instance seed as used for the transformation parameters of a class.
pub(crate) fn instance_seed(class_id: u8, instance_id: u32) -> i64 {
    let base = match class_id {
        4 => 3,
        18 => 17,
        c => i64::from(c),
    };
    base + 10_000 * i64::from(instance_id)
}
