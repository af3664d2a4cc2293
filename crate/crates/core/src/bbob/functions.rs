//! Parameter construction and raw evaluation for each class.

use std::f64::consts::PI;

use super::rng;
use super::transforms::{
    asymmetric, boundary_penalty, conditioning, oscillate, oscillate_scalar, round_half_up, shift,
};
use super::{Mat, TransformParams};

const ROTATION_SEED_OFFSET: i64 = 1_000_000;
const SCHWEFEL_OPT: f64 = 4.2096874637;

#[derive(Debug, Clone, PartialEq)]
pub(crate) struct GallagherPeaks {
    rotation: Mat,
    /// Peak centres in the rotated space, one row per peak.
    centres: Vec<Vec<f64>>,
    /// Per-peak axis scalings.
    scales: Vec<Vec<f64>>,
    heights: Vec<f64>,
}

fn scaled_exponents(dim: usize, base: f64) -> Vec<f64> {
    (0..dim)
        .map(|k| base.powf(k as f64 / (dim as f64 - 1.0)))
        .collect()
}

/// Builds the parameters of a class instance and returns them with the optimum location.
pub(crate) fn build(class_id: u8, instance_id: u32, dim: usize) -> (TransformParams, Vec<f64>) {
    let seed = rng::instance_seed(class_id, instance_id);
    let rot_seed = seed + ROTATION_SEED_OFFSET;
    let mut p = TransformParams {
        seed,
        scale: 1.0,
        ..TransformParams::default()
    };
    let x_opt = match class_id {
        1 | 2 | 3 => {
            p.shift = rng::xopt(seed, dim);
            p.shift.clone()
        }
        4 => {
            let mut xo = rng::xopt(seed, dim);
            for v in xo.iter_mut().step_by(2) {
                *v = v.abs();
            }
            p.shift = xo.clone();
            xo
        }
        5 => {
            let xo: Vec<f64> = rng::xopt(seed, dim)
                .into_iter()
                .map(|v| if v < 0.0 { -5.0 } else { 5.0 })
                .collect();
            p.shift = xo.clone();
            xo
        }
        6 | 13 | 15 | 16 | 23 => {
            p.shift = rng::xopt(seed, dim);
            let rot1 = rng::rotation(rot_seed, dim);
            let rot2 = rng::rotation(seed, dim);
            let base = match class_id {
                16 => 1.0 / 100f64.sqrt(),
                23 => 100f64.sqrt(),
                _ => 10f64.sqrt(),
            };
            p.linear = Some(Mat::sandwich(&rot1, &scaled_exponents(dim, base), &rot2));
            p.rot1 = Some(rot1);
            p.rot2 = Some(rot2);
            p.shift.clone()
        }
        7 | 17 | 18 | 24 => {
            let xo = if class_id == 24 {
                rng::gauss(dim, seed)
                    .into_iter()
                    .map(|g| if g < 0.0 { -1.25 } else { 1.25 })
                    .collect()
            } else {
                rng::xopt(seed, dim)
            };
            p.shift = xo.clone();
            p.rot1 = Some(rng::rotation(rot_seed, dim));
            p.rot2 = Some(rng::rotation(seed, dim));
            p.scale = match class_id {
                17 => 10.0,
                18 => 1000.0,
                _ => 1.0,
            };
            xo
        }
        8 => {
            p.scale = 1f64.max((dim as f64).sqrt() / 8.0);
            p.shift = rng::xopt(seed, dim).into_iter().map(|v| v * 0.75).collect();
            p.shift.clone()
        }
        9 | 19 => {
            p.scale = 1f64.max((dim as f64).sqrt() / 8.0);
            let rot = rng::rotation(seed, dim);
            let half = vec![0.5; dim];
            let xo = rot
                .transpose_mul_vec(&half)
                .into_iter()
                .map(|v| v / p.scale)
                .collect();
            p.rot1 = Some(rot);
            xo
        }
        10 | 11 | 14 => {
            p.shift = rng::xopt(seed, dim);
            p.rot1 = Some(rng::rotation(rot_seed, dim));
            p.shift.clone()
        }
        12 => {
            p.shift = rng::xopt(rot_seed, dim);
            p.rot1 = Some(rng::rotation(rot_seed, dim));
            p.shift.clone()
        }
        20 => {
            let xo: Vec<f64> = rng::uniform(dim, seed)
                .into_iter()
                .map(|u| if u < 0.5 { -0.5 } else { 0.5 } * SCHWEFEL_OPT)
                .collect();
            p.shift = xo.clone();
            xo
        }
        21 | 22 => {
            let (peaks, xo) = gallagher_peaks(seed, dim, if class_id == 21 { 101 } else { 21 });
            p.gallagher = Some(Box::new(peaks));
            p.shift = xo.clone();
            xo
        }
        _ => unreachable!("class id validated by caller"),
    };
    (p, x_opt)
}

fn gallagher_peaks(seed: i64, dim: usize, n_peaks: usize) -> (GallagherPeaks, Vec<f64>) {
    const MAX_CONDITION: f64 = 1000.0;
    const HEIGHT_LOW: f64 = 1.1;
    const HEIGHT_HIGH: f64 = 9.1;
    let (first_condition, b, c) = if n_peaks == 101 {
        (MAX_CONDITION.sqrt(), 10.0, 5.0)
    } else {
        (MAX_CONDITION, 9.8, 4.9)
    };
    let rotation = rng::rotation(seed, dim);

    let draws = rng::uniform(n_peaks - 1, seed);
    let order = argsort(&draws);
    let mut conditions = vec![first_condition];
    let mut heights = vec![10.0];
    for i in 1..n_peaks {
        conditions.push(MAX_CONDITION.powf(order[i - 1] as f64 / (n_peaks as f64 - 2.0)));
        heights.push(
            (i as f64 - 1.0) / (n_peaks as f64 - 2.0) * (HEIGHT_HIGH - HEIGHT_LOW) + HEIGHT_LOW,
        );
    }

    let scales = (0..n_peaks)
        .map(|i| {
            let draws = rng::uniform(dim, seed + 1000 * i as i64);
            let order = argsort(&draws);
            order
                .iter()
                .map(|&j| conditions[i].powf(j as f64 / (dim as f64 - 1.0) - 0.5))
                .collect()
        })
        .collect();

    let u = rng::uniform(dim * n_peaks, seed);
    let x_opt: Vec<f64> = (0..dim).map(|i| 0.8 * (b * u[i] - c)).collect();
    let centres = (0..n_peaks)
        .map(|j| {
            let y: Vec<f64> = (0..dim).map(|k| b * u[j * dim + k] - c).collect();
            let mut centre = rotation.mul_vec(&y);
            if j == 0 {
                for v in centre.iter_mut() {
                    *v *= 0.8;
                }
            }
            centre
        })
        .collect();
    (
        GallagherPeaks {
            rotation,
            centres,
            scales,
            heights,
        },
        x_opt,
    )
}

/// Indices that sort `values` ascending.
fn argsort(values: &[f64]) -> Vec<usize> {
    let mut idx: Vec<usize> = (0..values.len()).collect();
    idx.sort_by(|&a, &b| values[a].total_cmp(&values[b]));
    idx
}

fn rot(m: &Option<Mat>) -> &Mat {
    m.as_ref().expect("rotation present for this class")
}

/// Function value minus the optimal value.
pub(crate) fn evaluate(class_id: u8, p: &TransformParams, x: &[f64]) -> f64 {
    let n = x.len();
    match class_id {
        1 => sphere(&shift(x, &p.shift)),
        2 => {
            let mut z = shift(x, &p.shift);
            oscillate(&mut z);
            ellipsoid(&z)
        }
        3 => {
            let mut z = shift(x, &p.shift);
            oscillate(&mut z);
            asymmetric(&mut z, 0.2);
            conditioning(&mut z, 10.0);
            rastrigin(&z)
        }
        4 => {
            let mut z = shift(x, &p.shift);
            oscillate(&mut z);
            for (i, v) in z.iter_mut().enumerate() {
                let mut factor = 10f64.sqrt().powf(i as f64 / (n as f64 - 1.0));
                if *v > 0.0 && i % 2 == 0 {
                    factor *= 10.0;
                }
                *v *= factor;
            }
            rastrigin(&z) + 100.0 * boundary_penalty(x)
        }
        5 => linear_slope(x, &p.shift),
        6 => {
            let z = p.linear.as_ref().unwrap().mul_vec(&shift(x, &p.shift));
            let raw: f64 = z
                .iter()
                .zip(&p.shift)
                .map(|(&zi, &oi)| if oi * zi > 0.0 { 1e4 * zi * zi } else { zi * zi })
                .sum();
            oscillate_scalar(raw).powf(0.9)
        }
        7 => step_ellipsoid(x, p),
        8 => {
            let z: Vec<f64> = shift(x, &p.shift)
                .into_iter()
                .map(|v| v * p.scale + 1.0)
                .collect();
            rosenbrock(&z)
        }
        9 | 19 => {
            let z: Vec<f64> = rot(&p.rot1)
                .mul_vec(x)
                .into_iter()
                .map(|v| v * p.scale + 0.5)
                .collect();
            if class_id == 9 {
                rosenbrock(&z)
            } else {
                griewank_rosenbrock(&z)
            }
        }
        10 | 11 => {
            let mut z = rot(&p.rot1).mul_vec(&shift(x, &p.shift));
            oscillate(&mut z);
            if class_id == 10 {
                ellipsoid(&z)
            } else {
                discus(&z)
            }
        }
        12 => {
            let r = rot(&p.rot1);
            let mut z = r.mul_vec(&shift(x, &p.shift));
            asymmetric(&mut z, 0.5);
            bent_cigar(&r.mul_vec(&z))
        }
        13 => sharp_ridge(&p.linear.as_ref().unwrap().mul_vec(&shift(x, &p.shift))),
        14 => different_powers(&rot(&p.rot1).mul_vec(&shift(x, &p.shift))),
        15 => {
            let mut z = rot(&p.rot1).mul_vec(&shift(x, &p.shift));
            oscillate(&mut z);
            asymmetric(&mut z, 0.2);
            rastrigin(&p.linear.as_ref().unwrap().mul_vec(&z))
        }
        16 => {
            let mut z = rot(&p.rot1).mul_vec(&shift(x, &p.shift));
            oscillate(&mut z);
            weierstrass(&p.linear.as_ref().unwrap().mul_vec(&z)) + 10.0 / n as f64 * boundary_penalty(x)
        }
        17 | 18 => {
            let mut z = rot(&p.rot1).mul_vec(&shift(x, &p.shift));
            asymmetric(&mut z, 0.5);
            let mut z = rot(&p.rot2).mul_vec(&z);
            conditioning(&mut z, p.scale);
            schaffers(&z) + 10.0 * boundary_penalty(x)
        }
        20 => schwefel(x, &p.shift),
        21 | 22 => gallagher(x, p.gallagher.as_deref().unwrap()),
        23 => {
            katsuura(&p.linear.as_ref().unwrap().mul_vec(&shift(x, &p.shift))) + boundary_penalty(x)
        }
        24 => lunacek(x, p),
        _ => unreachable!("class id validated at construction"),
    }
}

fn sphere(z: &[f64]) -> f64 {
    z.iter().map(|v| v * v).sum()
}

fn ellipsoid(z: &[f64]) -> f64 {
    let n = z.len() as f64;
    z.iter()
        .enumerate()
        .map(|(i, v)| 1e6f64.powf(i as f64 / (n - 1.0)) * v * v)
        .sum()
}

fn rastrigin(z: &[f64]) -> f64 {
    let n = z.len() as f64;
    let cos_sum: f64 = z.iter().map(|v| (2.0 * PI * v).cos()).sum();
    10.0 * (n - cos_sum) + sphere(z)
}

fn linear_slope(x: &[f64], best: &[f64]) -> f64 {
    let n = x.len() as f64;
    x.iter()
        .zip(best)
        .enumerate()
        .map(|(i, (&xi, &bi))| {
            let magnitude = 10f64.powf(i as f64 / (n - 1.0));
            let s = if bi > 0.0 { magnitude } else { -magnitude };
            if xi * bi < 25.0 {
                5.0 * s.abs() - s * xi
            } else {
                5.0 * s.abs() - s * bi
            }
        })
        .sum()
}

fn step_ellipsoid(x: &[f64], p: &TransformParams) -> f64 {
    const CONDITION: f64 = 100.0;
    let n = x.len();
    let penalty = boundary_penalty(x);
    let centred = shift(x, &p.shift);
    let rot2 = rot(&p.rot2);
    let mut z: Vec<f64> = (0..n)
        .map(|i| {
            let c = (CONDITION / 10.0).powf(i as f64 / (n as f64 - 1.0)).sqrt();
            rot2.row(i)
                .iter()
                .zip(&centred)
                .map(|(r, v)| c * r * v)
                .sum()
        })
        .collect();
    let first = z[0];
    for v in z.iter_mut() {
        *v = if v.abs() > 0.5 {
            round_half_up(*v)
        } else {
            round_half_up(10.0 * *v) / 10.0
        };
    }
    let zz = rot(&p.rot1).mul_vec(&z);
    let core: f64 = zz
        .iter()
        .enumerate()
        .map(|(i, v)| CONDITION.powf(i as f64 / (n as f64 - 1.0)) * v * v)
        .sum();
    0.1 * (first.abs() * 1e-4).max(core) + penalty
}

fn rosenbrock(z: &[f64]) -> f64 {
    z.windows(2)
        .map(|w| {
            let a = w[0] * w[0] - w[1];
            let b = w[0] - 1.0;
            100.0 * a * a + b * b
        })
        .sum()
}

fn discus(z: &[f64]) -> f64 {
    1e6 * z[0] * z[0] + z[1..].iter().map(|v| v * v).sum::<f64>()
}

fn bent_cigar(z: &[f64]) -> f64 {
    z[0] * z[0] + 1e6 * z[1..].iter().map(|v| v * v).sum::<f64>()
}

fn sharp_ridge(z: &[f64]) -> f64 {
    let tail: f64 = z[1..].iter().map(|v| v * v).sum();
    100.0 * tail.sqrt() + z[0] * z[0]
}

fn different_powers(z: &[f64]) -> f64 {
    let n = z.len() as f64;
    z.iter()
        .enumerate()
        .map(|(i, v)| v.abs().powf(2.0 + 4.0 * i as f64 / (n - 1.0)))
        .sum::<f64>()
        .sqrt()
}

fn weierstrass(z: &[f64]) -> f64 {
    const TERMS: i32 = 12;
    let n = z.len() as f64;
    let f0: f64 = (0..TERMS)
        .map(|k| 0.5f64.powi(k) * (PI * 3f64.powi(k)).cos())
        .sum();
    let mut acc = 0.0;
    for &v in z {
        for k in 0..TERMS {
            acc += (2.0 * PI * (v + 0.5) * 3f64.powi(k)).cos() * 0.5f64.powi(k);
        }
    }
    10.0 * (acc / n - f0).powi(3)
}

fn schaffers(z: &[f64]) -> f64 {
    let n = z.len() as f64;
    let s: f64 = z
        .windows(2)
        .map(|w| {
            let t = w[0] * w[0] + w[1] * w[1];
            t.powf(0.25) * (1.0 + (50.0 * t.powf(0.1)).sin().powi(2))
        })
        .sum();
    (s / (n - 1.0)).powi(2)
}

fn griewank_rosenbrock(z: &[f64]) -> f64 {
    let n = z.len() as f64;
    let s: f64 = z
        .windows(2)
        .map(|w| {
            let a = w[0] * w[0] - w[1];
            let b = 1.0 - w[0];
            let t = 100.0 * a * a + b * b;
            t / 4000.0 - t.cos()
        })
        .sum();
    10.0 + 10.0 * s / (n - 1.0)
}

fn schwefel(x: &[f64], x_opt: &[f64]) -> f64 {
    let n = x.len();
    let x_hat: Vec<f64> = x
        .iter()
        .zip(x_opt)
        .map(|(&v, &o)| 2.0 * if o < 0.0 { -v } else { v })
        .collect();
    let mut z = vec![0.0; n];
    z[0] = x_hat[0];
    for i in 1..n {
        z[i] = x_hat[i] + 0.25 * (x_hat[i - 1] - 2.0 * x_opt[i - 1].abs());
    }
    let twice_abs: Vec<f64> = x_opt.iter().map(|o| 2.0 * o.abs()).collect();
    let mut z = shift(&z, &twice_abs);
    conditioning(&mut z, 10.0);
    let z: Vec<f64> = z
        .iter()
        .zip(&twice_abs)
        .map(|(v, t)| 100.0 * (v + t))
        .collect();

    let penalty: f64 = z
        .iter()
        .map(|v| {
            let excess = v.abs() - 500.0;
            if excess > 0.0 {
                excess * excess
            } else {
                0.0
            }
        })
        .sum();
    let s: f64 = z.iter().map(|v| v * v.abs().sqrt().sin()).sum();
    0.01 * (penalty + 418.982_887_272_433_9 - s / n as f64)
}

fn gallagher(x: &[f64], g: &GallagherPeaks) -> f64 {
    let n = x.len() as f64;
    let fac = -0.5 / n;
    let penalty = boundary_penalty(x);
    let t = g.rotation.mul_vec(x);
    let mut best = 0.0f64;
    for ((centre, scales), height) in g.centres.iter().zip(&g.scales).zip(&g.heights) {
        let q: f64 = t
            .iter()
            .zip(centre)
            .zip(scales)
            .map(|((ti, ci), si)| {
                let d = ti - ci;
                si * d * d
            })
            .sum();
        best = best.max(height * (fac * q).exp());
    }
    let f = oscillate_scalar(10.0 - best);
    f * f + penalty
}

fn katsuura(z: &[f64]) -> f64 {
    let n = z.len() as f64;
    let mut product = 1.0;
    for (i, &v) in z.iter().enumerate() {
        let mut acc = 0.0;
        for j in 1..33 {
            let p = 2f64.powi(j);
            acc += (p * v - round_half_up(p * v)).abs() / p;
        }
        product *= 1.0 + (i as f64 + 1.0) * acc;
    }
    10.0 / n / n * (-1.0 + product.powf(10.0 / n.powf(1.2)))
}

fn lunacek(x: &[f64], p: &TransformParams) -> f64 {
    const CONDITION: f64 = 100.0;
    const MU0: f64 = 2.5;
    const D: f64 = 1.0;
    let n = x.len();
    let nf = n as f64;
    let s = 1.0 - 0.5 / ((nf + 20.0).sqrt() - 4.1);
    let mu1 = -((MU0 * MU0 - D) / s).sqrt();
    let penalty = boundary_penalty(x);
    let x_hat: Vec<f64> = x
        .iter()
        .zip(&p.shift)
        .map(|(&v, &o)| if o < 0.0 { -2.0 * v } else { 2.0 * v })
        .collect();
    let centred: Vec<f64> = x_hat.iter().map(|v| v - MU0).collect();
    let rot2 = rot(&p.rot2);
    let tmp: Vec<f64> = (0..n)
        .map(|i| {
            let c = CONDITION.sqrt().powf(i as f64 / (nf - 1.0));
            rot2.row(i)
                .iter()
                .zip(&centred)
                .map(|(r, v)| c * r * v)
                .sum()
        })
        .collect();
    let z = rot(&p.rot1).mul_vec(&tmp);
    let sum1: f64 = x_hat.iter().map(|v| (v - MU0) * (v - MU0)).sum();
    let sum2: f64 = x_hat.iter().map(|v| (v - mu1) * (v - mu1)).sum();
    let sum3: f64 = z.iter().map(|v| (2.0 * PI * v).cos()).sum();
    sum1.min(D * nf + s * sum2) + 10.0 * (nf - sum3) + 1e4 * penalty
}
