//! WebAssembly bindings for the static demo page in `www/`.
//!
//! Everything is two-dimensional so it can be drawn on a canvas.

use landmap::bbob::{make_problem, Objective};
use landmap::cluster::{fit, ClusteringConfig, CovarianceType, Linkage, Params};
use landmap::doe::{default_bounds, lhs, Placement};
use landmap::mabbob::AffineProblem;
use landmap::matrix::Matrix;
use landmap::metrics::silhouette;
use wasm_bindgen::prelude::*;

const DIM: usize = 2;

fn js_err(e: landmap::Error) -> JsError {
    JsError::new(&e.to_string())
}

fn problem(class_i: u8, class_j: u8, instance: u32, alpha: f64) -> Result<AffineProblem, landmap::Error> {
    AffineProblem::new(
        make_problem(class_i, instance, DIM)?,
        make_problem(class_j, instance, DIM)?,
        alpha,
    )
}

/// A blended landscape sampled on a `resolution x resolution` grid over `[-5, 5]^2`.
#[wasm_bindgen]
pub struct Landscape {
    resolution: usize,
    log_values: Vec<f64>,
    optimum: Vec<f64>,
}

#[wasm_bindgen]
impl Landscape {
    #[wasm_bindgen(constructor)]
    pub fn new(class_i: u8, class_j: u8, instance: u32, alpha: f64, resolution: usize) -> Result<Landscape, JsError> {
        let p = problem(class_i, class_j, instance, alpha).map_err(js_err)?;
        let resolution = resolution.clamp(2, 512);
        let step = 10.0 / (resolution - 1) as f64;
        let mut log_values = Vec::with_capacity(resolution * resolution);
        // row 0 is the top of the canvas, i.e. the largest x2
        for r in 0..resolution {
            let x2 = 5.0 - r as f64 * step;
            for c in 0..resolution {
                let x1 = -5.0 + c as f64 * step;
                log_values.push(p.value(&[x1, x2]).log10());
            }
        }
        Ok(Landscape {
            resolution,
            log_values,
            optimum: p.optimum().0,
        })
    }

    pub fn resolution(&self) -> usize {
        self.resolution
    }

    /// Row-major `log10` objective values.
    pub fn values(&self) -> Vec<f64> {
        self.log_values.clone()
    }

    pub fn optimum(&self) -> Vec<f64> {
        self.optimum.clone()
    }
}

/// Objective values of a blended problem at row-major 2-D points.
#[wasm_bindgen]
pub fn evaluate(class_i: u8, class_j: u8, instance: u32, alpha: f64, points: &[f64]) -> Result<Vec<f64>, JsError> {
    let p = problem(class_i, class_j, instance, alpha).map_err(js_err)?;
    Ok(points.chunks_exact(DIM).map(|x| p.value(x)).collect())
}

/// A Latin Hypercube design over `[-5, 5]^2`, row-major.
#[wasm_bindgen]
pub fn lhs_design(n: usize, seed: u64, midpoint: bool) -> Result<Vec<f64>, JsError> {
    let placement = if midpoint { Placement::Midpoint } else { Placement::Random };
    let d = lhs(n, DIM, &default_bounds(DIM), seed, placement).map_err(js_err)?;
    Ok(d.as_slice().to_vec())
}

#[wasm_bindgen]
pub struct Clustering {
    labels: Vec<u32>,
    silhouette: f64,
    note: Option<String>,
}

#[wasm_bindgen]
impl Clustering {
    pub fn labels(&self) -> Vec<u32> {
        self.labels.clone()
    }

    pub fn silhouette(&self) -> f64 {
        self.silhouette
    }

    pub fn note(&self) -> Option<String> {
        self.note.clone()
    }
}

/// Clusters row-major points of dimension `dim` and scores the result.
///
/// `algorithm` is one of `kmeans`, `agglomerative`, `gmm`, `birch`; `option`
/// is its parameter (`n_init`, linkage, covariance type or threshold) as text.
#[wasm_bindgen]
pub fn cluster(points: &[f64], dim: usize, algorithm: &str, option: &str, k: usize, seed: u64) -> Result<Clustering, JsError> {
    if dim == 0 || points.len() % dim != 0 {
        return Err(JsError::new("point buffer length is not a multiple of the dimension"));
    }
    let x = Matrix::new(points.len() / dim, dim, points.to_vec()).map_err(js_err)?;
    let bad = |what: &str| JsError::new(&format!("invalid {what} '{option}'"));
    let params = match algorithm {
        "kmeans" => Params::KMeans {
            n_init: option.parse().map_err(|_| bad("n_init"))?,
        },
        "agglomerative" => Params::Agglomerative {
            linkage: option.parse::<Linkage>().map_err(|_| bad("linkage"))?,
        },
        "gmm" => Params::Gmm {
            covariance_type: option.parse::<CovarianceType>().map_err(|_| bad("covariance type"))?,
        },
        "birch" => Params::Birch {
            threshold: option.parse().map_err(|_| bad("threshold"))?,
        },
        other => return Err(JsError::new(&format!("unknown algorithm '{other}'"))),
    };
    let config = ClusteringConfig::new(k, params, seed);
    config.validate(x.nrows()).map_err(js_err)?;
    let fitted = fit(&x, &config).map_err(js_err)?;
    let distinct = {
        let mut l = fitted.labels.clone();
        l.sort_unstable();
        l.dedup();
        l.len()
    };
    let score = if distinct > 1 {
        silhouette(&x, &fitted.labels, None, seed).map_err(js_err)?
    } else {
        0.0
    };
    Ok(Clustering {
        labels: fitted.labels.iter().map(|&l| l as u32).collect(),
        silhouette: score,
        note: fitted.note,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn landscape_minimum_sits_near_the_optimum() {
        let l = Landscape::new(1, 8, 1, 0.5, 101).unwrap();
        assert_eq!(l.values().len(), 101 * 101);
        assert!(l.values().iter().all(|v| v.is_finite()));
        assert_eq!(l.optimum().len(), 2);
    }

    #[test]
    fn design_and_clustering() {
        let pts = lhs_design(40, 3, false).unwrap();
        assert_eq!(pts.len(), 80);
        let c = cluster(&pts, 2, "kmeans", "10", 3, 1).unwrap();
        assert_eq!(c.labels().len(), 40);
        assert!((-1.0..=1.0).contains(&c.silhouette()));
        assert!(cluster(&pts, 2, "agglomerative", "ward", 3, 1).is_ok());
    }
}
