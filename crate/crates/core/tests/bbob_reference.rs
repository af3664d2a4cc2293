//! BBOB evaluations against values produced by the COCO reference
//! implementation (see `fixtures/gen_bbob_reference.py`).

use landmap::bbob::{make_problem, Objective};
use serde::Deserialize;

#[derive(Deserialize)]
struct Fixture {
    problems: Vec<Record>,
}

#[derive(Deserialize)]
struct Record {
    class_id: u8,
    instance_id: u32,
    dim: usize,
    x_opt: Vec<f64>,
    f_opt: f64,
    points: Vec<Vec<f64>>,
    values: Vec<f64>,
}

fn fixture() -> Fixture {
    let raw = include_str!("fixtures/bbob_reference.json");
    serde_json::from_str(raw).expect("fixture parses")
}

fn rel_err(a: f64, b: f64) -> f64 {
    (a - b).abs() / b.abs().max(1.0)
}

#[test]
fn values_match_reference_implementation() {
    let mut failures = Vec::new();
    let mut checked = 0;
    for r in fixture().problems {
        let p = make_problem(r.class_id, r.instance_id, r.dim).unwrap();
        for (x, &expect) in r.points.iter().zip(&r.values) {
            let got = p.evaluate(x).unwrap();
            checked += 1;
            if rel_err(got, expect) > 1e-6 {
                failures.push(format!(
                    "f{} i{} d{}: got {got}, reference {expect}",
                    r.class_id, r.instance_id, r.dim
                ));
            }
        }
    }
    assert!(checked >= 24 * 5 * 3 * 6);
    assert!(failures.is_empty(), "{} mismatches:\n{}", failures.len(), failures.join("\n"));
}

#[test]
fn optimum_matches_reference_implementation() {
    let mut failures = Vec::new();
    for r in fixture().problems {
        let p = make_problem(r.class_id, r.instance_id, r.dim).unwrap();
        let (x_opt, f_opt) = p.optimum();
        let dx = x_opt
            .iter()
            .zip(&r.x_opt)
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max);
        if dx > 1e-9 || (f_opt - r.f_opt).abs() > 1e-9 {
            failures.push(format!(
                "f{} i{} d{}: dx {dx}, f_opt {f_opt} vs {}",
                r.class_id, r.instance_id, r.dim, r.f_opt
            ));
        }
    }
    assert!(failures.is_empty(), "{}", failures.join("\n"));
}
