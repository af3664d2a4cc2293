//! Search-space and objective-space transformations shared by the BBOB classes.

/// Oscillation `T_osz` of a single value.
pub(crate) fn oscillate_scalar(x: f64) -> f64 {
    const ALPHA: f64 = 0.1;
    if x > 0.0 {
        let t = x.ln() / ALPHA;
        (t + 0.49 * (t.sin() + (0.79 * t).sin())).exp().powf(ALPHA)
    } else if x < 0.0 {
        let t = (-x).ln() / ALPHA;
        -(t + 0.49 * ((0.55 * t).sin() + (0.31 * t).sin())).exp().powf(ALPHA)
    } else {
        0.0
    }
}

pub(crate) fn oscillate(x: &mut [f64]) {
    for v in x.iter_mut() {
        *v = oscillate_scalar(*v);
    }
}

/// Asymmetry `T_asy^beta`.
pub(crate) fn asymmetric(x: &mut [f64], beta: f64) {
    let n = x.len() as f64;
    for (i, v) in x.iter_mut().enumerate() {
        if *v > 0.0 {
            let exponent = 1.0 + (beta * i as f64) / (n - 1.0) * v.sqrt();
            *v = v.powf(exponent);
        }
    }
}

/// Diagonal scaling by `alpha^(0.5 i / (d - 1))`.
pub(crate) fn conditioning(x: &mut [f64], alpha: f64) {
    let n = x.len() as f64;
    for (i, v) in x.iter_mut().enumerate() {
        *v *= alpha.powf(0.5 * i as f64 / (n - 1.0));
    }
}

/// Sum of squared excursions outside [-5, 5].
pub(crate) fn boundary_penalty(x: &[f64]) -> f64 {
    x.iter()
        .map(|&v| {
            let excess = v.abs() - 5.0;
            if excess > 0.0 {
                excess * excess
            } else {
                0.0
            }
        })
        .sum()
}

pub(crate) fn shift(x: &[f64], offset: &[f64]) -> Vec<f64> {
    x.iter().zip(offset).map(|(a, b)| a - b).collect()
}

pub(crate) fn round_half_up(x: f64) -> f64 {
    (x + 0.5).floor()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn oscillation_fixes_zero_and_sign() {
        assert_eq!(oscillate_scalar(0.0), 0.0);
        assert!(oscillate_scalar(2.0) > 0.0);
        assert!(oscillate_scalar(-2.0) < 0.0);
    }

    #[test]
    fn oscillation_matches_closed_form() {
        // sign(x) exp(xh + 0.049 (sin(c1 xh) + sin(c2 xh)))
        for &x in &[0.3f64, 1.7, -0.4, -3.2, 12.0] {
            let xh = x.abs().ln();
            let (c1, c2) = if x > 0.0 { (10.0, 7.9) } else { (5.5, 3.1) };
            let expect = x.signum() * (xh + 0.049 * ((c1 * xh).sin() + (c2 * xh).sin())).exp();
            assert!((oscillate_scalar(x) - expect).abs() < 1e-12 * expect.abs().max(1.0));
        }
    }

    #[test]
    fn asymmetry_leaves_negatives_and_first_coordinate() {
        let mut x = vec![2.0, -1.0, 0.5];
        asymmetric(&mut x, 0.2);
        assert_eq!(x[0], 2.0);
        assert_eq!(x[1], -1.0);
        assert!((x[2] - 0.5f64.powf(1.0 + 0.2 * 0.5f64.sqrt())).abs() < 1e-15);
    }

    #[test]
    fn penalty_is_zero_inside_box() {
        assert_eq!(boundary_penalty(&[4.9, -5.0, 0.0]), 0.0);
        assert!((boundary_penalty(&[6.0, -7.0]) - 5.0).abs() < 1e-15);
    }
}
