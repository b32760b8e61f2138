//! Adaptive Gauss–Kronrod 7/15 quadrature with optional square-root endpoint
//! substitution for integrable `1/sqrt` singularities.

use crate::error::{Error, Result};

const XGK: [f64; 8] = [
    0.991_455_371_120_812_6,
    0.949_107_912_342_758_5,
    0.864_864_423_359_769_1,
    0.741_531_185_599_394_4,
    0.586_087_235_467_691_1,
    0.405_845_151_377_397_2,
    0.207_784_955_007_898_5,
    0.0,
];
const WGK: [f64; 8] = [
    0.022_935_322_010_529_22,
    0.063_092_092_629_978_55,
    0.104_790_010_322_250_2,
    0.140_653_259_715_525_9,
    0.169_004_726_639_267_9,
    0.190_350_578_064_785_4,
    0.204_432_940_075_298_9,
    0.209_482_141_084_727_8,
];
const WG: [f64; 4] = [
    0.129_484_966_168_869_7,
    0.279_705_391_489_276_7,
    0.381_830_050_505_118_9,
    0.417_959_183_673_469_4,
];

#[derive(Debug, Clone, Copy)]
pub struct QuadOptions {
    pub abs_tol: f64,
    pub rel_tol: f64,
    pub max_intervals: usize,
}

impl Default for QuadOptions {
    fn default() -> Self {
        Self {
            abs_tol: 1e-13,
            rel_tol: 1e-12,
            max_intervals: 4000,
        }
    }
}

/// Which endpoint of `[a, b]` carries an inverse-square-root singularity.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Singular {
    None,
    Lower,
    Upper,
}

fn gk15(f: &impl Fn(f64) -> f64, a: f64, b: f64) -> (f64, f64) {
    let c = 0.5 * (a + b);
    let h = 0.5 * (b - a);
    let fc = f(c);
    let mut kronrod = WGK[7] * fc;
    let mut gauss = WG[3] * fc;
    for j in 0..7 {
        let dx = h * XGK[j];
        let s = f(c - dx) + f(c + dx);
        kronrod += WGK[j] * s;
        if j % 2 == 1 {
            gauss += WG[j / 2] * s;
        }
    }
    (kronrod * h, ((kronrod - gauss) * h).abs())
}

/// Adaptive integration of `f` over `[a, b]`, returning `(value, error estimate)`.
pub fn integrate(f: impl Fn(f64) -> f64, a: f64, b: f64, opts: &QuadOptions) -> Result<(f64, f64)> {
    if a == b {
        return Ok((0.0, 0.0));
    }
    let (v, e) = gk15(&f, a, b);
    let mut parts = vec![(a, b, v, e)];
    loop {
        let total: f64 = parts.iter().map(|p| p.2).sum();
        let err: f64 = parts.iter().map(|p| p.3).sum();
        if !total.is_finite() || !err.is_finite() {
            return Err(Error::QuadratureFailure { error: err });
        }
        if err <= opts.abs_tol.max(opts.rel_tol * total.abs()) {
            return Ok((total, err));
        }
        if parts.len() >= opts.max_intervals {
            return Err(Error::QuadratureFailure { error: err });
        }
        let worst = parts
            .iter()
            .enumerate()
            .max_by(|x, y| x.1 .3.partial_cmp(&y.1 .3).unwrap())
            .map(|(i, _)| i)
            .unwrap();
        let (lo, hi, _, _) = parts.swap_remove(worst);
        let mid = 0.5 * (lo + hi);
        if mid <= lo.min(hi) || mid >= lo.max(hi) {
            return Err(Error::QuadratureFailure { error: err });
        }
        let (v1, e1) = gk15(&f, lo, mid);
        let (v2, e2) = gk15(&f, mid, hi);
        parts.push((lo, mid, v1, e1));
        parts.push((mid, hi, v2, e2));
    }
}

/// Like [`integrate`] but removes a `1/sqrt(x - endpoint)` singularity with the
/// substitution `x = endpoint ± w^2`.
pub fn integrate_singular(
    f: impl Fn(f64) -> f64,
    a: f64,
    b: f64,
    singular: Singular,
    opts: &QuadOptions,
) -> Result<(f64, f64)> {
    let len = b - a;
    match singular {
        Singular::None => integrate(f, a, b, opts),
        Singular::Lower => {
            let w_max = len.abs().sqrt();
            let s = len.signum();
            integrate(|w| 2.0 * w * s * f(a + s * w * w), 0.0, w_max, opts)
        }
        Singular::Upper => {
            let w_max = len.abs().sqrt();
            let s = len.signum();
            integrate(|w| 2.0 * w * s * f(b - s * w * w), 0.0, w_max, opts)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    #[test]
    fn polynomial_is_exact() {
        let (v, _) = integrate(|x| x.powi(5) - 2.0 * x, -1.0, 2.0, &QuadOptions::default()).unwrap();
        assert!((v - (64.0 / 6.0 - 1.0 / 6.0 - 3.0)).abs() < 1e-13);
    }

    #[test]
    fn oscillatory_integrand() {
        let (v, _) = integrate(|x| (10.0 * x).sin(), 0.0, PI, &QuadOptions::default()).unwrap();
        assert!(v.abs() < 1e-12);
    }

    #[test]
    fn sqrt_singularity_at_either_end() {
        let o = QuadOptions::default();
        let (v, _) = integrate_singular(|x| 1.0 / (1.0 - x * x).sqrt(), 0.0, 1.0, Singular::Upper, &o).unwrap();
        assert!((v - PI / 2.0).abs() < 1e-12);
        let (v, _) = integrate_singular(|x| 1.0 / x.sqrt(), 0.0, 4.0, Singular::Lower, &o).unwrap();
        assert!((v - 4.0).abs() < 1e-12);
    }

    #[test]
    fn reversed_interval_changes_sign() {
        let o = QuadOptions::default();
        let (v, _) = integrate_singular(|x| 1.0 / x.sqrt(), 4.0, 0.0, Singular::Upper, &o).unwrap();
        assert!((v + 4.0).abs() < 1e-12);
    }

    #[test]
    fn non_integrable_input_fails() {
        let r = integrate(|x| 1.0 / x, 0.0, 1.0, &QuadOptions::default());
        assert!(matches!(r, Err(Error::QuadratureFailure { .. })));
    }
}
