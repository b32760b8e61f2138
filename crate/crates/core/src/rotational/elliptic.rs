//! Meridians with constant `a - b` written through Legendre's incomplete
//! elliptic integrals.
//!
//! With `u^2 = A r^2 + B` the quartic under the root of `t(r)` factors as
//! `(1/m - u^2)(u^2 + 1/m')`, which fixes `m`, `m'` below.
//!
//! For `A < 0` the substitution `u = x / sqrt(-m')` gives modulus
//! `sqrt(-m / m')` and `t = J2 / (A (-m')^{3/2})`. The coefficient
//! `-1 / (A m sqrt(-m'))` that is sometimes quoted for this case differs from it
//! by the factor `m' / m` and does not reproduce the quadrature; it is kept as
//! [`case_ii_quoted_prefactor`] for comparison only.

use crate::error::{Error, Result};
use crate::numeric::quad::{integrate, QuadOptions};

use super::meridian::meridian_t;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EllipticParams {
    pub a: f64,
    pub b: f64,
    pub m: f64,
    pub m_prime: f64,
    pub modulus: f64,
}

impl EllipticParams {
    pub fn new(a: f64, b: f64) -> Result<Self> {
        if a == 0.0 || !a.is_finite() || !b.is_finite() {
            return Err(Error::InvalidArgument(format!("need finite A != 0, got A = {a}")));
        }
        let d = b * b + 4.0 * a;
        if d < 0.0 {
            return Err(Error::DiscriminantNegative(d));
        }
        let sd = d.sqrt();
        let m = (sd - b) / (2.0 * a);
        let m_prime = (sd + b) / (2.0 * a);
        let k2 = if a > 0.0 { m_prime / (m + m_prime) } else { -m / m_prime };
        if !(0.0..1.0).contains(&k2) {
            return Err(Error::ModulusOutOfRange(k2.abs().sqrt().copysign(k2)));
        }
        Ok(Self { a, b, m, m_prime, modulus: k2.sqrt() })
    }

    /// Residuals of `m m' = 1/A` and `m' - m = B/A`.
    pub fn identity_residuals(&self) -> (f64, f64) {
        (
            (self.m * self.m_prime - 1.0 / self.a).abs(),
            (self.m_prime - self.m - self.b / self.a).abs(),
        )
    }
}

/// `J1 = int_0^x dx / sqrt((1-x^2)(1-k^2 x^2))` and
/// `J2 = int_0^x x^2 dx / sqrt((1-x^2)(1-k^2 x^2))`, evaluated in the angle
/// `x = sin(phi)` where both integrands are smooth. `x = 1` gives the complete
/// integrals.
pub fn legendre_integrals(x: f64, modulus: f64) -> Result<(f64, f64)> {
    if !(0.0..1.0).contains(&modulus) {
        return Err(Error::ModulusOutOfRange(modulus));
    }
    if !(0.0..=1.0).contains(&x) {
        return Err(Error::DomainViolation(format!("x = {x} outside [0, 1]")));
    }
    let phi = x.asin();
    let k2 = modulus * modulus;
    let opts = QuadOptions { abs_tol: 1e-15, rel_tol: 1e-14, ..Default::default() };
    let w = |p: f64| 1.0 / (1.0 - k2 * p.sin().powi(2)).sqrt();
    let (j1, _) = integrate(w, 0.0, phi, &opts)?;
    let (j2, _) = integrate(|p| p.sin().powi(2) * w(p), 0.0, phi, &opts)?;
    Ok((j1, j2))
}

/// `A > 0`: `r = sqrt((1 - x^2)/(A m) - B/A)`,
/// `t = -(J1 - J2) / (A m sqrt(m + m'))` with modulus `sqrt(m' / (m + m'))`.
/// `x = 0` is the turning point.
///
/// The radius follows from `u^2 = (1 - x^2)/m` and `r^2 = (u^2 - B)/A`; the
/// shorter form `(1 - x^2)/m - B/A` agrees with it only when `A = 1`.
pub fn elliptic_case_i(a: f64, b: f64, x: f64) -> Result<(f64, f64)> {
    if !(a > 0.0) {
        return Err(Error::DomainViolation(format!("first case needs A > 0, got {a}")));
    }
    let p = EllipticParams::new(a, b)?;
    if !(0.0..1.0).contains(&x) {
        return Err(Error::DomainViolation(format!("x = {x} outside [0, 1)")));
    }
    let r2 = (1.0 - x * x) / (a * p.m) - b / a;
    if !(r2 > 0.0) {
        return Err(Error::DomainViolation(format!("r^2 = {r2} is not positive at x = {x}")));
    }
    let (j1, j2) = legendre_integrals(x, p.modulus)?;
    Ok((r2.sqrt(), -(j1 - j2) / (a * p.m * (p.m + p.m_prime).sqrt())))
}

/// Coefficient of `J2` in the `A < 0` parameterization.
pub fn case_ii_derived_prefactor(p: &EllipticParams) -> f64 {
    1.0 / (p.a * (-p.m_prime).powf(1.5))
}

/// The coefficient `-1 / (A m sqrt(-m'))`; off by `m' / m`.
pub fn case_ii_quoted_prefactor(p: &EllipticParams) -> f64 {
    -1.0 / (p.a * p.m * (-p.m_prime).sqrt())
}

/// `A < 0`: `r = sqrt(-x^2/(m' A) - B/A)`, `t = J2 / (A (-m')^{3/2})` with
/// modulus `sqrt(-m / m')`. `x = 1` is the turning point.
pub fn elliptic_case_ii(a: f64, b: f64, x: f64) -> Result<(f64, f64)> {
    if !(a < 0.0) {
        return Err(Error::DomainViolation(format!("second case needs A < 0, got {a}")));
    }
    let p = EllipticParams::new(a, b)?;
    if !(0.0..=1.0).contains(&x) {
        return Err(Error::DomainViolation(format!("x = {x} outside [0, 1]")));
    }
    let r2 = -x * x / (p.m_prime * a) - b / a;
    if !(r2 > 0.0) {
        return Err(Error::DomainViolation(format!("r^2 = {r2} is not positive at x = {x}")));
    }
    let (_, j2) = legendre_integrals(x, p.modulus)?;
    Ok((r2.sqrt(), case_ii_derived_prefactor(&p) * j2))
}

/// Largest `|t|` mismatch between the elliptic parameterization and the
/// quadrature `t(r)`, both measured from the turning point, over `samples`
/// values of `x`. The sign of `t` is not compared.
pub fn elliptic_vs_quadrature(a: f64, b: f64, samples: usize) -> Result<f64> {
    elliptic_vs_quadrature_with(a, b, samples, None)
}

/// As [`elliptic_vs_quadrature`], with the `A < 0` coefficient replaced by `prefactor`.
pub fn elliptic_vs_quadrature_with(a: f64, b: f64, samples: usize, prefactor: Option<f64>) -> Result<f64> {
    let p = EllipticParams::new(a, b)?;
    let samples = samples.max(2);
    let mut worst = 0.0f64;
    if a > 0.0 {
        // x = 0 is the turning point; stop before r reaches the axis
        let x_axis = (1.0 - p.m * b).max(0.0).sqrt().min(1.0);
        let x_max = 0.9 * x_axis.min(0.999);
        let (r_turn, _) = elliptic_case_i(a, b, 0.0)?;
        for i in 1..samples {
            let x = x_max * i as f64 / (samples - 1) as f64;
            let (r, t) = elliptic_case_i(a, b, x)?;
            let tq = meridian_t(a, b, r_turn, r)?;
            worst = worst.max((t.abs() - tq.abs()).abs());
        }
    } else {
        let scale = prefactor.map(|c| c / case_ii_derived_prefactor(&p)).unwrap_or(1.0);
        let (r_turn, t_turn) = elliptic_case_ii(a, b, 1.0)?;
        for i in 0..samples - 1 {
            let x = 0.3 + 0.7 * i as f64 / (samples - 1) as f64;
            let (r, t) = elliptic_case_ii(a, b, x)?;
            let te = scale * (t - t_turn);
            let tq = meridian_t(a, b, r_turn, r)?;
            worst = worst.max((te.abs() - tq.abs()).abs());
        }
    }
    Ok(worst)
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    #[test]
    fn legendre_limits_at_zero_modulus() {
        let (j1, j2) = legendre_integrals(1.0 - 1e-15, 0.0).unwrap();
        assert!((j1 - PI / 2.0).abs() < 1e-7);
        let (j1, j2b) = legendre_integrals(1.0, 0.0).unwrap();
        assert!((j1 - PI / 2.0).abs() < 1e-12);
        assert!((j2b - PI / 4.0).abs() < 1e-12);
        assert!((j2 - PI / 4.0).abs() < 1e-7);
        assert_eq!(legendre_integrals(0.0, 0.5).unwrap(), (0.0, 0.0));
    }

    #[test]
    fn legendre_against_arcsin_and_complete_integral() {
        let (j1, _) = legendre_integrals(0.6, 0.0).unwrap();
        assert!((j1 - 0.6f64.asin()).abs() < 1e-14);
        // K(1/sqrt 2) = Gamma(1/4)^2 / (4 sqrt(pi))
        let k = 3.625_609_908_221_908f64.powi(2) / (4.0 * PI.sqrt());
        let (j1, _) = legendre_integrals(1.0, 0.5f64.sqrt()).unwrap();
        assert!((j1 - k).abs() < 1e-12);
    }

    #[test]
    fn modulus_out_of_range() {
        assert!(matches!(legendre_integrals(0.5, 1.0), Err(Error::ModulusOutOfRange(_))));
    }

    #[test]
    fn parameter_examples() {
        let p = EllipticParams::new(1.0, 0.0).unwrap();
        assert_eq!((p.m, p.m_prime), (1.0, 1.0));
        assert!((p.modulus - 0.5f64.sqrt()).abs() < 1e-15);
        let (r, _) = elliptic_case_i(1.0, 0.0, 0.6).unwrap();
        assert!((r - 0.8).abs() < 1e-15);

        let p = EllipticParams::new(1.0, 1.0).unwrap();
        assert!((p.m - (5f64.sqrt() - 1.0) / 2.0).abs() < 1e-15);
        assert!((p.m_prime - (5f64.sqrt() + 1.0) / 2.0).abs() < 1e-15);
        let (e1, e2) = p.identity_residuals();
        assert!(e1 < 1e-10 && e2 < 1e-10);

        let p = EllipticParams::new(-1.0, 2.5).unwrap();
        assert_eq!((p.m, p.m_prime), (0.5, -2.0));
        assert_eq!(p.modulus, 0.5);
        let (e1, e2) = p.identity_residuals();
        assert!(e1 < 1e-10 && e2 < 1e-10);
    }

    #[test]
    fn negative_discriminant() {
        assert!(matches!(EllipticParams::new(-1.0, 1.0), Err(Error::DiscriminantNegative(_))));
        assert!(matches!(elliptic_case_ii(-1.0, 1.0, 0.5), Err(Error::DiscriminantNegative(_))));
    }

    #[test]
    fn first_case_matches_quadrature() {
        assert!(elliptic_vs_quadrature(1.0, 1.0, 30).unwrap() < 1e-9);
        assert!(elliptic_vs_quadrature(2.0, 0.5, 30).unwrap() < 1e-9);
    }

    #[test]
    fn first_case_radius_starts_at_turning_point() {
        for (a, b) in [(1.0, 1.0), (2.0, 0.5), (0.3, -0.2)] {
            let (r, _) = elliptic_case_i(a, b, 0.0).unwrap();
            assert!(((a * r * r + b) * r * r - 1.0).abs() < 1e-12);
        }
        // the form without the 1/A factor misses it for A != 1
        let p = EllipticParams::new(2.0, 0.5).unwrap();
        let r2 = 1.0 / p.m - 0.25;
        assert!(((2.0 * r2 + 0.5) * r2 - 1.0).abs() > 1.0);
    }

    #[test]
    fn second_case_matches_quadrature() {
        assert!(elliptic_vs_quadrature(-1.0, 2.5, 30).unwrap() < 1e-9);
        assert!(elliptic_vs_quadrature(-0.5, 3.0, 30).unwrap() < 1e-9);
    }

    #[test]
    fn quoted_second_case_coefficient_does_not_match() {
        let p = EllipticParams::new(-1.0, 2.5).unwrap();
        let ratio = case_ii_quoted_prefactor(&p) / case_ii_derived_prefactor(&p);
        assert!((ratio - p.m_prime / p.m).abs() < 1e-12);
        let d = elliptic_vs_quadrature_with(-1.0, 2.5, 30, Some(case_ii_quoted_prefactor(&p))).unwrap();
        assert!(d > 1e-2);
    }
}
