//! Meridians with constant `a - b = B`: the second-order ODE in `t` and the
//! first integral `t(r)` by quadrature.

use crate::error::{Error, Result};
use crate::numeric::ode::OdeOptions;
use crate::numeric::quad::{integrate, QuadOptions};

use super::profile::MeridianField;

#[derive(Debug, Clone, PartialEq)]
pub struct MeridianProblem {
    /// The constant `a - b`.
    pub b: f64,
    pub r0: f64,
    pub v0: f64,
    /// Must contain 0, where the initial data sit.
    pub t_span: (f64, f64),
    pub samples: usize,
    /// Hypersurface dimension, used for `tau` only.
    pub n: usize,
    pub tol: f64,
}

impl MeridianProblem {
    pub fn new(b: f64, r0: f64, v0: f64, t_span: (f64, f64)) -> Self {
        Self { b, r0, v0, t_span, samples: 201, n: 3, tol: 1e-10 }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MeridianSample {
    pub t: f64,
    pub r: f64,
    pub r_prime: f64,
    pub a: f64,
    pub b: f64,
    pub lambda: f64,
    pub tau: f64,
    /// Relative sectional curvature `4 |lambda b|`.
    pub k: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct MeridianSolution {
    pub samples: Vec<MeridianSample>,
    /// Mean of `b / r^2` over the samples.
    pub a_const: f64,
    pub b_const: f64,
    /// `max - min` of `b / r^2`.
    pub a_spread: f64,
    /// `max |a - b - B|`.
    pub ab_residual: f64,
}

pub fn meridian_ode(p: &MeridianProblem) -> Result<MeridianSolution> {
    let (lo, hi) = p.t_span;
    if !(lo <= 0.0 && hi >= 0.0 && lo < hi) {
        return Err(Error::InvalidArgument(format!("t_span [{lo}, {hi}] must contain 0")));
    }
    if p.samples < 2 {
        return Err(Error::InvalidArgument("need at least 2 samples".into()));
    }
    if !(p.r0 > 0.0) {
        return Err(Error::InvalidArgument(format!("r0 = {} must be positive", p.r0)));
    }
    if !(p.tol > 0.0) {
        return Err(Error::InvalidArgument(format!("tolerance {} must be positive", p.tol)));
    }
    let field = MeridianField { b: p.b };
    let opts = OdeOptions { rtol: p.tol, atol: p.tol, ..Default::default() };
    let times: Vec<f64> = (0..p.samples)
        .map(|i| lo + (hi - lo) * i as f64 / (p.samples - 1) as f64)
        .collect();
    let states = field.integrate(p.r0, p.v0, &times, &opts)?;
    let nf = p.n as f64;
    let samples: Vec<MeridianSample> = times
        .iter()
        .zip(&states)
        .map(|(&t, &[r, v])| {
            let j = field.jet(r, v);
            let g = 1.0 + v * v;
            let a = 1.0 / (r * r * g);
            let b = -(g + r * j.r2) / (r * r * g * g);
            let lambda = v / (r * g.sqrt());
            MeridianSample {
                t,
                r,
                r_prime: v,
                a,
                b,
                lambda,
                tau: (nf - 1.0) * (nf * a + 2.0 * b),
                k: 4.0 * (lambda * b).abs(),
            }
        })
        .collect();
    let consts: Vec<f64> = samples.iter().map(|s| s.b / (s.r * s.r)).collect();
    let (mn, mx) = consts
        .iter()
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), &c| (a.min(c), b.max(c)));
    let ab_residual = samples
        .iter()
        .map(|s| (s.a - s.b - p.b).abs())
        .fold(0.0, f64::max);
    Ok(MeridianSolution {
        a_const: consts.iter().sum::<f64>() / consts.len() as f64,
        b_const: p.b,
        a_spread: mx - mn,
        ab_residual,
        samples,
    })
}

/// Positive radii where the meridian is parallel to the axis: `(A r^2 + B) r^2 = 1`.
pub fn turning_radii(a: f64, b: f64) -> Vec<f64> {
    let mut out = Vec::new();
    if a == 0.0 {
        if b > 0.0 {
            out.push((1.0 / b).sqrt());
        }
        return out;
    }
    let d = b * b + 4.0 * a;
    if d < 0.0 {
        return out;
    }
    for s in [-1.0, 1.0] {
        let r2 = (-b + s * d.sqrt()) / (2.0 * a);
        if r2 > 0.0 {
            out.push(r2.sqrt());
        }
    }
    out.sort_by(|x, y| x.partial_cmp(y).unwrap());
    out.dedup();
    out
}

const TURNING_TOL: f64 = 1e-9;

fn q(a: f64, b: f64, r: f64) -> f64 {
    (a * r * r + b) * r * r
}

fn is_turning(a: f64, b: f64, r: f64) -> bool {
    (q(a, b, r) - 1.0).abs() < TURNING_TOL
}

fn integrand(a: f64, b: f64) -> impl Fn(f64) -> f64 {
    move |r: f64| r * (a * r * r + b).max(0.0).sqrt() / (1.0 - q(a, b, r)).max(0.0).sqrt()
}

/// `int_{r0}^{r1}` of the `t(r)` integrand where `r0` is a turning point.
/// With `r = r0 + s w^2` the gap `1 - (A r^2 + B) r^2` factors as
/// `w^2 (2 s r0 + w^2) h(r^2)`, and the `w` cancels analytically.
fn from_turning(a: f64, b: f64, r0: f64, r1: f64) -> Result<f64> {
    let s = (r1 - r0).signum();
    let rr0 = r0 * r0;
    let h = move |rr: f64| if a == 0.0 { -b } else { -a * (rr - (-b / a - rr0)) };
    let f = move |w: f64| {
        let w2 = w * w;
        let r = r0 + s * w2;
        let den = (2.0 * s * r0 + w2) * h(r * r);
        2.0 * s * r * (a * r * r + b).max(0.0).sqrt() / den.max(0.0).sqrt()
    };
    Ok(integrate(f, 0.0, (r1 - r0).abs().sqrt(), &QuadOptions::default())?.0)
}

/// `int_from^to r sqrt(A r^2 + B) / sqrt(1 - A r^4 - B r^2) dr`, with turning
/// points at either end handled by substitution.
pub(crate) fn meridian_t(a: f64, b: f64, from: f64, to: f64) -> Result<f64> {
    if from == to {
        return Ok(0.0);
    }
    match (is_turning(a, b, from), is_turning(a, b, to)) {
        (false, false) => Ok(integrate(integrand(a, b), from, to, &QuadOptions::default())?.0),
        (true, false) => from_turning(a, b, from, to),
        (false, true) => Ok(-from_turning(a, b, to, from)?),
        (true, true) => {
            let mid = 0.5 * (from + to);
            Ok(from_turning(a, b, from, mid)? - from_turning(a, b, to, mid)?)
        }
    }
}

fn check_range(a: f64, b: f64, lo: f64, hi: f64) -> Result<()> {
    if !(lo >= 0.0 && lo < hi && hi.is_finite()) {
        return Err(Error::DomainViolation(format!("invalid radius range [{lo}, {hi}]")));
    }
    for r in [lo, hi] {
        let u2 = a * r * r + b;
        let qr = q(a, b, r);
        if u2 < -1e-12 || qr > 1.0 + TURNING_TOL {
            return Err(Error::DomainViolation(format!(
                "(A r^2 + B) r^2 = {qr} outside [0, 1] at endpoint r = {r}"
            )));
        }
    }
    let probes = 512;
    for i in 1..probes {
        let r = lo + (hi - lo) * i as f64 / probes as f64;
        let qr = q(a, b, r);
        if !(qr > 0.0 && qr < 1.0) {
            return Err(Error::DomainViolation(format!(
                "(A r^2 + B) r^2 = {qr} outside (0, 1) at r = {r}"
            )));
        }
    }
    Ok(())
}

/// Samples `(t, r)` of the meridian for `r` evenly spaced in `r_range`, with
/// `t = 0` at the turning-point end of the range if it has one and at the
/// lower end otherwise. Ordered away from that base point.
pub fn meridian_quadrature(a: f64, b: f64, r_range: (f64, f64), count: usize) -> Result<Vec<(f64, f64)>> {
    let (lo, hi) = r_range;
    check_range(a, b, lo, hi)?;
    if count < 2 {
        return Err(Error::InvalidArgument("need at least 2 samples".into()));
    }
    let mut rs: Vec<f64> = (0..count)
        .map(|i| lo + (hi - lo) * i as f64 / (count - 1) as f64)
        .collect();
    if is_turning(a, b, hi) && !is_turning(a, b, lo) {
        rs.reverse();
    }
    let mut out = vec![(0.0, rs[0])];
    let mut t = 0.0;
    for w in rs.windows(2) {
        t += meridian_t(a, b, w[0], w[1])?;
        out.push((t, w[1]));
    }
    Ok(out)
}

/// Largest radial gap between the ODE meridian started at the turning point at
/// the end of `r_range` and the quadrature samples, both with `t = 0` there.
pub fn ode_vs_quadrature(a: f64, b: f64, r_range: (f64, f64), count: usize) -> Result<f64> {
    let (lo, hi) = r_range;
    let base = if is_turning(a, b, hi) {
        hi
    } else if is_turning(a, b, lo) {
        lo
    } else {
        return Err(Error::DomainViolation(
            "neither end of the radius range is a turning point".into(),
        ));
    };
    let quad = meridian_quadrature(a, b, r_range, count)?;
    let field = MeridianField { b };
    let accel = field.accel(base, 0.0);
    let heads_down = accel < 0.0;
    if heads_down != (base == hi) {
        return Err(Error::DomainViolation(format!(
            "meridian through r = {base} leaves the range (r'' = {accel})"
        )));
    }
    let times: Vec<f64> = quad.iter().map(|(t, _)| t.abs()).collect();
    let opts = OdeOptions { rtol: 1e-12, atol: 1e-12, ..Default::default() };
    let states = field.integrate(base, 0.0, &times, &opts)?;
    Ok(quad
        .iter()
        .zip(&states)
        .map(|((_, r), y)| (r - y[0]).abs())
        .fold(0.0, f64::max))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sphere_recovery() {
        let rho = 1.3;
        let mut p = MeridianProblem::new(1.0 / (rho * rho), rho, 0.0, (-1.2, 1.2));
        p.samples = 101;
        let s = meridian_ode(&p).unwrap();
        for m in &s.samples {
            assert!((m.t * m.t + m.r * m.r - rho * rho).abs() < 1e-6);
        }
        assert!(s.a_const.abs() < 1e-6);
    }

    #[test]
    fn cylinder_fixed_point() {
        let s = meridian_ode(&MeridianProblem::new(0.5, 2.0, 0.0, (-2.0, 2.0))).unwrap();
        assert!(s.samples.iter().all(|m| (m.r - 2.0).abs() < 1e-12));
    }

    #[test]
    fn first_integral_is_conserved() {
        let s = meridian_ode(&MeridianProblem::new(1.0, 0.5, 0.2, (-0.2, 0.2))).unwrap();
        assert!(s.a_spread < 1e-6, "{}", s.a_spread);
        assert!(s.ab_residual < 1e-9);
    }

    #[test]
    fn collapse_is_an_error() {
        let r = meridian_ode(&MeridianProblem::new(1.0, 0.5, 0.0, (-3.0, 3.0)));
        assert!(matches!(
            r,
            Err(Error::RadiusCollapse { .. } | Error::StepFailure { .. } | Error::DomainExit { .. })
        ));
    }

    #[test]
    fn circle_quadrature_closed_form() {
        let rho = 2.0;
        let pts = meridian_quadrature(0.0, 1.0 / (rho * rho), (0.3, rho), 30).unwrap();
        assert_eq!(pts[0].1, rho);
        for (t, r) in pts {
            assert!((t + (rho * rho - r * r).sqrt()).abs() < 1e-10);
        }
    }

    #[test]
    fn turning_point_singularity_is_finite() {
        let rt = turning_radii(1.0, 1.0)[0];
        assert!((rt * rt - (5f64.sqrt() - 1.0) / 2.0).abs() < 1e-15);
        let coarse = meridian_t(1.0, 1.0, 0.1, rt).unwrap();
        let fine = meridian_t(1.0, 1.0, 0.1, 0.5 * (0.1 + rt)).unwrap()
            + meridian_t(1.0, 1.0, 0.5 * (0.1 + rt), rt).unwrap();
        assert!(coarse.is_finite() && (coarse - fine).abs() < 1e-11);
    }

    #[test]
    fn range_crossing_the_forbidden_band_is_rejected() {
        // (A, B) = (-1, 2.5) is admissible only for r^2 < 1/2 or 2 < r^2 < 5/2
        let r = meridian_quadrature(-1.0, 2.5, (0.5, 1.5), 10);
        assert!(matches!(r, Err(Error::DomainViolation(_))));
    }

    #[test]
    fn ode_matches_quadrature() {
        let rt = turning_radii(1.0, 1.0)[0];
        assert!(ode_vs_quadrature(1.0, 1.0, (0.2, rt), 40).unwrap() < 1e-6);
        let outer = turning_radii(-1.0, 2.5)[1];
        assert!((outer * outer - 2.0).abs() < 1e-14);
        assert!(ode_vs_quadrature(-1.0, 2.5, (outer, 2.4f64.sqrt()), 40).unwrap() < 1e-6);
    }
}
