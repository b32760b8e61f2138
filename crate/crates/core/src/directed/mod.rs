//! Sectional 1-forms, the directedness classifier and relative sectional
//! curvature.
//!
//! A metric is directed when, for a unit 1-form `eta`, every sectional 1-form
//! `phi_E(Z) = (nabla_Z R)(X,Y,Y,X)` is a multiple `k(E) eta|_E` on planes not
//! inside `Delta = ker eta`, and vanishes on planes inside `Delta`. Here `eta`
//! is always `d tau / |d tau|`.

use nalgebra::DMatrix;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

use crate::error::{Error, Result};
use crate::metric::{ChartPoint, MetricJet, MetricSpec};
use crate::tensor::{g_dot, OneForm, Tensor5};
use crate::tensorcalc::{build_pi_form, CurvatureBundle};

/// An orthonormal basis `(X, Y)` of a tangent 2-plane, in chart components.
#[derive(Debug, Clone, PartialEq)]
pub struct TwoPlane {
    pub x: Vec<f64>,
    pub y: Vec<f64>,
    /// `eta(X)^2 + eta(Y)^2` once a unit `eta` is attached.
    pub cos2gamma: Option<f64>,
}

/// Orthonormality tolerance for [`TwoPlane::new`].
pub const ORTHONORMAL_TOLERANCE: f64 = 1e-12;

impl TwoPlane {
    /// Checks `g(X,X) = g(Y,Y) = 1`, `g(X,Y) = 0`.
    pub fn new(x: Vec<f64>, y: Vec<f64>, g: &DMatrix<f64>) -> Result<Self> {
        let dev = (g_dot(g, &x, &x) - 1.0)
            .abs()
            .max((g_dot(g, &y, &y) - 1.0).abs())
            .max(g_dot(g, &x, &y).abs());
        if dev > ORTHONORMAL_TOLERANCE {
            return Err(Error::InvalidArgument(format!(
                "plane basis is not orthonormal (deviation {dev:e})"
            )));
        }
        Ok(Self { x, y, cos2gamma: None })
    }

    /// Gram–Schmidt on `(x, y)` in the metric `g`.
    pub fn orthonormalize(x: &[f64], y: &[f64], g: &DMatrix<f64>) -> Result<Self> {
        let nx = g_dot(g, x, x).sqrt();
        if !(nx > 1e-14) {
            return Err(Error::InvalidArgument("zero vector spans no plane".into()));
        }
        let x: Vec<f64> = x.iter().map(|v| v / nx).collect();
        let c = g_dot(g, &x, y);
        let y: Vec<f64> = y.iter().zip(&x).map(|(b, a)| b - c * a).collect();
        let ny = g_dot(g, &y, &y).sqrt();
        if !(ny > 1e-10 * nx.max(1.0)) {
            return Err(Error::InvalidArgument("vectors are parallel".into()));
        }
        let y = y.iter().map(|v| v / ny).collect();
        Ok(Self { x, y, cos2gamma: None })
    }

    pub fn with_eta(mut self, eta: &OneForm) -> Self {
        self.cos2gamma = Some(eta.apply(&self.x).powi(2) + eta.apply(&self.y).powi(2));
        self
    }

    /// The same plane with its basis rotated by `angle`.
    pub fn rotated(&self, angle: f64) -> Self {
        let (c, s) = (angle.cos(), angle.sin());
        let x = self.x.iter().zip(&self.y).map(|(a, b)| c * a + s * b).collect();
        let y = self.x.iter().zip(&self.y).map(|(a, b)| -s * a + c * b).collect();
        Self { x, y, cos2gamma: self.cos2gamma }
    }
}

/// Components `(phi_E(X), phi_E(Y))` of a sectional 1-form.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SectionalForm {
    pub phi_x: f64,
    pub phi_y: f64,
}

impl SectionalForm {
    pub fn norm(&self) -> f64 {
        self.phi_x.hypot(self.phi_y)
    }
}

/// `phi_E(X) = (nabla_X R)(X,Y,Y,X)`, `phi_E(Y) = (nabla_Y R)(X,Y,Y,X)`.
pub fn sectional_one_form(nabla_riem: &Tensor5, plane: &TwoPlane) -> SectionalForm {
    let (x, y) = (plane.x.as_slice(), plane.y.as_slice());
    SectionalForm {
        phi_x: nabla_riem.eval([x, x, y, y, x]),
        phi_y: nabla_riem.eval([y, x, y, y, x]),
    }
}

/// `k(E) = (phi_X eta(X) + phi_Y eta(Y)) / (eta(X)^2 + eta(Y)^2)`.
pub fn relative_curvature(plane: &TwoPlane, eta: &OneForm, nabla_riem: &Tensor5) -> Result<f64> {
    let (ex, ey) = (eta.apply(&plane.x), eta.apply(&plane.y));
    let norm = ex.hypot(ey);
    if norm <= PLANE_TOLERANCE {
        return Err(Error::PlaneInsideDistribution { norm });
    }
    let f = sectional_one_form(nabla_riem, plane);
    Ok((f.phi_x * ex + f.phi_y * ey) / (norm * norm))
}

/// Below this `|eta|_E|` a plane counts as lying inside `Delta`.
pub const PLANE_TOLERANCE: f64 = 1e-8;

/// Thresholds used by the classifier.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Tolerances {
    /// Bound on residuals relative to `|nabla R|`.
    pub relative: f64,
    /// Floor for the `|nabla R|` denominator.
    pub eps_floor: f64,
    /// `|nabla R|` below this is treated as zero.
    pub locally_symmetric: f64,
    /// `|d tau|` below this is treated as zero.
    pub degenerate_gradient: f64,
    /// Planes with `cos^2 gamma` below this are skipped in the `k(E)` spread,
    /// where the division by `cos^2 gamma` amplifies round-off.
    pub min_cos2: f64,
}

impl Tolerances {
    pub fn analytic() -> Self {
        Self {
            relative: 1e-6,
            eps_floor: 1e-14,
            locally_symmetric: 1e-8,
            degenerate_gradient: 1e-8,
            min_cos2: 1e-2,
        }
    }

    pub fn finite_difference() -> Self {
        Self {
            relative: 1e-3,
            eps_floor: 1e-14,
            locally_symmetric: 1e-4,
            degenerate_gradient: 1e-4,
            min_cos2: 1e-2,
        }
    }

    pub fn for_spec(spec: &MetricSpec) -> Self {
        if spec.is_analytic() {
            Self::analytic()
        } else {
            Self::finite_difference()
        }
    }
}

/// `d tau / |d tau|` with the sign that makes the fitted relative curvature
/// nonnegative.
pub fn eta_from_dtau(dtau: &OneForm, jet: &MetricJet, nabla_riem: &Tensor5, tolerance: f64) -> Result<OneForm> {
    let norm = dtau.norm(&jet.ginv);
    if !(norm > tolerance) {
        return Err(Error::DegenerateScalarGradient { norm });
    }
    let eta = dtau.scaled(1.0 / norm);
    let sign = if nabla_riem.inner(&build_pi_form(&eta, jet), &jet.ginv) < 0.0 { -1.0 } else { 1.0 };
    Ok(eta.scaled(sign))
}

/// Least-squares `k` in `nabla R ≈ (k/4) Pi(eta)` and the relative residual.
fn fit_k(bundle: &CurvatureBundle, eta: &OneForm, floor: f64) -> (f64, f64) {
    let gi = &bundle.jet.ginv;
    let pi = build_pi_form(eta, &bundle.jet);
    let k = 4.0 * bundle.nabla_riem.inner(&pi, gi) / pi.inner(&pi, gi);
    let diff = bundle.nabla_riem.add_scaled(-k / 4.0, &pi);
    (k, diff.norm(gi) / bundle.nabla_norm().max(floor))
}

/// `2 |d tau| / ((n-1)(n+2))`.
pub fn k_from_dtau(bundle: &CurvatureBundle) -> f64 {
    let n = bundle.dim() as f64;
    2.0 * bundle.dtau_norm() / ((n - 1.0) * (n + 2.0))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Stratum {
    ContainsXi,
    InsideDelta,
    Generic,
}

/// `count` seeded planes: a quarter containing `xi`, a quarter inside `Delta`
/// and the rest generic (Gaussian in a `g`-orthonormal frame).
pub fn sample_planes(jet: &MetricJet, eta: &OneForm, count: usize, seed: u64) -> Result<Vec<(Stratum, TwoPlane)>> {
    let n = jet.dim();
    let g = &jet.g;
    let chol = g.clone().cholesky().ok_or(Error::DegenerateMetric { min_eigenvalue: 0.0 })?;
    // columns of L^{-T} are g-orthonormal
    let frame = chol
        .l()
        .transpose()
        .try_inverse()
        .ok_or(Error::DegenerateMetric { min_eigenvalue: 0.0 })?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let gaussian = |rng: &mut ChaCha8Rng| -> Vec<f64> {
        let c: Vec<f64> = (0..n).map(|_| StandardNormal.sample(rng)).collect();
        (0..n).map(|i| (0..n).map(|j| frame[(i, j)] * c[j]).sum()).collect()
    };
    let xi = eta.raise(&jet.ginv);
    let project = |v: Vec<f64>| -> Vec<f64> {
        let c = eta.apply(&v);
        v.iter().zip(&xi).map(|(a, b)| a - c * b).collect()
    };
    let n_xi = count / 4;
    let n_delta = if n >= 3 { count / 4 } else { 0 };
    let mut out = Vec::with_capacity(count);
    while out.len() < count {
        let stratum = if out.len() < n_xi {
            Stratum::ContainsXi
        } else if out.len() < n_xi + n_delta {
            Stratum::InsideDelta
        } else {
            Stratum::Generic
        };
        let plane = match stratum {
            Stratum::ContainsXi => {
                let y = gaussian(&mut rng);
                let angle = rand::Rng::gen_range(&mut rng, 0.0..std::f64::consts::TAU);
                TwoPlane::orthonormalize(&xi, &y, g).map(|p| p.rotated(angle))
            }
            Stratum::InsideDelta => {
                let (x, y) = (project(gaussian(&mut rng)), project(gaussian(&mut rng)));
                TwoPlane::orthonormalize(&x, &y, g)
            }
            Stratum::Generic => {
                let (x, y) = (gaussian(&mut rng), gaussian(&mut rng));
                TwoPlane::orthonormalize(&x, &y, g)
            }
        };
        // a degenerate draw has probability zero; redraw if it happens
        if let Ok(p) = plane {
            out.push((stratum, p.with_eta(eta)));
        }
    }
    Ok(out)
}

/// Pointwise directedness diagnostics.
#[derive(Debug, Clone, PartialEq)]
pub struct DirectedReport {
    pub eta: Option<OneForm>,
    pub k_fit: Option<f64>,
    /// `2 |d tau| / ((n-1)(n+2))`.
    pub k_from_dtau: f64,
    pub tau: f64,
    pub dtau_norm: f64,
    pub nabla_norm: f64,
    /// Max over planes not inside `Delta` of `|phi_X eta(Y) - phi_Y eta(X)|`, relative to `|nabla R|`.
    pub residual_collinearity: f64,
    /// Max over planes inside `Delta` of `|phi_E|`, relative to `|nabla R|`.
    pub residual_delta_planes: f64,
    /// `|nabla R - (k/4) Pi(eta)| / |nabla R|`.
    pub residual_model: f64,
    /// Max minus min of `k(E)` over planes with `cos^2 gamma >= min_cos2`.
    pub k_spread: f64,
    pub planes: usize,
    pub locally_symmetric: bool,
    pub directed: bool,
    pub pointwise_constant: bool,
}

/// Samples `sample_count` planes at `point` and classifies the metric there.
///
/// Where `d tau` vanishes but `nabla R` does not, no `eta` is available and the
/// point is reported as not directed.
pub fn directedness_report(point: &ChartPoint, spec: &MetricSpec, sample_count: usize, seed: u64) -> Result<DirectedReport> {
    directedness_report_with(point, spec, sample_count, seed, &Tolerances::for_spec(spec))
}

pub fn directedness_report_with(
    point: &ChartPoint,
    spec: &MetricSpec,
    sample_count: usize,
    seed: u64,
    tol: &Tolerances,
) -> Result<DirectedReport> {
    if sample_count < 8 {
        return Err(Error::InvalidArgument(format!("need at least 8 planes, got {sample_count}")));
    }
    let bundle = CurvatureBundle::at(spec, point)?;
    let nabla_norm = bundle.nabla_norm();
    let mut report = DirectedReport {
        eta: None,
        k_fit: None,
        k_from_dtau: k_from_dtau(&bundle),
        tau: bundle.tau,
        dtau_norm: bundle.dtau_norm(),
        nabla_norm,
        residual_collinearity: 0.0,
        residual_delta_planes: 0.0,
        residual_model: 0.0,
        k_spread: 0.0,
        planes: 0,
        locally_symmetric: false,
        directed: false,
        pointwise_constant: false,
    };
    if nabla_norm < tol.locally_symmetric {
        report.locally_symmetric = true;
        report.directed = true;
        report.pointwise_constant = true;
        report.k_fit = Some(0.0);
        return Ok(report);
    }
    let eta = match eta_from_dtau(&bundle.dtau, &bundle.jet, &bundle.nabla_riem, tol.degenerate_gradient) {
        Ok(e) => e,
        Err(Error::DegenerateScalarGradient { .. }) => return Ok(report),
        Err(e) => return Err(e),
    };
    let denom = nabla_norm.max(tol.eps_floor);
    let planes = sample_planes(&bundle.jet, &eta, sample_count, seed)?;
    let (mut kmin, mut kmax) = (f64::INFINITY, f64::NEG_INFINITY);
    for (stratum, plane) in &planes {
        let f = sectional_one_form(&bundle.nabla_riem, plane);
        let (ex, ey) = (eta.apply(&plane.x), eta.apply(&plane.y));
        if *stratum == Stratum::InsideDelta || ex.hypot(ey) <= PLANE_TOLERANCE {
            report.residual_delta_planes = report.residual_delta_planes.max(f.norm() / denom);
        } else {
            let c = (f.phi_x * ey - f.phi_y * ex).abs() / denom;
            report.residual_collinearity = report.residual_collinearity.max(c);
            if plane.cos2gamma.unwrap_or(0.0) >= tol.min_cos2 {
                let k = relative_curvature(plane, &eta, &bundle.nabla_riem)?;
                kmin = kmin.min(k);
                kmax = kmax.max(k);
            }
        }
    }
    let (k, model_residual) = fit_k(&bundle, &eta, tol.eps_floor);
    report.k_spread = if kmax >= kmin { kmax - kmin } else { 0.0 };
    report.planes = planes.len();
    report.k_fit = Some(k);
    report.residual_model = model_residual;
    report.directed = report.residual_collinearity < tol.relative && report.residual_delta_planes < tol.relative;
    report.pointwise_constant = report.directed && model_residual < tol.relative;
    report.eta = Some(eta);
    Ok(report)
}

/// Outcome of fitting `nabla R = (k/4) Pi(eta)` at one point.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ConstancyTest {
    pub k_fit: f64,
    /// `|nabla R - (k_fit/4) Pi(eta)| / max(|nabla R|, eps_floor)`.
    pub residual: f64,
    /// `2 |d tau| / ((n-1)(n+2))`.
    pub k_from_dtau: f64,
    /// `nabla R` vanishes and the fit is vacuous.
    pub locally_symmetric: bool,
}

impl ConstancyTest {
    /// Whether the two estimates of `k` agree within `tol` when the fit passes.
    pub fn consistent(&self, tol: f64) -> bool {
        self.residual >= tol || (self.k_fit - self.k_from_dtau).abs() < tol
    }
}

pub fn constant_relcurv_test(point: &ChartPoint, spec: &MetricSpec) -> Result<ConstancyTest> {
    constant_relcurv_test_with(point, spec, &Tolerances::for_spec(spec))
}

pub fn constant_relcurv_test_with(point: &ChartPoint, spec: &MetricSpec, tol: &Tolerances) -> Result<ConstancyTest> {
    let bundle = CurvatureBundle::at(spec, point)?;
    let kd = k_from_dtau(&bundle);
    if bundle.nabla_norm() < tol.locally_symmetric {
        return Ok(ConstancyTest { k_fit: 0.0, residual: 0.0, k_from_dtau: kd, locally_symmetric: true });
    }
    let eta = eta_from_dtau(&bundle.dtau, &bundle.jet, &bundle.nabla_riem, tol.degenerate_gradient)?;
    let (k_fit, residual) = fit_k(&bundle, &eta, tol.eps_floor);
    Ok(ConstancyTest { k_fit, residual, k_from_dtau: kd, locally_symmetric: false })
}

/// `|nabla R| < tol`, after checking that it agrees with `|d tau| < tol`.
/// Meaningful where the relative curvature is pointwise constant.
pub fn locally_symmetric_test(point: &ChartPoint, spec: &MetricSpec) -> Result<bool> {
    let tol = Tolerances::for_spec(spec);
    let bundle = CurvatureBundle::at(spec, point)?;
    let (nr, nd) = (bundle.nabla_norm(), bundle.dtau_norm());
    let sym = nr < tol.locally_symmetric;
    let flat_tau = nd < tol.degenerate_gradient;
    if sym != flat_tau {
        return Err(Error::PropertyViolation(format!(
            "|nabla R| = {nr:e} and |d tau| = {nd:e} disagree on local symmetry"
        )));
    }
    Ok(sym)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::metric::{evaluate_metric_jet, Perturbed};
    use crate::rotational::{rotational_scalars, CoshProfile, OdeProfile, ProfileCurve, RotationalChart};
    use std::sync::Arc;

    fn cosh_chart(n: usize) -> RotationalChart {
        RotationalChart::new(Arc::new(CoshProfile), n).unwrap()
    }

    fn ode_chart() -> RotationalChart {
        let p = OdeProfile::new(1.0, 0.5, 0.2, (-0.2, 0.2), Default::default()).unwrap();
        RotationalChart::new(Arc::new(p), 3).unwrap()
    }

    #[test]
    fn sphere_forms_vanish_and_sphere_is_locally_symmetric() {
        let spec = MetricSpec::sphere(3, 1.0).unwrap();
        let p = ChartPoint::new(vec![0.2, -0.1, 0.4]).unwrap();
        let b = CurvatureBundle::at(&spec, &p).unwrap();
        let planes = sample_planes(&b.jet, &OneForm(vec![1.0, 0.0, 0.0]).scaled(1.0 / b.jet.g[(0, 0)].sqrt()), 16, 1).unwrap();
        for (_, pl) in planes {
            assert!(sectional_one_form(&b.nabla_riem, &pl).norm() < 1e-10);
        }
        let r = directedness_report(&p, &spec, 64, 7).unwrap();
        assert!(r.locally_symmetric && r.directed);
        assert!(locally_symmetric_test(&p, &spec).unwrap());
        assert!(matches!(
            eta_from_dtau(&b.dtau, &b.jet, &b.nabla_riem, 1e-8),
            Err(Error::DegenerateScalarGradient { .. })
        ));
        let t = constant_relcurv_test(&p, &spec).unwrap();
        assert!(t.locally_symmetric);
    }

    #[test]
    fn eta_is_unit_and_axial_on_cosh() {
        let c = cosh_chart(3);
        let p = c.point(&[0.3, -0.2], 0.5).unwrap();
        let b = CurvatureBundle::at(&c.spec(), &p).unwrap();
        let eta = eta_from_dtau(&b.dtau, &b.jet, &b.nabla_riem, 1e-8).unwrap();
        assert!((eta.norm(&b.jet.ginv) - 1.0).abs() < 1e-12);
        let xi = c.axial_xi(&p).unwrap();
        assert!((eta.apply(&xi).abs() - 1.0).abs() < 1e-10);
        assert!(eta.0[0].abs() < 1e-10 && eta.0[1].abs() < 1e-10);
    }

    #[test]
    fn sectional_form_is_basis_covariant() {
        let c = cosh_chart(3);
        let p = c.point(&[0.1, 0.4], -0.3).unwrap();
        let b = CurvatureBundle::at(&c.spec(), &p).unwrap();
        let eta = eta_from_dtau(&b.dtau, &b.jet, &b.nabla_riem, 1e-8).unwrap();
        for (_, pl) in sample_planes(&b.jet, &eta, 24, 3).unwrap() {
            let f = sectional_one_form(&b.nabla_riem, &pl);
            let ang = 0.7;
            let g = sectional_one_form(&b.nabla_riem, &pl.rotated(ang));
            let (c, s) = (ang.cos(), ang.sin());
            assert!((g.phi_x - (c * f.phi_x + s * f.phi_y)).abs() < 1e-10);
            assert!((g.phi_y - (-s * f.phi_x + c * f.phi_y)).abs() < 1e-10);
        }
    }

    #[test]
    fn rotational_sectional_form_closed_form() {
        let c = cosh_chart(3);
        let t = 0.4;
        let p = c.point(&[0.3, -0.2], t).unwrap();
        let b = CurvatureBundle::at(&c.spec(), &p).unwrap();
        let s = rotational_scalars(&CoshProfile, t).unwrap();
        let eta = c.axial_eta(&p).unwrap();
        for (_, pl) in sample_planes(&b.jet, &eta, 32, 5).unwrap() {
            let f = sectional_one_form(&b.nabla_riem, &pl);
            let factor = s.sectional_factor(pl.cos2gamma.unwrap());
            assert!((f.phi_x - factor * eta.apply(&pl.x)).abs() < 1e-6);
            assert!((f.phi_y - factor * eta.apply(&pl.y)).abs() < 1e-6);
        }
        // plane containing xi
        let xi = c.axial_xi(&p).unwrap();
        let pl = TwoPlane::orthonormalize(&xi, &[1.0, 0.0, 0.0], &b.jet.g).unwrap();
        let k = relative_curvature(&pl, &eta, &b.nabla_riem).unwrap();
        assert!((k - s.axial_plane_curvature()).abs() < 1e-6);
    }

    #[test]
    fn plane_inside_delta_is_rejected() {
        let c = cosh_chart(3);
        let p = c.point(&[0.0, 0.0], 0.4).unwrap();
        let b = CurvatureBundle::at(&c.spec(), &p).unwrap();
        let pl = TwoPlane::orthonormalize(&[1.0, 0.0, 0.0], &[0.0, 1.0, 0.0], &b.jet.g).unwrap();
        let eta = c.axial_eta(&p).unwrap();
        assert!(matches!(
            relative_curvature(&pl, &eta, &b.nabla_riem),
            Err(Error::PlaneInsideDistribution { .. })
        ));
    }

    #[test]
    fn cosh_is_directed_but_not_pointwise_constant() {
        let c = cosh_chart(3);
        let p = c.point(&[0.3, -0.2], 0.5).unwrap();
        let r = directedness_report(&p, &c.spec(), 64, 11).unwrap();
        assert!(r.directed, "{r:?}");
        assert!(!r.pointwise_constant);
        let t = constant_relcurv_test(&p, &c.spec()).unwrap();
        assert!(t.residual > 1e-2);
    }

    #[test]
    fn constant_difference_profile_is_pointwise_constant() {
        let c = ode_chart();
        for t in [-0.15, 0.0, 0.1] {
            let p = c.point(&[0.2, 0.1], t).unwrap();
            let r = directedness_report(&p, &c.spec(), 64, 1).unwrap();
            assert!(r.pointwise_constant, "{r:?}");
            assert!(r.k_spread < 1e-6);
            let test = constant_relcurv_test(&p, &c.spec()).unwrap();
            assert!(test.residual < 1e-5);
            assert!((test.k_fit - test.k_from_dtau).abs() < 1e-6);
            let s = rotational_scalars(c.profile().as_ref(), t).unwrap();
            assert!((test.k_fit - s.k_constant()).abs() < 1e-6);
            assert!(!locally_symmetric_test(&p, &c.spec()).unwrap());
        }
    }

    #[test]
    fn perturbation_breaks_directedness() {
        let base: Arc<dyn crate::metric::MetricField> = Arc::new(cosh_chart(3));
        let mut rng = ChaCha8Rng::seed_from_u64(99);
        let pert = Perturbed::random(base, 1e-2, 3, &mut rng).unwrap();
        let spec = MetricSpec::new(Arc::new(pert));
        let p = ChartPoint::new(vec![0.3, -0.2, 0.5]).unwrap();
        let r = directedness_report(&p, &spec, 64, 2).unwrap();
        assert!(r.residual_collinearity > 1e-6, "{r:?}");
        assert!(!r.directed);
    }

    #[test]
    fn too_few_planes() {
        let c = cosh_chart(2);
        let p = c.point(&[0.0], 0.3).unwrap();
        assert!(matches!(directedness_report(&p, &c.spec(), 4, 0), Err(Error::InvalidArgument(_))));
    }

    #[test]
    fn surfaces_sample_only_generic_and_axial_planes() {
        let c = cosh_chart(2);
        let p = c.point(&[0.2], 0.3).unwrap();
        let jet = evaluate_metric_jet(&c.spec(), &p).unwrap();
        let planes = sample_planes(&jet, &c.axial_eta(&p).unwrap(), 16, 0).unwrap();
        assert!(planes.iter().all(|(s, _)| *s != Stratum::InsideDelta));
        let _ = CoshProfile.domain();
    }
}
