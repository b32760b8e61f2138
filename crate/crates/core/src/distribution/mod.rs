//! Totally umbilical scalar distributions: the form `theta`, umbilicity and
//! involutivity residuals, leaf Gauss equation, leafwise symmetry and
//! constancy of `k`, the constant fit relating `tau` and `|d tau|`, and the
//! surface case `phi = dK`.

use std::fmt;
use std::sync::Arc;

use nalgebra::DMatrix;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::directed::{constant_relcurv_test, eta_from_dtau, Tolerances};
use crate::error::{Error, Result};
use crate::metric::{evaluate_metric_jet, ChartPoint, MetricJet, MetricSpec};
use crate::rotational::{rotational_scalars, ProfileCurve, RotationalChart};
use crate::tensor::{g_dot, OneForm};
use crate::tensorcalc::{christoffel, CurvatureBundle};

/// Step for central differences of field components.
pub const FIELD_FD_STEP: f64 = 1e-5;
/// `|eta|_g` must equal 1 within this.
pub const UNIT_FIELD_TOLERANCE: f64 = 1e-10;
/// Relative tolerance on `d(a - b)/dt` when checking the constant-difference hypothesis.
pub const HYPOTHESIS_TOLERANCE: f64 = 1e-6;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FieldSource {
    FromDtau,
    ProfileAxial,
    Custom,
}

impl fmt::Display for FieldSource {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            FieldSource::FromDtau => "from-dtau",
            FieldSource::ProfileAxial => "profile-axial",
            FieldSource::Custom => "custom",
        })
    }
}

type CovectorFn = dyn Fn(&[f64]) -> Result<Vec<f64>> + Send + Sync;
type JacobianFn = dyn Fn(&[f64]) -> Result<DMatrix<f64>> + Send + Sync;

/// A unit covector field `eta` on a chart, with dual unit vector `xi`.
#[derive(Clone)]
pub struct UnitField {
    spec: MetricSpec,
    source: FieldSource,
    eval: Arc<CovectorFn>,
    /// `d_i eta_j` at `[(i, j)]`, when known in closed form.
    jacobian: Option<Arc<JacobianFn>>,
}

impl fmt::Debug for UnitField {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("UnitField")
            .field("source", &self.source)
            .field("family", &self.spec.family())
            .field("analytic_jacobian", &self.jacobian.is_some())
            .finish()
    }
}

impl UnitField {
    /// `eta = sqrt(1 + r'^2) dt` on a rotational chart.
    pub fn axial(chart: &RotationalChart) -> Self {
        let n = chart.spec().dim();
        let (c1, c2) = (chart.clone(), chart.clone());
        Self {
            spec: chart.spec(),
            source: FieldSource::ProfileAxial,
            eval: Arc::new(move |x| {
                let p = ChartPoint::new(x.to_vec())?;
                Ok(c1.axial_eta(&p)?.0)
            }),
            jacobian: Some(Arc::new(move |x| {
                let j = c2.profile().jet(x[n - 1])?;
                let mut m = DMatrix::zeros(n, n);
                m[(n - 1, n - 1)] = j.r1 * j.r2 / (1.0 + j.r1 * j.r1).sqrt();
                Ok(m)
            })),
        }
    }

    /// `eta = d tau / |d tau|`, oriented so the fitted relative curvature is nonnegative.
    pub fn from_dtau(spec: &MetricSpec) -> Self {
        let s = spec.clone();
        let tol = Tolerances::for_spec(spec);
        Self {
            spec: spec.clone(),
            source: FieldSource::FromDtau,
            eval: Arc::new(move |x| {
                let b = CurvatureBundle::at(&s, &ChartPoint::new(x.to_vec())?)?;
                Ok(eta_from_dtau(&b.dtau, &b.jet, &b.nabla_riem, tol.degenerate_gradient)?.0)
            }),
            jacobian: None,
        }
    }

    /// Normalizes an arbitrary nonvanishing covector field.
    pub fn custom(spec: &MetricSpec, f: impl Fn(&[f64]) -> Vec<f64> + Send + Sync + 'static) -> Self {
        let s = spec.clone();
        Self {
            spec: spec.clone(),
            source: FieldSource::Custom,
            eval: Arc::new(move |x| {
                let g = s.field().metric(x)?;
                let ginv = g.try_inverse().ok_or(Error::DegenerateMetric { min_eigenvalue: 0.0 })?;
                let w = OneForm(f(x));
                let norm = w.norm(&ginv);
                if !(norm > 1e-14) {
                    return Err(Error::FieldNotEvaluable(format!("covector vanishes at {x:?}")));
                }
                Ok(w.scaled(1.0 / norm).0)
            }),
            jacobian: None,
        }
    }

    /// Drops the closed-form Jacobian so derivatives use finite differences.
    pub fn with_finite_differences(mut self) -> Self {
        self.jacobian = None;
        self
    }

    pub fn source(&self) -> FieldSource {
        self.source
    }

    pub fn spec(&self) -> &MetricSpec {
        &self.spec
    }

    pub fn eta(&self, p: &ChartPoint) -> Result<OneForm> {
        let v = (self.eval)(p.coords()).map_err(not_evaluable)?;
        let jet = evaluate_metric_jet(&self.spec, p)?;
        let norm = OneForm(v.clone()).norm(&jet.ginv);
        if (norm - 1.0).abs() > UNIT_FIELD_TOLERANCE {
            return Err(Error::NotUnit { norm });
        }
        Ok(OneForm(v))
    }

    pub fn xi(&self, p: &ChartPoint) -> Result<Vec<f64>> {
        let jet = evaluate_metric_jet(&self.spec, p)?;
        Ok(self.eta(p)?.raise(&jet.ginv))
    }

    /// `d_i eta_j` at `[(i, j)]`.
    pub fn jacobian(&self, p: &ChartPoint) -> Result<DMatrix<f64>> {
        if let Some(j) = &self.jacobian {
            return j(p.coords()).map_err(not_evaluable);
        }
        let x = p.coords();
        let n = x.len();
        let mut m = DMatrix::zeros(n, n);
        for i in 0..n {
            let h = FIELD_FD_STEP * x[i].abs().max(1.0);
            let mut xp = x.to_vec();
            let mut xm = x.to_vec();
            xp[i] += h;
            xm[i] -= h;
            let (ep, em) = (
                (self.eval)(&xp).map_err(not_evaluable)?,
                (self.eval)(&xm).map_err(not_evaluable)?,
            );
            for j in 0..n {
                m[(i, j)] = (ep[j] - em[j]) / (2.0 * h);
            }
        }
        Ok(m)
    }
}

fn not_evaluable(e: Error) -> Error {
    match e {
        Error::FieldNotEvaluable(_) => e,
        other => Error::FieldNotEvaluable(other.to_string()),
    }
}

/// `(d eta)_ij = d_i eta_j - d_j eta_i`.
fn d_eta(jac: &DMatrix<f64>) -> DMatrix<f64> {
    jac - jac.transpose()
}

/// `theta(X) = d eta(xi, X)`.
pub fn theta_form(field: &UnitField, p: &ChartPoint) -> Result<OneForm> {
    let xi = field.xi(p)?;
    let de = d_eta(&field.jacobian(p)?);
    let n = xi.len();
    Ok(OneForm((0..n).map(|j| (0..n).map(|i| xi[i] * de[(i, j)]).sum()).collect()))
}

/// `(nabla_i eta)_j = d_i eta_j - Gamma^k_ij eta_k`.
fn nabla_eta(field: &UnitField, p: &ChartPoint, jet: &MetricJet, eta: &OneForm) -> Result<DMatrix<f64>> {
    let n = jet.dim();
    let gm = christoffel(jet)?.gamma;
    let jac = field.jacobian(p)?;
    Ok(DMatrix::from_fn(n, n, |i, j| {
        jac[(i, j)] - (0..n).map(|k| gm[[k, i, j]] * eta.0[k]).sum::<f64>()
    }))
}

fn bilinear(m: &DMatrix<f64>, x: &[f64], y: &[f64]) -> f64 {
    let n = x.len();
    (0..n).map(|i| (0..n).map(|j| x[i] * m[(i, j)] * y[j]).sum::<f64>()).sum()
}

/// `g`-orthonormal basis of `ker eta` from Gram–Schmidt on coordinate vectors.
fn delta_frame(g: &DMatrix<f64>, eta: &OneForm, xi: &[f64]) -> Vec<Vec<f64>> {
    let n = xi.len();
    let mut frame: Vec<Vec<f64>> = vec![xi.to_vec()];
    for e in 0..n {
        let mut v = vec![0.0; n];
        v[e] = 1.0;
        let c = eta.apply(&v);
        for (vi, x) in v.iter_mut().zip(xi) {
            *vi -= c * x;
        }
        for f in &frame {
            let c = g_dot(g, f, &v);
            for (vi, fi) in v.iter_mut().zip(f) {
                *vi -= c * fi;
            }
        }
        let nv = g_dot(g, &v, &v).sqrt();
        if nv > 1e-8 {
            frame.push(v.iter().map(|a| a / nv).collect());
        }
        if frame.len() == n {
            break;
        }
    }
    frame.remove(0);
    frame
}

/// Umbilicity diagnostics of a unit field at one point.
#[derive(Debug, Clone, PartialEq)]
pub struct UmbilicReport {
    /// Trace of `x -> nabla_x xi` over `Delta`, divided by `n - 1`.
    pub lambda_fit: f64,
    /// Max over an adapted orthonormal frame of
    /// `|(nabla_X eta)(Y) - lambda (g(X,Y) - eta(X) eta(Y)) - eta(X) theta(Y)|`.
    pub residual_eq24: f64,
    /// `|d eta - eta ∧ theta|`.
    pub residual_involutive: f64,
    pub theta: OneForm,
}

pub fn umbilicity_residual(field: &UnitField, p: &ChartPoint, spec: &MetricSpec) -> Result<UmbilicReport> {
    let jet = evaluate_metric_jet(spec, p)?;
    let eta = field.eta(p)?;
    let xi = eta.raise(&jet.ginv);
    let n = jet.dim();
    let ne = nabla_eta(field, p, &jet, &eta)?;
    let theta = theta_form(field, p)?;
    let delta = delta_frame(&jet.g, &eta, &xi);
    let lambda_fit = delta.iter().map(|x| bilinear(&ne, x, x)).sum::<f64>() / (n - 1) as f64;

    let model = DMatrix::from_fn(n, n, |i, j| {
        ne[(i, j)] - lambda_fit * (jet.g[(i, j)] - eta.0[i] * eta.0[j]) - eta.0[i] * theta.0[j]
    });
    let mut frame = delta;
    frame.push(xi);
    let mut residual_eq24: f64 = 0.0;
    for x in &frame {
        for y in &frame {
            residual_eq24 = residual_eq24.max(bilinear(&model, x, y).abs());
        }
    }

    let de = d_eta(&field.jacobian(p)?);
    let diff = DMatrix::from_fn(n, n, |i, j| {
        de[(i, j)] - (eta.0[i] * theta.0[j] - eta.0[j] * theta.0[i])
    });
    // |w|^2 = (1/2) g^ik g^jl w_ij w_kl
    let gi = &jet.ginv;
    let norm2 = 0.5 * (gi * &diff * gi).component_mul(&diff).sum();
    Ok(UmbilicReport {
        lambda_fit,
        residual_eq24,
        residual_involutive: norm2.max(0.0).sqrt(),
        theta,
    })
}

fn rotational(profile: Arc<dyn ProfileCurve>, n: usize) -> Result<RotationalChart> {
    if n < 3 {
        return Err(Error::InvalidArgument(format!(
            "leaves are spheres of dimension n - 1 >= 2; got n = {n}"
        )));
    }
    RotationalChart::new(profile, n)
}

/// Ambient-side leaf sectional curvature `R(X,Y,Y,X) + lambda^2` of the plane
/// `X, Y` tangent to the leaf.
fn leaf_sectional(bundle: &CurvatureBundle, lambda: f64, x: &[f64], y: &[f64]) -> f64 {
    bundle.riem.eval([x, y, y, x]) + lambda * lambda
}

/// `|1/r^2 - a - lambda^2|`, with `a` and `lambda` from the curvature pipeline.
pub fn leaf_gauss_check(profile: Arc<dyn ProfileCurve>, n: usize, t: f64) -> Result<f64> {
    let chart = rotational(profile, n)?;
    let r = chart.profile().jet(t)?.r;
    let p = chart.point(&vec![0.0; n - 1], t)?;
    let field = UnitField::axial(&chart);
    let spec = chart.spec();
    let bundle = CurvatureBundle::at(&spec, &p)?;
    let u = umbilicity_residual(&field, &p, &spec)?;
    // at u = 0 the coordinate vectors are orthogonal with |d_alpha| = 2r
    let mut x = vec![0.0; n];
    let mut y = vec![0.0; n];
    x[0] = 0.5 / r;
    y[1] = 0.5 / r;
    Ok((1.0 / (r * r) - leaf_sectional(&bundle, u.lambda_fit, &x, &y)).abs())
}

fn check_constant_difference(profile: &dyn ProfileCurve, ts: &[f64]) -> Result<()> {
    for &t in ts {
        let s = rotational_scalars(profile, t)?;
        let scale = s.a.abs().max(s.b.abs()).max(1.0);
        let drift = (s.a_t - s.b_t).abs() / scale;
        if drift > HYPOTHESIS_TOLERANCE {
            return Err(Error::HypothesisViolated(format!(
                "a - b is not constant: |d(a - b)/dt| = {drift:e} at t = {t}"
            )));
        }
    }
    Ok(())
}

fn leaf_points(chart: &RotationalChart, n: usize, t: f64, count: usize, seed: u64) -> Result<Vec<ChartPoint>> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..count)
        .map(|_| {
            let u: Vec<f64> = (0..n - 1).map(|_| rng.gen_range(-1.0..1.0)).collect();
            chart.point(&u, t)
        })
        .collect()
}

/// Leaf-sample size and seed for the leaf checks.
pub const LEAF_POINTS: usize = 8;
pub const LEAF_SEED: u64 = 41;

/// Leafwise necessary conditions for local symmetry of the leaves.
#[derive(Debug, Clone, PartialEq)]
pub struct LeafSymmetryReport {
    pub t: f64,
    /// Max `|d(lambda^2)|` restricted to `Delta`, over leaf points.
    pub dlambda2_leaf: f64,
    /// Max minus min of the leaf sectional curvature over sampled leaf planes.
    pub leaf_curvature_spread: f64,
    pub leaf_curvature: f64,
    pub passed: bool,
}

pub fn theorem41_leaf_symmetry(profile: Arc<dyn ProfileCurve>, n: usize, t: f64) -> Result<LeafSymmetryReport> {
    check_constant_difference(profile.as_ref(), &[t])?;
    let chart = rotational(profile, n)?;
    let spec = chart.spec();
    let field = UnitField::axial(&chart);
    let mut rng = ChaCha8Rng::seed_from_u64(LEAF_SEED ^ 0x5a);
    let (mut kmin, mut kmax) = (f64::INFINITY, f64::NEG_INFINITY);
    let mut dl2: f64 = 0.0;
    for p in leaf_points(&chart, n, t, LEAF_POINTS, LEAF_SEED)? {
        let bundle = CurvatureBundle::at(&spec, &p)?;
        let u = umbilicity_residual(&field, &p, &spec)?;
        let eta = field.eta(&p)?;
        let xi = eta.raise(&bundle.jet.ginv);
        let frame = delta_frame(&bundle.jet.g, &eta, &xi);
        for _ in 0..4 {
            let comb = |rng: &mut ChaCha8Rng| -> Vec<f64> {
                let c: Vec<f64> = frame.iter().map(|_| rng.gen_range(-1.0..1.0)).collect();
                (0..n).map(|i| frame.iter().zip(&c).map(|(f, ci)| ci * f[i]).sum()).collect()
            };
            let (x, y) = (comb(&mut rng), comb(&mut rng));
            let (xx, yy, xy) = (g_dot(&bundle.jet.g, &x, &x), g_dot(&bundle.jet.g, &y, &y), g_dot(&bundle.jet.g, &x, &y));
            let area = xx * yy - xy * xy;
            if area < 1e-6 {
                continue;
            }
            let k = bundle.riem.eval([&x, &y, &y, &x]) / area + u.lambda_fit * u.lambda_fit;
            kmin = kmin.min(k);
            kmax = kmax.max(k);
        }
        // d(lambda^2) along each leaf direction by central differences
        for dir in &frame {
            let h = 1e-4;
            let shift = |s: f64| -> Result<f64> {
                let c: Vec<f64> = p.coords().iter().zip(dir).map(|(a, d)| a + s * h * d).collect();
                let q = ChartPoint::new(c)?;
                Ok(umbilicity_residual(&field, &q, &spec)?.lambda_fit.powi(2))
            };
            dl2 = dl2.max(((shift(1.0)? - shift(-1.0)?) / (2.0 * h)).abs());
        }
    }
    let spread = if kmax >= kmin { kmax - kmin } else { 0.0 };
    Ok(LeafSymmetryReport {
        t,
        dlambda2_leaf: dl2,
        leaf_curvature_spread: spread,
        leaf_curvature: 0.5 * (kmin + kmax),
        passed: dl2 < 1e-8 && spread < 1e-8,
    })
}

/// Per-leaf diagnostics for the constancy of `k` on leaves.
#[derive(Debug, Clone, PartialEq)]
pub struct LeafConstancy {
    pub t: f64,
    /// Max `|nabla_xi xi|` over leaf points.
    pub geodesic_residual: f64,
    /// Max `|theta|` over leaf points.
    pub theta_norm: f64,
    pub k_mean: f64,
    pub k_spread: f64,
    /// Max `|theta(x) + eta(nabla_xi x)|` over `Delta` frames.
    pub proof_identity_residual: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct LeafConstancyReport {
    pub leaves: Vec<LeafConstancy>,
    /// Whether `(theta ≈ 0 and nabla_xi xi ≈ 0)` agrees with `k` leaf-spread `≈ 0` on every leaf.
    pub biconditional: bool,
    /// Max minus min of the leaf means of `k`.
    pub k_across_leaves: f64,
}

pub const GEODESIC_TOLERANCE: f64 = 1e-8;
pub const LEAF_K_TOLERANCE: f64 = 1e-6;

/// Checks on `leaves` equally spaced leaves in the interior of the profile domain.
pub fn theorem42_check(profile: Arc<dyn ProfileCurve>, n: usize, leaves: usize) -> Result<LeafConstancyReport> {
    let (lo, hi) = profile.domain();
    let (lo, hi) = (lo.max(-1e3), hi.min(1e3));
    if leaves < 2 {
        return Err(Error::InvalidArgument("need at least two leaves".into()));
    }
    let ts: Vec<f64> = (0..leaves)
        .map(|i| lo + (hi - lo) * (0.1 + 0.8 * i as f64 / (leaves - 1) as f64))
        .collect();
    check_constant_difference(profile.as_ref(), &ts)?;
    let chart = rotational(profile, n)?;
    let spec = chart.spec();
    let field = UnitField::axial(&chart);
    let mut out = Vec::with_capacity(ts.len());
    for &t in &ts {
        let mut leaf = LeafConstancy {
            t,
            geodesic_residual: 0.0,
            theta_norm: 0.0,
            k_mean: 0.0,
            k_spread: 0.0,
            proof_identity_residual: 0.0,
        };
        let (mut kmin, mut kmax, mut ksum) = (f64::INFINITY, f64::NEG_INFINITY, 0.0);
        let points = leaf_points(&chart, n, t, LEAF_POINTS, LEAF_SEED)?;
        for p in &points {
            let jet = evaluate_metric_jet(&spec, p)?;
            let eta = field.eta(p)?;
            let xi = eta.raise(&jet.ginv);
            let ne = nabla_eta(&field, p, &jet, &eta)?;
            // (nabla_xi eta)_j, the metric dual of nabla_xi xi
            let acc = OneForm((0..n).map(|j| (0..n).map(|i| xi[i] * ne[(i, j)]).sum()).collect());
            leaf.geodesic_residual = leaf.geodesic_residual.max(acc.norm(&jet.ginv));
            let theta = theta_form(&field, p)?;
            leaf.theta_norm = leaf.theta_norm.max(theta.norm(&jet.ginv));
            for e in 0..n {
                let r = proof_identity(&field, p, &jet, &xi, e)?;
                let x = project(&field, p.coords(), e)?;
                leaf.proof_identity_residual =
                    leaf.proof_identity_residual.max((theta.apply(&x) + r).abs());
            }
            let k = constant_relcurv_test(p, &spec)?.k_fit;
            kmin = kmin.min(k);
            kmax = kmax.max(k);
            ksum += k;
        }
        leaf.k_mean = ksum / points.len() as f64;
        leaf.k_spread = kmax - kmin;
        out.push(leaf);
    }
    let biconditional = out.iter().all(|l| {
        let lhs = l.theta_norm < GEODESIC_TOLERANCE && l.geodesic_residual < GEODESIC_TOLERANCE;
        lhs == (l.k_spread < LEAF_K_TOLERANCE)
    });
    let means: Vec<f64> = out.iter().map(|l| l.k_mean).collect();
    let k_across = means.iter().cloned().fold(f64::NEG_INFINITY, f64::max)
        - means.iter().cloned().fold(f64::INFINITY, f64::min);
    Ok(LeafConstancyReport { leaves: out, biconditional, k_across_leaves: k_across })
}

/// `x = e_k - eta(e_k) xi`, the projection of a coordinate vector onto `Delta`.
fn project(field: &UnitField, x: &[f64], k: usize) -> Result<Vec<f64>> {
    let p = ChartPoint::new(x.to_vec())?;
    let xi = field.xi(&p)?;
    let eta = field.eta(&p)?;
    let c = eta.0[k];
    Ok((0..xi.len()).map(|i| if i == k { 1.0 } else { 0.0 } - c * xi[i]).collect())
}

/// `eta(nabla_xi x)` for the projected coordinate field `x`.
fn proof_identity(field: &UnitField, p: &ChartPoint, jet: &MetricJet, xi: &[f64], k: usize) -> Result<f64> {
    let n = xi.len();
    let gm = christoffel(jet)?.gamma;
    let x0 = project(field, p.coords(), k)?;
    let mut dx = vec![0.0; n];
    for i in 0..n {
        if xi[i] == 0.0 {
            continue;
        }
        let h = FIELD_FD_STEP * p.coords()[i].abs().max(1.0);
        let mut cp = p.coords().to_vec();
        let mut cm = cp.clone();
        cp[i] += h;
        cm[i] -= h;
        let (xp, xm) = (project(field, &cp, k)?, project(field, &cm, k)?);
        for m in 0..n {
            dx[m] += xi[i] * (xp[m] - xm[m]) / (2.0 * h);
        }
    }
    for m in 0..n {
        for i in 0..n {
            for j in 0..n {
                dx[m] += gm[[m, i, j]] * xi[i] * x0[j];
            }
        }
    }
    Ok(field.eta(p)?.apply(&dx))
}

/// Per-sample estimates of the constant in the `tau`, `|d tau|` relation.
#[derive(Debug, Clone, PartialEq)]
pub struct ConstantFit {
    /// Coefficient multiplying `B` in the shift `tau - c B`.
    pub shift: f64,
    pub estimates: Vec<(f64, f64)>,
    /// Samples where `|tau - c B|` was too small.
    pub dropped: Vec<f64>,
    /// `(max - min) / |median|`.
    pub relative_spread: f64,
}

/// Samples with `|tau - c B|` below this are dropped.
pub const FIT_SINGULAR_TOLERANCE: f64 = 1e-8;

/// `C(t) = [|d tau|^2 + 4 (tau - nB)^2 (tau + 2B) / ((n-1)(n+2))] / (tau - nB)`.
pub fn remark43_constant_fit(profile: Arc<dyn ProfileCurve>, n: usize, b: f64, sample_ts: &[f64]) -> Result<ConstantFit> {
    constant_fit(profile, n, b, 1.0, sample_ts)
}

/// The same relation with `B` replaced by `(n-1) B`, which makes `C = 4(n-1)(n+2) A`
/// for `A = b / r^2`. Agrees with [`remark43_constant_fit`] when `n = 2`.
pub fn corrected_constant_fit(profile: Arc<dyn ProfileCurve>, n: usize, b: f64, sample_ts: &[f64]) -> Result<ConstantFit> {
    constant_fit(profile, n, b, (n - 1) as f64, sample_ts)
}

fn constant_fit(profile: Arc<dyn ProfileCurve>, n: usize, b: f64, scale: f64, ts: &[f64]) -> Result<ConstantFit> {
    let chart = RotationalChart::new(profile, n)?;
    let spec = chart.spec();
    let nf = n as f64;
    let bb = scale * b;
    let mut estimates = Vec::new();
    let mut dropped = Vec::new();
    let mut worst = (f64::NAN, f64::INFINITY);
    for &t in ts {
        let p = chart.point(&vec![0.1; n - 1], t)?;
        let bundle = CurvatureBundle::at(&spec, &p)?;
        let (tau, d) = (bundle.tau, bundle.dtau_norm());
        let gap = tau - nf * bb;
        if gap.abs() < FIT_SINGULAR_TOLERANCE {
            dropped.push(t);
            if gap.abs() < worst.1 {
                worst = (t, gap.abs());
            }
            continue;
        }
        let c = (d * d + 4.0 * gap * gap * (tau + 2.0 * bb) / ((nf - 1.0) * (nf + 2.0))) / gap;
        estimates.push((t, c));
    }
    if estimates.is_empty() {
        return Err(Error::NearSingularFit { t: worst.0, gap: worst.1 });
    }
    let mut cs: Vec<f64> = estimates.iter().map(|e| e.1).collect();
    cs.sort_by(f64::total_cmp);
    let m = cs.len();
    let median = if m % 2 == 1 { cs[m / 2] } else { 0.5 * (cs[m / 2 - 1] + cs[m / 2]) };
    let spread = cs[m - 1] - cs[0];
    let relative_spread = if spread == 0.0 { 0.0 } else { spread / median.abs() };
    Ok(ConstantFit { shift: nf * scale, estimates, dropped, relative_spread })
}

/// Sectional 1-form of a surface of revolution against `dK`.
#[derive(Debug, Clone, PartialEq)]
pub struct SurfaceForm {
    pub phi: OneForm,
    pub dk: OneForm,
    /// `|dK|`.
    pub k_value: f64,
    /// Max componentwise `|phi - dK|`.
    pub residual: f64,
}

/// Sphere coordinate used for the point on the surface; the result is
/// independent of it.
pub const SURFACE_U: f64 = 0.3;

pub fn surface_sectional_form(profile: Arc<dyn ProfileCurve>, t: f64) -> Result<SurfaceForm> {
    let chart = RotationalChart::new(profile.clone(), 2)?;
    let p = chart.point(&[SURFACE_U], t)?;
    let bundle = CurvatureBundle::at(&chart.spec(), &p)?;
    let g = &bundle.jet.g;
    let x = [1.0 / g[(0, 0)].sqrt(), 0.0];
    let y = [0.0, 1.0 / g[(1, 1)].sqrt()];
    let phi = OneForm(
        (0..2)
            .map(|m| {
                let mut z = [0.0; 2];
                z[m] = 1.0;
                bundle.nabla_riem.eval([&z, &x, &y, &y, &x])
            })
            .collect(),
    );
    let s = rotational_scalars(profile.as_ref(), t)?;
    let dk = OneForm(vec![0.0, s.a_t + s.b_t]);
    Ok(SurfaceForm {
        residual: phi.max_diff(&dk),
        k_value: dk.norm(&bundle.jet.ginv),
        phi,
        dk,
    })
}

/// `K = -r'' / (r (1 + r'^2)^2)` directly from the profile.
pub fn surface_gauss_curvature(profile: &dyn ProfileCurve, t: f64) -> Result<f64> {
    let j = profile.jet(t)?;
    Ok(-j.r2 / (j.r * (1.0 + j.r1 * j.r1).powi(2)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rotational::{turning_radii, CircleProfile, ConstantProfile, CoshProfile, OdeProfile};

    fn cosh_chart(n: usize) -> RotationalChart {
        RotationalChart::new(Arc::new(CoshProfile), n).unwrap()
    }

    fn ode(b: f64, r0: f64, v0: f64, span: (f64, f64)) -> Arc<dyn ProfileCurve> {
        Arc::new(OdeProfile::new(b, r0, v0, span, Default::default()).unwrap())
    }

    #[test]
    fn axial_theta_vanishes_both_ways() {
        let c = cosh_chart(3);
        let p = c.point(&[0.2, -0.4], 0.5).unwrap();
        let f = UnitField::axial(&c);
        assert!(theta_form(&f, &p).unwrap().max_abs() < 1e-8);
        assert!(theta_form(&f.with_finite_differences(), &p).unwrap().max_abs() < 1e-8);
    }

    #[test]
    fn rotating_field_has_theta_and_theta_kills_xi() {
        let spec = MetricSpec::flat(2);
        let f = UnitField::custom(&spec, |x| vec![x[1].cos(), x[1].sin()]);
        let p = ChartPoint::new(vec![0.3, 0.7]).unwrap();
        let th = theta_form(&f, &p).unwrap();
        // d eta = sin(y) dx ∧ dy, theta = sin(y) (xi^x dy - xi^y dx)
        let (c, s) = (0.7f64.cos(), 0.7f64.sin());
        assert!((th.0[0] + s * s).abs() < 1e-8 && (th.0[1] - s * c).abs() < 1e-8);
        assert!(th.apply(&f.xi(&p).unwrap()).abs() < 1e-12);
    }

    #[test]
    fn cosh_lambda_and_residuals() {
        let c = cosh_chart(3);
        let p = c.point(&[0.2, -0.4], 0.5).unwrap();
        let r = umbilicity_residual(&UnitField::axial(&c), &p, &c.spec()).unwrap();
        let t = 0.5f64;
        assert!((r.lambda_fit - t.sinh() / t.cosh().powi(2)).abs() < 1e-6);
        assert!(r.residual_eq24 < 1e-8 && r.residual_involutive < 1e-8);
        let fd = umbilicity_residual(&UnitField::axial(&c).with_finite_differences(), &p, &c.spec()).unwrap();
        assert!(fd.residual_eq24 < 1e-8, "{fd:?}");
    }

    #[test]
    fn dtau_field_agrees_with_axial_field() {
        let c = cosh_chart(3);
        let p = c.point(&[0.1, 0.2], 0.4).unwrap();
        let spec = c.spec();
        let f = UnitField::from_dtau(&spec);
        assert_eq!(f.source(), FieldSource::FromDtau);
        let e = f.eta(&p).unwrap();
        assert!((e.apply(&c.axial_xi(&p).unwrap()).abs() - 1.0).abs() < 1e-10);
        let r = umbilicity_residual(&f, &p, &spec).unwrap();
        assert!(r.residual_eq24 < 1e-7, "{r:?}");
    }

    #[test]
    fn cylinder_is_flat_in_the_axial_direction() {
        let c = RotationalChart::new(Arc::new(ConstantProfile { rho: 1.3 }), 3).unwrap();
        let p = c.point(&[0.5, 0.1], 0.2).unwrap();
        let r = umbilicity_residual(&UnitField::axial(&c), &p, &c.spec()).unwrap();
        assert!(r.lambda_fit.abs() < 1e-12);
        assert!(r.residual_eq24 < 1e-9 && r.residual_involutive < 1e-9);
    }

    #[test]
    fn random_field_is_not_umbilical() {
        let c = cosh_chart(3);
        let f = UnitField::custom(&c.spec(), |x| vec![0.3 + x[2], x[0] * x[1], 1.0 + x[0]]);
        let p = c.point(&[0.2, -0.4], 0.5).unwrap();
        let r = umbilicity_residual(&f, &p, &c.spec()).unwrap();
        assert!(r.residual_eq24 > 1e-3);
    }

    #[test]
    fn unevaluable_field() {
        let spec = MetricSpec::flat(2);
        let f = UnitField::custom(&spec, |_| vec![0.0, 0.0]);
        let p = ChartPoint::new(vec![0.0, 0.0]).unwrap();
        assert!(matches!(theta_form(&f, &p), Err(Error::FieldNotEvaluable(_))));
    }

    #[test]
    fn gauss_closure() {
        assert!(leaf_gauss_check(Arc::new(CoshProfile), 3, 0.0).unwrap() < 1e-9);
        assert!(leaf_gauss_check(Arc::new(CoshProfile), 4, 0.7).unwrap() < 1e-8);
        assert!(leaf_gauss_check(Arc::new(CircleProfile { rho: 2.0 }), 3, 1.1).unwrap() < 1e-9);
        assert!(leaf_gauss_check(Arc::new(ConstantProfile { rho: 0.7 }), 3, 0.0).unwrap() < 1e-12);
        assert!(matches!(
            leaf_gauss_check(Arc::new(CoshProfile), 2, 0.0),
            Err(Error::InvalidArgument(_))
        ));
    }

    #[test]
    fn leaves_are_locally_symmetric() {
        let rep = theorem41_leaf_symmetry(ode(1.0, 0.5, 0.2, (-0.2, 0.2)), 3, 0.1).unwrap();
        assert!(rep.passed, "{rep:?}");
        assert!(matches!(
            theorem41_leaf_symmetry(Arc::new(CoshProfile), 3, 0.5),
            Err(Error::HypothesisViolated(_))
        ));
    }

    #[test]
    fn k_is_constant_on_leaves_not_globally() {
        let rep = theorem42_check(ode(1.0, 0.5, 0.2, (-0.2, 0.2)), 3, 3).unwrap();
        assert!(rep.biconditional, "{rep:?}");
        for l in &rep.leaves {
            assert!(l.geodesic_residual < 1e-8 && l.k_spread < 1e-6);
            assert!(l.proof_identity_residual < 1e-8, "{l:?}");
        }
        assert!(rep.k_across_leaves > 1e-3);
    }

    #[test]
    fn constant_fit_literal_vs_corrected() {
        // (A, B) = (1, 1) from its turning point
        let rt = turning_radii(1.0, 1.0)[0];
        let p = ode(1.0, rt, 0.0, (-0.3, 0.3));
        let ts: Vec<f64> = (0..20).map(|i| -0.28 + 0.56 * i as f64 / 19.0).collect();
        let lit = remark43_constant_fit(p.clone(), 3, 1.0, &ts).unwrap();
        let cor = corrected_constant_fit(p.clone(), 3, 1.0, &ts).unwrap();
        assert!(cor.relative_spread < 1e-4, "{cor:?}");
        assert!((cor.estimates[0].1 - 4.0 * 2.0 * 5.0 * 1.0).abs() < 1e-4);
        assert!(lit.relative_spread > 1e-2);
        let l2 = remark43_constant_fit(p.clone(), 2, 1.0, &ts).unwrap();
        assert!(l2.relative_spread < 1e-4);
    }

    #[test]
    fn constant_fit_on_sphere() {
        let rho = 1.5;
        let ts: Vec<f64> = (0..10).map(|i| -1.0 + 0.2 * i as f64).collect();
        let fit = remark43_constant_fit(Arc::new(CircleProfile { rho }), 3, 1.0 / (rho * rho), &ts).unwrap();
        assert!(fit.relative_spread < 1e-12);
        let tau = 6.0 / (rho * rho);
        let bb = 1.0 / (rho * rho);
        let expected = 4.0 * (tau - 3.0 * bb) * (tau + 2.0 * bb) / 10.0;
        assert!((fit.estimates[0].1 - expected).abs() < 1e-9);
        assert!(matches!(
            corrected_constant_fit(Arc::new(CircleProfile { rho }), 3, bb, &ts),
            Err(Error::NearSingularFit { .. })
        ));
    }

    #[test]
    fn surface_forms() {
        let s = surface_sectional_form(Arc::new(CircleProfile { rho: 1.0 }), 0.3).unwrap();
        assert!(s.phi.max_abs() < 1e-9 && s.k_value < 1e-9);
        let t = 0.5f64;
        let s = surface_sectional_form(Arc::new(CoshProfile), t).unwrap();
        assert!(s.residual < 1e-6, "{s:?}");
        let k = surface_gauss_curvature(&CoshProfile, t).unwrap();
        assert!((k + 1.0 / t.cosh().powi(4)).abs() < 1e-12);
        let dkdt = 4.0 * t.sinh() / t.cosh().powi(5);
        assert!((s.k_value - dkdt / t.cosh()).abs() < 1e-9);
    }
}
