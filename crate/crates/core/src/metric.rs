//! Metric charts and their derivative jets.
//!
//! Every curvature quantity in the crate is computed from a [`MetricJet`]: the
//! metric components together with their partial derivatives up to order 3 at
//! one chart point. Jets come either from closed-form families (flat, round
//! sphere, rotational hypersurfaces, analytic perturbations) or from a central
//! finite-difference adapter wrapped around any plain metric evaluator.

use std::fmt;
use std::sync::Arc;

use nalgebra::{DMatrix, SymmetricEigen};

use crate::error::{Error, Result};
use crate::tensor::{Tensor3, Tensor4, Tensor5};

/// Smallest admissible eigenvalue of `g`.
pub const MIN_EIGENVALUE: f64 = 1e-12;

/// A point in chart coordinates.
#[derive(Debug, Clone, PartialEq)]
pub struct ChartPoint {
    coords: Vec<f64>,
}

impl ChartPoint {
    pub fn new(coords: Vec<f64>) -> Result<Self> {
        if coords.len() < 2 {
            return Err(Error::InvalidArgument(format!(
                "chart dimension must be at least 2, got {}",
                coords.len()
            )));
        }
        if coords.iter().any(|c| !c.is_finite()) {
            return Err(Error::InvalidArgument(format!(
                "non-finite coordinates {coords:?}"
            )));
        }
        Ok(Self { coords })
    }

    pub fn coords(&self) -> &[f64] {
        &self.coords
    }

    pub fn dim(&self) -> usize {
        self.coords.len()
    }
}

/// Metric components and partial derivatives at one point.
///
/// Index layout: `dg[[i, j, k]] = d_k g_ij`, `d2g[[i, j, k, l]] = d_l d_k g_ij`,
/// `d3g[[i, j, k, l, m]] = d_m d_l d_k g_ij`.
#[derive(Debug, Clone)]
pub struct MetricJet {
    pub g: DMatrix<f64>,
    pub ginv: DMatrix<f64>,
    pub dg: Tensor3,
    pub d2g: Option<Tensor4>,
    pub d3g: Option<Tensor5>,
}

impl MetricJet {
    /// Validates symmetry and positive definiteness and caches `g^{-1}`.
    pub fn new(
        g: DMatrix<f64>,
        dg: Tensor3,
        d2g: Option<Tensor4>,
        d3g: Option<Tensor5>,
    ) -> Result<Self> {
        let n = g.nrows();
        if g.ncols() != n || dg.dim() != n {
            return Err(Error::InvalidArgument("jet shape mismatch".into()));
        }
        if g.iter().any(|v| !v.is_finite()) {
            return Err(Error::DegenerateMetric {
                min_eigenvalue: f64::NAN,
            });
        }
        let sym = (&g + g.transpose()) * 0.5;
        let min_eigenvalue = SymmetricEigen::new(sym.clone())
            .eigenvalues
            .iter()
            .fold(f64::INFINITY, |m, v| m.min(*v));
        if !(min_eigenvalue > MIN_EIGENVALUE) {
            return Err(Error::DegenerateMetric { min_eigenvalue });
        }
        let ginv = sym
            .clone()
            .cholesky()
            .ok_or(Error::DegenerateMetric { min_eigenvalue })?
            .inverse();
        Ok(Self {
            g: sym,
            ginv,
            dg,
            d2g,
            d3g,
        })
    }

    pub fn dim(&self) -> usize {
        self.g.nrows()
    }

    /// Highest derivative order carried by the jet.
    pub fn order(&self) -> usize {
        match (&self.d2g, &self.d3g) {
            (Some(_), Some(_)) => 3,
            (Some(_), None) => 2,
            _ => 1,
        }
    }

    pub fn d2g(&self) -> Result<&Tensor4> {
        self.d2g.as_ref().ok_or(Error::JetOrderInsufficient {
            available: self.order(),
            required: 2,
        })
    }

    pub fn d3g(&self) -> Result<&Tensor5> {
        self.d3g.as_ref().ok_or(Error::JetOrderInsufficient {
            available: self.order(),
            required: 3,
        })
    }

    /// The jet of the constant multiple `c * g`.
    pub fn scaled(&self, c: f64) -> Result<Self> {
        MetricJet::new(
            &self.g * c,
            self.dg.scaled(c),
            self.d2g.as_ref().map(|t| t.scaled(c)),
            self.d3g.as_ref().map(|t| t.scaled(c)),
        )
    }
}

/// Family tag used in configs and reports.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Family {
    Flat,
    Sphere,
    Rotational,
    Custom,
}

impl fmt::Display for Family {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            Family::Flat => "flat",
            Family::Sphere => "sphere",
            Family::Rotational => "rotational",
            Family::Custom => "custom",
        };
        f.write_str(s)
    }
}

/// A Riemannian metric on a chart.
pub trait MetricField: Send + Sync + fmt::Debug {
    fn dim(&self) -> usize;

    fn family(&self) -> Family;

    /// Rejects points outside the chart.
    fn check_domain(&self, x: &[f64]) -> Result<()>;

    /// `d_{derivs} g_ij` in closed form, if the family has one.
    /// `derivs` holds up to three coordinate indices.
    fn partial(&self, x: &[f64], i: usize, j: usize, derivs: &[usize]) -> Option<f64>;

    /// Plain metric evaluation; defaults to the closed form.
    fn metric(&self, x: &[f64]) -> Result<DMatrix<f64>> {
        self.check_domain(x)?;
        let n = self.dim();
        let mut g = DMatrix::zeros(n, n);
        for i in 0..n {
            for j in 0..n {
                g[(i, j)] = self.partial(x, i, j, &[]).ok_or_else(|| {
                    Error::InvalidArgument(format!("{} metric has no evaluator", self.family()))
                })?;
            }
        }
        Ok(g)
    }

    fn has_closed_form(&self) -> bool {
        true
    }
}

/// How jets are obtained from a [`MetricField`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum JetMode {
    Analytic,
    /// Central differences of the plain metric up to `order` (1..=3).
    FiniteDifference { order: usize },
}

/// A metric together with its jet provider.
#[derive(Debug, Clone)]
pub struct MetricSpec {
    field: Arc<dyn MetricField>,
    mode: JetMode,
}

impl MetricSpec {
    pub fn new(field: Arc<dyn MetricField>) -> Self {
        let mode = if field.has_closed_form() {
            JetMode::Analytic
        } else {
            JetMode::FiniteDifference { order: 3 }
        };
        Self { field, mode }
    }

    pub fn flat(dim: usize) -> Self {
        Self::new(Arc::new(Flat { dim }))
    }

    /// Round sphere of radius `radius` in stereographic coordinates.
    pub fn sphere(dim: usize, radius: f64) -> Result<Self> {
        Ok(Self::new(Arc::new(StereographicSphere::new(dim, radius)?)))
    }

    /// Round 2-sphere in polar coordinates `(theta, phi)`.
    pub fn sphere_polar(radius: f64) -> Result<Self> {
        Ok(Self::new(Arc::new(PolarSphere::new(radius)?)))
    }

    pub fn with_mode(mut self, mode: JetMode) -> Self {
        self.mode = mode;
        self
    }

    pub fn mode(&self) -> JetMode {
        self.mode
    }

    pub fn dim(&self) -> usize {
        self.field.dim()
    }

    pub fn family(&self) -> Family {
        self.field.family()
    }

    pub fn field(&self) -> &Arc<dyn MetricField> {
        &self.field
    }

    pub fn is_analytic(&self) -> bool {
        matches!(self.mode, JetMode::Analytic)
    }
}

/// Evaluates the metric jet of `spec` at `p`.
pub fn evaluate_metric_jet(spec: &MetricSpec, p: &ChartPoint) -> Result<MetricJet> {
    let field = spec.field.as_ref();
    if p.dim() != field.dim() {
        return Err(Error::InvalidArgument(format!(
            "point has dimension {}, metric has {}",
            p.dim(),
            field.dim()
        )));
    }
    let x = p.coords();
    field.check_domain(x)?;
    match spec.mode {
        JetMode::Analytic => analytic_jet(field, x),
        JetMode::FiniteDifference { order } => finite_difference_jet(field, x, order),
    }
}

fn closed_form(field: &dyn MetricField, x: &[f64], i: usize, j: usize, d: &[usize]) -> Result<f64> {
    field.partial(x, i, j, d).ok_or_else(|| {
        Error::InvalidArgument(format!("{} metric has no closed-form jet", field.family()))
    })
}

fn analytic_jet(field: &dyn MetricField, x: &[f64]) -> Result<MetricJet> {
    let n = field.dim();
    let mut g = DMatrix::zeros(n, n);
    let mut dg = Tensor3::zeros(n);
    let mut d2g = Tensor4::zeros(n);
    let mut d3g = Tensor5::zeros(n);
    for i in 0..n {
        for j in i..n {
            let v = closed_form(field, x, i, j, &[])?;
            g[(i, j)] = v;
            g[(j, i)] = v;
            for k in 0..n {
                let v = closed_form(field, x, i, j, &[k])?;
                dg[[i, j, k]] = v;
                dg[[j, i, k]] = v;
                for l in k..n {
                    let v = closed_form(field, x, i, j, &[k, l])?;
                    for (a, b) in [(i, j), (j, i)] {
                        d2g[[a, b, k, l]] = v;
                        d2g[[a, b, l, k]] = v;
                    }
                    for m in l..n {
                        let v = closed_form(field, x, i, j, &[k, l, m])?;
                        for (a, b) in [(i, j), (j, i)] {
                            for [p, q, r] in permutations3(k, l, m) {
                                d3g[[a, b, p, q, r]] = v;
                            }
                        }
                    }
                }
            }
        }
    }
    MetricJet::new(g, dg, Some(d2g), Some(d3g))
}

fn permutations3(a: usize, b: usize, c: usize) -> [[usize; 3]; 6] {
    [
        [a, b, c],
        [a, c, b],
        [b, a, c],
        [b, c, a],
        [c, a, b],
        [c, b, a],
    ]
}

/// Central-difference step for derivative order `k` along a coordinate with value `x`.
pub fn fd_step(order: usize, x: f64) -> f64 {
    x.abs().max(1.0) * f64::EPSILON.powf(1.0 / (order as f64 + 2.0))
}

fn finite_difference_jet(field: &dyn MetricField, x: &[f64], order: usize) -> Result<MetricJet> {
    if order == 0 || order > 3 {
        return Err(Error::InvalidArgument(format!(
            "finite-difference order must be 1..=3, got {order}"
        )));
    }
    let n = field.dim();
    let eval = |shift: &[(usize, f64)]| -> Result<DMatrix<f64>> {
        let mut y = x.to_vec();
        for &(k, h) in shift {
            y[k] += h;
        }
        field.metric(&y)
    };
    let g = eval(&[])?;

    // Product stencil of central differences: each index contributes (f(+h) - f(-h)) / 2h.
    let stencil = |idx: &[usize], ord: usize| -> Result<DMatrix<f64>> {
        let hs: Vec<f64> = idx.iter().map(|&k| fd_step(ord, x[k])).collect();
        let mut acc = DMatrix::zeros(n, n);
        for signs in 0..(1usize << idx.len()) {
            let mut shift = Vec::with_capacity(idx.len());
            let mut sgn = 1.0;
            for (bit, (&k, &h)) in idx.iter().zip(&hs).enumerate() {
                let s = if signs >> bit & 1 == 1 { -1.0 } else { 1.0 };
                sgn *= s;
                shift.push((k, s * h));
            }
            acc += eval(&shift)? * sgn;
        }
        let denom: f64 = hs.iter().map(|h| 2.0 * h).product();
        Ok(acc / denom)
    };

    let mut dg = Tensor3::zeros(n);
    for k in 0..n {
        let d = stencil(&[k], 1)?;
        for i in 0..n {
            for j in 0..n {
                dg[[i, j, k]] = 0.5 * (d[(i, j)] + d[(j, i)]);
            }
        }
    }

    let d2g = if order >= 2 {
        let mut t = Tensor4::zeros(n);
        for k in 0..n {
            for l in k..n {
                let d = if k == l {
                    // three-point second difference
                    let h = fd_step(2, x[k]);
                    (eval(&[(k, h)])? - &g * 2.0 + eval(&[(k, -h)])?) / (h * h)
                } else {
                    stencil(&[k, l], 2)?
                };
                for i in 0..n {
                    for j in 0..n {
                        let v = 0.5 * (d[(i, j)] + d[(j, i)]);
                        t[[i, j, k, l]] = v;
                        t[[i, j, l, k]] = v;
                    }
                }
            }
        }
        Some(t)
    } else {
        None
    };

    let d3g = if order >= 3 {
        let mut t = Tensor5::zeros(n);
        for k in 0..n {
            for l in k..n {
                for m in l..n {
                    let d = stencil(&[k, l, m], 3)?;
                    for i in 0..n {
                        for j in 0..n {
                            let v = 0.5 * (d[(i, j)] + d[(j, i)]);
                            for [p, q, r] in permutations3(k, l, m) {
                                t[[i, j, p, q, r]] = v;
                            }
                        }
                    }
                }
            }
        }
        Some(t)
    } else {
        None
    };

    MetricJet::new(g, dg, d2g, d3g)
}

/// Partial derivatives of `psi(|u|^2)` given `psi, psi', psi'', psi'''` at `s = |u|^2`.
pub(crate) fn radial_partial(psi: [f64; 4], u: &[f64], derivs: &[usize]) -> f64 {
    let delta = |a: usize, b: usize| if a == b { 1.0 } else { 0.0 };
    match *derivs {
        [] => psi[0],
        [k] => 2.0 * psi[1] * u[k],
        [k, l] => 4.0 * psi[2] * u[k] * u[l] + 2.0 * psi[1] * delta(k, l),
        [k, l, m] => {
            8.0 * psi[3] * u[k] * u[l] * u[m]
                + 4.0 * psi[2] * (delta(k, l) * u[m] + delta(k, m) * u[l] + delta(l, m) * u[k])
        }
        _ => unreachable!("jets stop at order 3"),
    }
}

/// `c / (1+s)^2` and its first three derivatives in `s`.
pub(crate) fn stereographic_factor(c: f64, s: f64) -> [f64; 4] {
    let q = 1.0 + s;
    [
        c / (q * q),
        -2.0 * c / (q * q * q),
        6.0 * c / (q * q * q * q),
        -24.0 * c / (q * q * q * q * q),
    ]
}

/// Euclidean metric in Cartesian coordinates.
#[derive(Debug, Clone)]
pub struct Flat {
    pub dim: usize,
}

impl MetricField for Flat {
    fn dim(&self) -> usize {
        self.dim
    }

    fn family(&self) -> Family {
        Family::Flat
    }

    fn check_domain(&self, _x: &[f64]) -> Result<()> {
        Ok(())
    }

    fn partial(&self, _x: &[f64], i: usize, j: usize, derivs: &[usize]) -> Option<f64> {
        Some(if derivs.is_empty() && i == j { 1.0 } else { 0.0 })
    }
}

/// Round sphere of radius `rho`: `g = 4 rho^2 / (1 + |u|^2)^2 * delta`.
#[derive(Debug, Clone)]
pub struct StereographicSphere {
    dim: usize,
    radius: f64,
}

impl StereographicSphere {
    pub fn new(dim: usize, radius: f64) -> Result<Self> {
        if dim < 2 {
            return Err(Error::InvalidArgument("sphere dimension must be >= 2".into()));
        }
        if !(radius > 0.0 && radius.is_finite()) {
            return Err(Error::InvalidArgument(format!("sphere radius {radius} must be > 0")));
        }
        Ok(Self { dim, radius })
    }

    pub fn radius(&self) -> f64 {
        self.radius
    }
}

/// Stereographic images far from the origin approach the projection pole,
/// where the conformal factor degenerates numerically.
const STEREO_MAX_NORM: f64 = 1e3;

impl MetricField for StereographicSphere {
    fn dim(&self) -> usize {
        self.dim
    }

    fn family(&self) -> Family {
        Family::Sphere
    }

    fn check_domain(&self, x: &[f64]) -> Result<()> {
        let s: f64 = x.iter().map(|v| v * v).sum();
        if s.sqrt() > STEREO_MAX_NORM {
            return Err(Error::OutOfDomain {
                coords: x.to_vec(),
                reason: "too close to the stereographic pole".into(),
            });
        }
        Ok(())
    }

    fn partial(&self, x: &[f64], i: usize, j: usize, derivs: &[usize]) -> Option<f64> {
        if i != j {
            return Some(0.0);
        }
        let s = x.iter().map(|v| v * v).sum();
        let psi = stereographic_factor(4.0 * self.radius * self.radius, s);
        Some(radial_partial(psi, x, derivs))
    }
}

/// Round 2-sphere `rho^2 (d theta^2 + sin^2 theta d phi^2)`.
#[derive(Debug, Clone)]
pub struct PolarSphere {
    radius: f64,
}

impl PolarSphere {
    pub fn new(radius: f64) -> Result<Self> {
        if !(radius > 0.0 && radius.is_finite()) {
            return Err(Error::InvalidArgument(format!("sphere radius {radius} must be > 0")));
        }
        Ok(Self { radius })
    }
}

impl MetricField for PolarSphere {
    fn dim(&self) -> usize {
        2
    }

    fn family(&self) -> Family {
        Family::Sphere
    }

    fn check_domain(&self, x: &[f64]) -> Result<()> {
        if x[0].sin().abs() < 1e-8 {
            return Err(Error::OutOfDomain {
                coords: x.to_vec(),
                reason: "polar chart is singular at the poles".into(),
            });
        }
        Ok(())
    }

    fn partial(&self, x: &[f64], i: usize, j: usize, derivs: &[usize]) -> Option<f64> {
        let r2 = self.radius * self.radius;
        if i != j {
            return Some(0.0);
        }
        if derivs.iter().any(|&d| d != 0) {
            return Some(0.0);
        }
        if i == 0 {
            return Some(if derivs.is_empty() { r2 } else { 0.0 });
        }
        // sin^2 = (1 - cos 2theta) / 2
        let th2 = 2.0 * x[0];
        let v = match derivs.len() {
            0 => 0.5 * (1.0 - th2.cos()),
            1 => th2.sin(),
            2 => 2.0 * th2.cos(),
            _ => -4.0 * th2.sin(),
        };
        Some(r2 * v)
    }
}

/// One term `amplitude * S_ij * sin(kappa . x + phase)` of an analytic perturbation.
#[derive(Debug, Clone)]
pub struct Wave {
    pub amplitude: f64,
    pub shape: DMatrix<f64>,
    pub wavevector: Vec<f64>,
    pub phase: f64,
}

/// `base + sum of waves`, with closed-form jets whenever the base has them.
#[derive(Debug, Clone)]
pub struct Perturbed {
    base: Arc<dyn MetricField>,
    waves: Vec<Wave>,
}

impl Perturbed {
    pub fn new(base: Arc<dyn MetricField>, waves: Vec<Wave>) -> Result<Self> {
        let n = base.dim();
        for w in &waves {
            if w.shape.nrows() != n || w.shape.ncols() != n || w.wavevector.len() != n {
                return Err(Error::InvalidArgument("perturbation shape mismatch".into()));
            }
        }
        Ok(Self { base, waves })
    }

    /// Seeded smooth symmetric perturbation of relative size `amplitude`.
    pub fn random(
        base: Arc<dyn MetricField>,
        amplitude: f64,
        terms: usize,
        rng: &mut impl rand::Rng,
    ) -> Result<Self> {
        use rand_distr::{Distribution, StandardNormal};
        let n = base.dim();
        let waves = (0..terms)
            .map(|_| {
                let mut s: DMatrix<f64> = DMatrix::from_fn(n, n, |_, _| StandardNormal.sample(rng));
                s = (&s + s.transpose()) * 0.5;
                let norm = s.norm().max(1e-12);
                Wave {
                    amplitude,
                    shape: s / norm,
                    wavevector: (0..n).map(|_| -> f64 { StandardNormal.sample(rng) }).collect(),
                    phase: rng.gen_range(0.0..std::f64::consts::TAU),
                }
            })
            .collect();
        Self::new(base, waves)
    }
}

impl MetricField for Perturbed {
    fn dim(&self) -> usize {
        self.base.dim()
    }

    fn family(&self) -> Family {
        Family::Custom
    }

    fn check_domain(&self, x: &[f64]) -> Result<()> {
        self.base.check_domain(x)
    }

    fn partial(&self, x: &[f64], i: usize, j: usize, derivs: &[usize]) -> Option<f64> {
        let mut v = self.base.partial(x, i, j, derivs)?;
        for w in &self.waves {
            let arg: f64 = w.wavevector.iter().zip(x).map(|(k, xi)| k * xi).sum::<f64>()
                + w.phase
                + derivs.len() as f64 * std::f64::consts::FRAC_PI_2;
            let kprod: f64 = derivs.iter().map(|&d| w.wavevector[d]).product();
            v += w.amplitude * w.shape[(i, j)] * kprod * arg.sin();
        }
        Some(v)
    }

    fn metric(&self, x: &[f64]) -> Result<DMatrix<f64>> {
        let mut g = self.base.metric(x)?;
        for w in &self.waves {
            let arg: f64 =
                w.wavevector.iter().zip(x).map(|(k, xi)| k * xi).sum::<f64>() + w.phase;
            g += &w.shape * (w.amplitude * arg.sin());
        }
        Ok(g)
    }

    fn has_closed_form(&self) -> bool {
        self.base.has_closed_form()
    }
}

type MetricFn = dyn Fn(&[f64]) -> Result<DMatrix<f64>> + Send + Sync;

/// A metric given only by an evaluator; jets come from finite differences.
#[derive(Clone)]
pub struct CustomMetric {
    dim: usize,
    eval: Arc<MetricFn>,
}

impl CustomMetric {
    pub fn new(
        dim: usize,
        eval: impl Fn(&[f64]) -> Result<DMatrix<f64>> + Send + Sync + 'static,
    ) -> Self {
        Self {
            dim,
            eval: Arc::new(eval),
        }
    }
}

impl fmt::Debug for CustomMetric {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("CustomMetric").field("dim", &self.dim).finish()
    }
}

impl MetricField for CustomMetric {
    fn dim(&self) -> usize {
        self.dim
    }

    fn family(&self) -> Family {
        Family::Custom
    }

    fn check_domain(&self, _x: &[f64]) -> Result<()> {
        Ok(())
    }

    fn partial(&self, _x: &[f64], _i: usize, _j: usize, _derivs: &[usize]) -> Option<f64> {
        None
    }

    fn metric(&self, x: &[f64]) -> Result<DMatrix<f64>> {
        (self.eval)(x)
    }

    fn has_closed_form(&self) -> bool {
        false
    }
}
