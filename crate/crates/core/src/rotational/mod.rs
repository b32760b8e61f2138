//! Rotational hypersurfaces: the induced warped metric on
//! `(u^1, ..., u^{n-1}, t)`, the `(a, b)` curvature coefficients, the closed
//! form of `nabla R`, and meridians with constant `a - b`.
//!
//! The sphere factor uses stereographic coordinates `u` and the axial
//! coordinate `t` is always the last index.

mod elliptic;
mod meridian;
mod profile;

use std::sync::Arc;

use nalgebra::DMatrix;

use crate::error::{Error, Result};
use crate::metric::{
    evaluate_metric_jet, radial_partial, stereographic_factor, ChartPoint, Family, MetricField,
    MetricSpec,
};
use crate::tensor::{OneForm, Tensor5};
use crate::tensorcalc::{build_phi, build_pi, build_pi_form, eta_times, riemann};

pub use elliptic::{
    case_ii_derived_prefactor, case_ii_quoted_prefactor, elliptic_case_i, elliptic_case_ii,
    elliptic_vs_quadrature, elliptic_vs_quadrature_with, legendre_integrals, EllipticParams,
};
pub use meridian::{
    meridian_ode, meridian_quadrature, ode_vs_quadrature, turning_radii, MeridianProblem,
    MeridianSample, MeridianSolution,
};
pub use profile::{
    profile_consistency, CircleProfile, ConstantProfile, CoshProfile, CustomProfile, OdeProfile,
    ProfileCurve, ProfileJet, ProfileKind, MAX_SLOPE, MIN_RADIUS,
};

const STEREO_MAX_NORM: f64 = 1e3;

/// Warped metric `r(t)^2 g_S ⊕ (1 + r'(t)^2) dt^2` with `g_S` the unit round
/// sphere in stereographic coordinates.
#[derive(Debug, Clone)]
pub struct RotationalChart {
    profile: Arc<dyn ProfileCurve>,
    n: usize,
}

impl RotationalChart {
    pub fn new(profile: Arc<dyn ProfileCurve>, n: usize) -> Result<Self> {
        if n < 2 {
            return Err(Error::InvalidArgument(format!(
                "rotational hypersurface dimension must be >= 2, got {n}"
            )));
        }
        Ok(Self { profile, n })
    }

    pub fn profile(&self) -> &Arc<dyn ProfileCurve> {
        &self.profile
    }

    /// Chart point with sphere coordinates `u` and axial parameter `t`.
    pub fn point(&self, u: &[f64], t: f64) -> Result<ChartPoint> {
        if u.len() + 1 != self.n {
            return Err(Error::InvalidArgument(format!(
                "expected {} sphere coordinates, got {}",
                self.n - 1,
                u.len()
            )));
        }
        let mut c = u.to_vec();
        c.push(t);
        ChartPoint::new(c)
    }

    pub fn spec(&self) -> MetricSpec {
        MetricSpec::new(Arc::new(self.clone()))
    }

    /// `eta = sqrt(1 + r'^2) dt`, the metric dual of the unit axial field.
    pub fn axial_eta(&self, p: &ChartPoint) -> Result<OneForm> {
        let j = self.profile.jet(self.t_of(p))?;
        let mut e = vec![0.0; self.n];
        e[self.n - 1] = (1.0 + j.r1 * j.r1).sqrt();
        Ok(OneForm(e))
    }

    /// `xi = d/dt / sqrt(1 + r'^2)`.
    pub fn axial_xi(&self, p: &ChartPoint) -> Result<Vec<f64>> {
        let j = self.profile.jet(self.t_of(p))?;
        let mut v = vec![0.0; self.n];
        v[self.n - 1] = 1.0 / (1.0 + j.r1 * j.r1).sqrt();
        Ok(v)
    }

    pub fn t_of(&self, p: &ChartPoint) -> f64 {
        p.coords()[self.n - 1]
    }
}

/// Builds the metric spec of the rotational hypersurface with profile `profile`.
pub fn induced_chart(profile: Arc<dyn ProfileCurve>, n: usize) -> Result<MetricSpec> {
    Ok(RotationalChart::new(profile, n)?.spec())
}

fn f_derivative(j: &ProfileJet, k: usize) -> f64 {
    // F = r^2
    match k {
        0 => j.r * j.r,
        1 => 2.0 * j.r * j.r1,
        2 => 2.0 * j.r1 * j.r1 + 2.0 * j.r * j.r2,
        3 => 6.0 * j.r1 * j.r2 + 2.0 * j.r * j.r3,
        _ => unreachable!(),
    }
}

fn g_derivative(j: &ProfileJet, k: usize) -> f64 {
    // G = 1 + r'^2
    match k {
        0 => 1.0 + j.r1 * j.r1,
        1 => 2.0 * j.r1 * j.r2,
        2 => 2.0 * j.r2 * j.r2 + 2.0 * j.r1 * j.r3,
        3 => 6.0 * j.r2 * j.r3 + 2.0 * j.r1 * j.r4,
        _ => unreachable!(),
    }
}

impl MetricField for RotationalChart {
    fn dim(&self) -> usize {
        self.n
    }

    fn family(&self) -> Family {
        Family::Rotational
    }

    fn check_domain(&self, x: &[f64]) -> Result<()> {
        let s: f64 = x[..self.n - 1].iter().map(|v| v * v).sum();
        if s.sqrt() > STEREO_MAX_NORM {
            return Err(Error::OutOfDomain {
                coords: x.to_vec(),
                reason: "too close to the stereographic pole".into(),
            });
        }
        self.profile.jet(x[self.n - 1]).map(|_| ())
    }

    fn partial(&self, x: &[f64], i: usize, j: usize, derivs: &[usize]) -> Option<f64> {
        let last = self.n - 1;
        if i != j {
            return Some(0.0);
        }
        let jet = self.profile.jet(x[last]).ok()?;
        let tc = derivs.iter().filter(|&&d| d == last).count();
        let upart: Vec<usize> = derivs.iter().copied().filter(|&d| d != last).collect();
        if i == last {
            return Some(if upart.is_empty() { g_derivative(&jet, tc) } else { 0.0 });
        }
        let u = &x[..last];
        let s = u.iter().map(|v| v * v).sum();
        let psi = stereographic_factor(4.0, s);
        Some(f_derivative(&jet, tc) * radial_partial(psi, u, &upart))
    }
}

/// Scalar invariants of a rotational hypersurface at parameter `t`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RotationalScalars {
    pub t: f64,
    pub jet: ProfileJet,
    pub a: f64,
    pub b: f64,
    /// `da/dt`, `db/dt`.
    pub a_t: f64,
    pub b_t: f64,
    /// Derivatives along the unit axial field.
    pub xi_a: f64,
    pub xi_b: f64,
    /// Closed-form umbilicity function `r' / (r sqrt(1 + r'^2))`.
    pub lambda: f64,
}

impl RotationalScalars {
    pub fn tau(&self, n: usize) -> f64 {
        let n = n as f64;
        (n - 1.0) * (n * self.a + 2.0 * self.b)
    }

    /// Coefficient of `eta ⊗ Phi` in `nabla R`; zero exactly when `a - b` is stationary.
    pub fn phi_coefficient(&self) -> f64 {
        self.xi_b - 2.0 * self.b * self.lambda
    }

    /// Factor `f` with `phi_E = f eta|_E` on a plane at angle `gamma` to the axis.
    pub fn sectional_factor(&self, cos2gamma: f64) -> f64 {
        4.0 * self.lambda * self.b + self.phi_coefficient() * cos2gamma
    }

    /// Relative curvature of planes containing the axial direction.
    pub fn axial_plane_curvature(&self) -> f64 {
        2.0 * self.lambda * self.b + self.xi_b
    }

    /// `4 |lambda b|`, the relative curvature when `a - b` is constant.
    pub fn k_constant(&self) -> f64 {
        4.0 * (self.lambda * self.b).abs()
    }

    /// Gaussian curvature when `n = 2`.
    pub fn gauss_curvature(&self) -> f64 {
        self.a + self.b
    }
}

pub fn rotational_scalars(profile: &dyn ProfileCurve, t: f64) -> Result<RotationalScalars> {
    let j = profile.jet(t)?;
    let (r, r1, r2, r3) = (j.r, j.r1, j.r2, j.r3);
    let g = 1.0 + r1 * r1;
    let g1 = 2.0 * r1 * r2;
    let nn = g + r * r2;
    let nn1 = 3.0 * r1 * r2 + r * r3;
    let a = 1.0 / (r * r * g);
    let b = -nn / (r * r * g * g);
    let a_t = 2.0 * r1 * b / r;
    let b_t = -nn1 / (r * r * g * g) + nn * (2.0 * r1 * g + 2.0 * r * g1) / (r.powi(3) * g.powi(3));
    let sg = g.sqrt();
    Ok(RotationalScalars {
        t,
        jet: j,
        a,
        b,
        a_t,
        b_t,
        xi_a: a_t / sg,
        xi_b: b_t / sg,
        lambda: r1 / (r * sg),
    })
}

/// Coefficients `(c_g, c_eta)` of the second fundamental form `h = c_g g - c_eta eta ⊗ eta`.
pub fn second_fundamental(profile: &dyn ProfileCurve, t: f64) -> Result<(f64, f64)> {
    let j = profile.jet(t)?;
    let g = 1.0 + j.r1 * j.r1;
    Ok((
        1.0 / (j.r * g.sqrt()),
        (g + j.r * j.r2) / (j.r * g.powf(1.5)),
    ))
}

/// The coefficients in `R = a pi + b Phi`.
pub fn ab_coefficients(profile: &dyn ProfileCurve, t: f64) -> Result<(f64, f64)> {
    let s = rotational_scalars(profile, t)?;
    Ok((s.a, s.b))
}

/// `lambda = xi(a) / (2 b)`; undefined where `b` vanishes.
pub fn lambda_umbilic(profile: &dyn ProfileCurve, t: f64) -> Result<f64> {
    let s = rotational_scalars(profile, t)?;
    if s.b.abs() < 1e-12 * s.a.abs().max(1.0) {
        return Err(Error::ConstantCurvatureDegeneracy { b: s.b });
    }
    Ok(s.xi_a / (2.0 * s.b))
}

/// Max componentwise difference between the pipeline curvature tensor and `a pi + b Phi`.
pub fn curvature_identity_check(chart: &RotationalChart, p: &ChartPoint) -> Result<f64> {
    let jet = evaluate_metric_jet(&chart.spec(), p)?;
    let numeric = riemann(&jet)?;
    let s = rotational_scalars(chart.profile.as_ref(), chart.t_of(p))?;
    let model = build_pi(&jet)
        .scaled(s.a)
        .add_scaled(s.b, &build_phi(&jet, &chart.axial_eta(p)?)?);
    Ok(numeric.max_diff(&model))
}

/// `nabla R = lambda b Pi(eta) + (xi(b) - 2 b lambda) eta ⊗ Phi` in chart components.
pub fn nabla_r_analytic(chart: &RotationalChart, p: &ChartPoint) -> Result<Tensor5> {
    let jet = evaluate_metric_jet(&chart.spec(), p)?;
    let s = rotational_scalars(chart.profile.as_ref(), chart.t_of(p))?;
    let eta = chart.axial_eta(p)?;
    let phi = build_phi(&jet, &eta)?;
    Ok(build_pi_form(&eta, &jet)
        .scaled(s.lambda * s.b)
        .add_scaled(s.phi_coefficient(), &eta_times(&eta, &phi)))
}

/// Metric of the leaf `t = const`: the round sphere of radius `r(t)`.
pub fn leaf_metric(chart: &RotationalChart, t: f64) -> Result<MetricSpec> {
    let r = chart.profile.jet(t)?.r;
    MetricSpec::sphere(chart.n - 1, r)
}

/// Induced metric matrix, for callers that only need `g`.
pub fn metric_at(chart: &RotationalChart, p: &ChartPoint) -> Result<DMatrix<f64>> {
    chart.metric(p.coords())
}
