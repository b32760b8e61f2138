//! Meridian profiles `t -> r(t)` of rotational hypersurfaces.

use std::fmt;
use std::sync::{Arc, Mutex};

use crate::error::{Error, Result};
use crate::numeric::ode::{self, OdeOptions};

/// `r` and its first four derivatives at one parameter value.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ProfileJet {
    pub r: f64,
    pub r1: f64,
    pub r2: f64,
    pub r3: f64,
    pub r4: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ProfileKind {
    Constant,
    Circle,
    Cosh,
    Ode,
    Custom,
}

impl fmt::Display for ProfileKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            ProfileKind::Constant => "constant",
            ProfileKind::Circle => "circle",
            ProfileKind::Cosh => "cosh",
            ProfileKind::Ode => "ode",
            ProfileKind::Custom => "custom",
        };
        f.write_str(s)
    }
}

pub trait ProfileCurve: Send + Sync + fmt::Debug {
    fn kind(&self) -> ProfileKind;

    /// Open parameter interval.
    fn domain(&self) -> (f64, f64);

    /// Derivatives at `t`; callers go through [`ProfileCurve::jet`].
    fn eval(&self, t: f64) -> Result<ProfileJet>;

    fn jet(&self, t: f64) -> Result<ProfileJet> {
        let (lo, hi) = self.domain();
        if !(t > lo && t < hi) {
            return Err(Error::ProfileDomain { t, lo, hi });
        }
        let j = self.eval(t)?;
        if !(j.r > 0.0) {
            return Err(Error::RadiusCollapse { t, r: j.r });
        }
        Ok(j)
    }
}

/// Largest mismatch between each stored derivative and a central difference
/// of the one below it.
pub fn profile_consistency(profile: &dyn ProfileCurve, t: f64) -> Result<f64> {
    let h = 1e-3;
    let at = |k: f64| profile.jet(t + k * h);
    let (p2, p1, m1, m2) = (at(2.0)?, at(1.0)?, at(-1.0)?, at(-2.0)?);
    let j = profile.jet(t)?;
    // fourth-order central difference
    let d = |f: fn(&ProfileJet) -> f64| (-f(&p2) + 8.0 * f(&p1) - 8.0 * f(&m1) + f(&m2)) / (12.0 * h);
    let res = [
        (d(|j| j.r) - j.r1).abs(),
        (d(|j| j.r1) - j.r2).abs(),
        (d(|j| j.r2) - j.r3).abs(),
        (d(|j| j.r3) - j.r4).abs(),
    ];
    let scale = [j.r, j.r1, j.r2, j.r3, j.r4]
        .iter()
        .fold(1.0f64, |acc, v| acc.max(v.abs()));
    Ok(res.iter().fold(0.0f64, |a, b| a.max(*b)) / scale)
}

/// `r = rho`: the cylinder.
#[derive(Debug, Clone)]
pub struct ConstantProfile {
    pub rho: f64,
}

impl ProfileCurve for ConstantProfile {
    fn kind(&self) -> ProfileKind {
        ProfileKind::Constant
    }
    fn domain(&self) -> (f64, f64) {
        (f64::NEG_INFINITY, f64::INFINITY)
    }
    fn eval(&self, _t: f64) -> Result<ProfileJet> {
        Ok(ProfileJet { r: self.rho, r1: 0.0, r2: 0.0, r3: 0.0, r4: 0.0 })
    }
}

/// `r = sqrt(rho^2 - t^2)`: the round sphere of radius `rho`.
#[derive(Debug, Clone)]
pub struct CircleProfile {
    pub rho: f64,
}

impl ProfileCurve for CircleProfile {
    fn kind(&self) -> ProfileKind {
        ProfileKind::Circle
    }
    fn domain(&self) -> (f64, f64) {
        (-self.rho, self.rho)
    }
    fn eval(&self, t: f64) -> Result<ProfileJet> {
        let p2 = self.rho * self.rho;
        let r = (p2 - t * t).sqrt();
        Ok(ProfileJet {
            r,
            r1: -t / r,
            r2: -p2 / r.powi(3),
            r3: -3.0 * p2 * t / r.powi(5),
            r4: -3.0 * p2 * (r * r + 5.0 * t * t) / r.powi(7),
        })
    }
}

/// `r = cosh t`.
#[derive(Debug, Clone)]
pub struct CoshProfile;

impl ProfileCurve for CoshProfile {
    fn kind(&self) -> ProfileKind {
        ProfileKind::Cosh
    }
    fn domain(&self) -> (f64, f64) {
        (-20.0, 20.0)
    }
    fn eval(&self, t: f64) -> Result<ProfileJet> {
        let (c, s) = (t.cosh(), t.sinh());
        Ok(ProfileJet { r: c, r1: s, r2: c, r3: s, r4: c })
    }
}

type JetFn = dyn Fn(f64) -> ProfileJet + Send + Sync;

/// A profile given by a user-supplied jet evaluator.
#[derive(Clone)]
pub struct CustomProfile {
    domain: (f64, f64),
    f: Arc<JetFn>,
}

impl CustomProfile {
    pub fn new(domain: (f64, f64), f: impl Fn(f64) -> ProfileJet + Send + Sync + 'static) -> Self {
        Self { domain, f: Arc::new(f) }
    }
}

impl fmt::Debug for CustomProfile {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("CustomProfile").field("domain", &self.domain).finish()
    }
}

impl ProfileCurve for CustomProfile {
    fn kind(&self) -> ProfileKind {
        ProfileKind::Custom
    }
    fn domain(&self) -> (f64, f64) {
        self.domain
    }
    fn eval(&self, t: f64) -> Result<ProfileJet> {
        Ok((self.f)(t))
    }
}

/// Radii below this count as collapse onto the axis.
pub const MIN_RADIUS: f64 = 1e-5;
/// Slopes above this mean the meridian turned perpendicular to the axis.
pub const MAX_SLOPE: f64 = 1e6;

/// Right-hand side of `r'' = B r (1+v^2)^2 - 2 (1+v^2) / r` and the partial
/// derivatives needed for `r'''` and `r''''`.
#[derive(Debug, Clone, Copy)]
pub(crate) struct MeridianField {
    pub b: f64,
}

impl MeridianField {
    pub fn accel(&self, r: f64, v: f64) -> f64 {
        let g = 1.0 + v * v;
        self.b * r * g * g - 2.0 * g / r
    }

    pub fn jet(&self, r: f64, v: f64) -> ProfileJet {
        let b = self.b;
        let g = 1.0 + v * v;
        let f = self.accel(r, v);
        let fr = b * g * g + 2.0 * g / (r * r);
        let fv = 4.0 * b * v * r * g - 4.0 * v / r;
        let frr = -4.0 * g / r.powi(3);
        let frv = 4.0 * b * v * g + 4.0 * v / (r * r);
        let fvv = 4.0 * b * r * (1.0 + 3.0 * v * v) - 4.0 / r;
        let r3 = fr * v + fv * f;
        let r4 = (frr * v + frv * f) * v + fr * f + (frv * v + fvv * f) * f + fv * r3;
        ProfileJet { r, r1: v, r2: f, r3, r4 }
    }

    pub fn guard(t: f64, y: &[f64; 2]) -> Result<()> {
        if !(y[0] > MIN_RADIUS) {
            return Err(Error::RadiusCollapse { t, r: y[0] });
        }
        if !(y[1].abs() < MAX_SLOPE) {
            return Err(Error::DomainExit {
                t,
                reason: format!("meridian slope {:e} is unbounded", y[1]),
            });
        }
        Ok(())
    }

    /// States at `times` (sorted ascending, any sign) from `(r0, v0)` at `t = 0`.
    pub fn integrate(&self, r0: f64, v0: f64, times: &[f64], opts: &OdeOptions) -> Result<Vec<[f64; 2]>> {
        let rhs = |_t: f64, y: &[f64; 2]| [y[1], self.accel(y[0], y[1])];
        let split = times.partition_point(|&t| t < 0.0);
        let backward: Vec<f64> = times[..split].iter().rev().copied().collect();
        let mut back = ode::solve(rhs, 0.0, [r0, v0], &backward, opts, Self::guard)?;
        back.reverse();
        let fwd = ode::solve(rhs, 0.0, [r0, v0], &times[split..], opts, Self::guard)?;
        back.extend(fwd);
        Ok(back)
    }
}

const CHECKPOINTS: usize = 256;

/// Profile generated by integrating the constant-`a - b` meridian equation
/// from `(r0, v0)` at `t = 0`.
#[derive(Debug)]
pub struct OdeProfile {
    field: MeridianField,
    r0: f64,
    v0: f64,
    span: (f64, f64),
    opts: OdeOptions,
    times: Vec<f64>,
    states: Vec<[f64; 2]>,
    last: Mutex<Option<(f64, ProfileJet)>>,
}

impl OdeProfile {
    /// Fails if the solution cannot be continued over the closed `span`.
    pub fn new(b: f64, r0: f64, v0: f64, span: (f64, f64), opts: OdeOptions) -> Result<Self> {
        if !(r0 > 0.0) || !r0.is_finite() || !v0.is_finite() || !b.is_finite() {
            return Err(Error::InvalidArgument(format!(
                "meridian initial data r0 = {r0}, v0 = {v0}, B = {b} invalid"
            )));
        }
        if !(span.0 <= 0.0 && span.1 >= 0.0 && span.0 < span.1) {
            return Err(Error::InvalidArgument(format!(
                "t_span [{}, {}] must contain 0",
                span.0, span.1
            )));
        }
        let field = MeridianField { b };
        let dt = (span.1 - span.0) / CHECKPOINTS as f64;
        let mut times: Vec<f64> = (0..=CHECKPOINTS).map(|i| span.0 + i as f64 * dt).collect();
        times.push(0.0);
        times.sort_by(|a, b| a.partial_cmp(b).unwrap());
        times.dedup();
        let states = field.integrate(r0, v0, &times, &opts)?;
        Ok(Self {
            field,
            r0,
            v0,
            span,
            opts,
            times,
            states,
            last: Mutex::new(None),
        })
    }

    pub fn b(&self) -> f64 {
        self.field.b
    }

    pub fn initial(&self) -> (f64, f64) {
        (self.r0, self.v0)
    }

    pub fn span(&self) -> (f64, f64) {
        self.span
    }

    fn state(&self, t: f64) -> Result<[f64; 2]> {
        let i = self.times.partition_point(|&s| s <= t);
        // nearest checkpoint on the side of 0, so we always integrate away from it
        let k = if t >= 0.0 { i.saturating_sub(1) } else { i.min(self.times.len() - 1) };
        let (t0, y0) = (self.times[k], self.states[k]);
        if t == t0 {
            return Ok(y0);
        }
        let rhs = |_t: f64, y: &[f64; 2]| [y[1], self.field.accel(y[0], y[1])];
        // shift time so the integrator starts at 0
        let out = ode::solve(rhs, 0.0, y0, &[t - t0], &self.opts, |s, y| {
            MeridianField::guard(s + t0, y)
        })?;
        Ok(out[0])
    }
}

impl ProfileCurve for OdeProfile {
    fn kind(&self) -> ProfileKind {
        ProfileKind::Ode
    }

    fn domain(&self) -> (f64, f64) {
        self.span
    }

    fn eval(&self, t: f64) -> Result<ProfileJet> {
        if let Some((s, j)) = *self.last.lock().unwrap() {
            if s == t {
                return Ok(j);
            }
        }
        let [r, v] = self.state(t)?;
        let j = self.field.jet(r, v);
        *self.last.lock().unwrap() = Some((t, j));
        Ok(j)
    }
}
