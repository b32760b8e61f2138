//! Run configuration in TOML.

use std::sync::Arc;

use serde::Deserialize;

use crate::directed::Tolerances;
use crate::error::{Error, Result};
use crate::metric::MetricSpec;
use crate::rotational::{
    CircleProfile, ConstantProfile, CoshProfile, MeridianProblem, OdeProfile, ProfileCurve,
    RotationalChart,
};

pub const DEFAULT_SEED: u64 = 42;
pub const DEFAULT_PLANES: usize = 64;
pub const DEFAULT_T_SPAN: (f64, f64) = (-0.2, 0.2);

#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub metric: MetricSection,
    pub rotational: Option<RotationalSection>,
    #[serde(default)]
    pub analysis: AnalysisSection,
    #[serde(default)]
    pub output: OutputSection,
    #[serde(default)]
    pub lemma23: Lemma23Section,
    #[serde(default)]
    pub verify: VerifySection,
}

#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MetricSection {
    /// `flat`, `sphere` or `rotational`.
    pub family: String,
    pub dim: usize,
    pub radius: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RotationalSection {
    /// `cosh`, `circle`, `constant` or `ode`; implied by an `ode` table.
    pub profile: Option<String>,
    pub rho: Option<f64>,
    pub ode: Option<OdeSection>,
}

#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OdeSection {
    #[serde(rename = "B")]
    pub b: f64,
    pub r0: f64,
    pub v0: f64,
    pub t_span: Option<[f64; 2]>,
    pub samples: Option<usize>,
}

#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AnalysisSection {
    #[serde(default = "default_seed")]
    pub seed: u64,
    #[serde(default = "default_planes")]
    pub planes_per_point: usize,
    /// One axis per chart coordinate.
    pub grid: Option<Vec<GridAxis>>,
    #[serde(default)]
    pub tolerances: ToleranceOverrides,
}

impl Default for AnalysisSection {
    fn default() -> Self {
        Self {
            seed: DEFAULT_SEED,
            planes_per_point: DEFAULT_PLANES,
            grid: None,
            tolerances: ToleranceOverrides::default(),
        }
    }
}

fn default_seed() -> u64 {
    DEFAULT_SEED
}

fn default_planes() -> usize {
    DEFAULT_PLANES
}

#[derive(Debug, Clone, Copy, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridAxis {
    pub min: f64,
    pub max: f64,
    pub count: usize,
}

impl GridAxis {
    pub fn values(&self) -> Vec<f64> {
        if self.count == 1 {
            return vec![self.min];
        }
        (0..self.count)
            .map(|i| self.min + (self.max - self.min) * i as f64 / (self.count - 1) as f64)
            .collect()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ToleranceOverrides {
    pub relative: Option<f64>,
    pub locally_symmetric: Option<f64>,
    pub degenerate_gradient: Option<f64>,
    pub min_cos2: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OutputSection {
    pub path: Option<String>,
    #[serde(default = "default_precision")]
    pub precision: usize,
    #[serde(default = "default_resolution")]
    pub mesh_angular: usize,
    #[serde(default = "default_resolution")]
    pub mesh_axial: usize,
    pub mesh_t_range: Option<[f64; 2]>,
}

impl Default for OutputSection {
    fn default() -> Self {
        Self {
            path: None,
            precision: default_precision(),
            mesh_angular: default_resolution(),
            mesh_axial: default_resolution(),
            mesh_t_range: None,
        }
    }
}

fn default_precision() -> usize {
    17
}

fn default_resolution() -> usize {
    64
}

#[derive(Debug, Clone, PartialEq, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Lemma23Section {
    pub n: Option<Vec<usize>>,
}

/// Expected flags; `verify` fails where a grid point disagrees.
#[derive(Debug, Clone, Copy, PartialEq, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct VerifySection {
    pub expect_locally_symmetric: Option<bool>,
    pub expect_directed: Option<bool>,
    pub expect_pointwise_constant: Option<bool>,
}

/// 1-based line of a byte offset.
fn line_of(text: &str, offset: usize) -> usize {
    text[..offset.min(text.len())].matches('\n').count() + 1
}

/// Parses and validates a configuration.
///
/// Malformed TOML gives `ConfigSyntax` with its line; well-formed input with
/// missing tables, unknown keys or bad values gives `ConfigSemantic`.
pub fn parse_config(text: &str) -> Result<RunConfig> {
    let value: toml::Table = toml::from_str(text).map_err(|e| Error::ConfigSyntax {
        line: e.span().map(|s| line_of(text, s.start)).unwrap_or(1),
        message: e.message().to_string(),
    })?;
    if !value.contains_key("metric") {
        return Err(Error::ConfigSemantic("missing [metric] table".into()));
    }
    let cfg: RunConfig = toml::Value::Table(value)
        .try_into()
        .map_err(|e: toml::de::Error| Error::ConfigSemantic(e.message().to_string()))?;
    cfg.validate()?;
    Ok(cfg)
}

fn semantic(msg: impl Into<String>) -> Error {
    Error::ConfigSemantic(msg.into())
}

impl RunConfig {
    fn validate(&self) -> Result<()> {
        let m = &self.metric;
        if m.dim < 2 {
            return Err(semantic(format!("metric.dim must be >= 2, got {}", m.dim)));
        }
        match m.family.as_str() {
            "flat" => {}
            "sphere" => {
                if !(m.radius.unwrap_or(1.0) > 0.0) {
                    return Err(semantic("metric.radius must be positive"));
                }
            }
            "rotational" => {
                self.profile_tag()?;
            }
            other => return Err(semantic(format!("unknown metric family {other:?}"))),
        }
        if let Some(r) = &self.rotational {
            if let Some(rho) = r.rho {
                if !(rho > 0.0) {
                    return Err(semantic("rotational.rho must be positive"));
                }
            }
            if let Some(o) = &r.ode {
                let (lo, hi) = o.t_span.map(|s| (s[0], s[1])).unwrap_or(DEFAULT_T_SPAN);
                if !(lo <= 0.0 && 0.0 <= hi && lo < hi) {
                    return Err(semantic("rotational.ode.t_span must contain 0"));
                }
                if !(o.r0 > 0.0) {
                    return Err(semantic("rotational.ode.r0 must be positive"));
                }
                if o.samples.is_some_and(|s| s < 2) {
                    return Err(semantic("rotational.ode.samples must be >= 2"));
                }
            }
        }
        let a = &self.analysis;
        if a.planes_per_point < 8 {
            return Err(semantic("analysis.planes_per_point must be >= 8"));
        }
        if let Some(grid) = &a.grid {
            if grid.len() != m.dim {
                return Err(semantic(format!(
                    "analysis.grid has {} axes for a {}-dimensional chart",
                    grid.len(),
                    m.dim
                )));
            }
            for ax in grid {
                if ax.count == 0 || !(ax.min <= ax.max) {
                    return Err(semantic("grid axes need count >= 1 and min <= max"));
                }
            }
        }
        let t = &a.tolerances;
        for v in [t.relative, t.locally_symmetric, t.degenerate_gradient, t.min_cos2].into_iter().flatten() {
            if !(v > 0.0) {
                return Err(semantic("tolerances must be positive"));
            }
        }
        let o = &self.output;
        if !(1..=17).contains(&o.precision) {
            return Err(semantic("output.precision must be in 1..=17"));
        }
        if o.mesh_angular < 3 || o.mesh_axial < 2 {
            return Err(semantic("mesh resolution must be at least 3 x 2"));
        }
        if let Some(ns) = &self.lemma23.n {
            if ns.iter().any(|&n| !(2..=4).contains(&n)) {
                return Err(semantic("lemma23.n entries must be 2, 3 or 4"));
            }
        }
        Ok(())
    }

    fn profile_tag(&self) -> Result<&str> {
        let r = self
            .rotational
            .as_ref()
            .ok_or_else(|| semantic("family \"rotational\" needs a [rotational] table"))?;
        let tag = match (&r.profile, &r.ode) {
            (Some(p), _) => p.as_str(),
            (None, Some(_)) => "ode",
            (None, None) => return Err(semantic("rotational.profile or rotational.ode required")),
        };
        match tag {
            "cosh" => Ok(tag),
            "circle" | "constant" if r.rho.is_some() => Ok(tag),
            "circle" | "constant" => Err(semantic(format!("profile {tag:?} needs rotational.rho"))),
            "ode" if r.ode.is_some() => Ok(tag),
            "ode" => Err(semantic("profile \"ode\" needs rotational.ode")),
            other => Err(semantic(format!("unknown profile {other:?}"))),
        }
    }

    pub fn is_rotational(&self) -> bool {
        self.metric.family == "rotational"
    }

    /// The meridian problem of the `ode` table.
    pub fn meridian_problem(&self) -> Result<MeridianProblem> {
        let o = self
            .rotational
            .as_ref()
            .and_then(|r| r.ode.as_ref())
            .ok_or_else(|| semantic("meridian needs rotational.ode"))?;
        let span = o.t_span.map(|s| (s[0], s[1])).unwrap_or(DEFAULT_T_SPAN);
        let mut p = MeridianProblem::new(o.b, o.r0, o.v0, span);
        p.n = self.metric.dim;
        if let Some(s) = o.samples {
            p.samples = s;
        }
        Ok(p)
    }

    pub fn profile(&self) -> Result<Arc<dyn ProfileCurve>> {
        let tag = self.profile_tag()?;
        let r = self.rotational.as_ref().expect("checked by profile_tag");
        Ok(match tag {
            "cosh" => Arc::new(CoshProfile),
            "circle" => Arc::new(CircleProfile { rho: r.rho.unwrap() }),
            "constant" => Arc::new(ConstantProfile { rho: r.rho.unwrap() }),
            _ => {
                let p = self.meridian_problem()?;
                Arc::new(OdeProfile::new(p.b, p.r0, p.v0, p.t_span, Default::default())?)
            }
        })
    }

    pub fn chart(&self) -> Result<RotationalChart> {
        RotationalChart::new(self.profile()?, self.metric.dim)
    }

    pub fn metric_spec(&self) -> Result<MetricSpec> {
        match self.metric.family.as_str() {
            "flat" => Ok(MetricSpec::flat(self.metric.dim)),
            "sphere" => MetricSpec::sphere(self.metric.dim, self.metric.radius.unwrap_or(1.0)),
            _ => Ok(self.chart()?.spec()),
        }
    }

    pub fn tolerances(&self, spec: &MetricSpec) -> Tolerances {
        let mut t = Tolerances::for_spec(spec);
        let o = &self.analysis.tolerances;
        if let Some(v) = o.relative {
            t.relative = v;
        }
        if let Some(v) = o.locally_symmetric {
            t.locally_symmetric = v;
        }
        if let Some(v) = o.degenerate_gradient {
            t.degenerate_gradient = v;
        }
        if let Some(v) = o.min_cos2 {
            t.min_cos2 = v;
        }
        t
    }

    /// Grid axes, defaulting to three points in `[-0.5, 0.5]` per coordinate
    /// and, on rotational charts, three leaves in the middle of the profile domain.
    pub fn grid_axes(&self) -> Result<Vec<GridAxis>> {
        if let Some(g) = &self.analysis.grid {
            return Ok(g.clone());
        }
        let n = self.metric.dim;
        let mut axes = vec![GridAxis { min: -0.5, max: 0.5, count: 3 }; n];
        if self.is_rotational() {
            let (lo, hi) = self.profile()?.domain();
            let (lo, hi) = (lo.max(-1.0), hi.min(1.0));
            let mid = 0.5 * (lo + hi);
            let half = 0.25 * (hi - lo);
            axes[n - 1] = GridAxis { min: mid - half, max: mid + half, count: 3 };
        }
        Ok(axes)
    }

    /// Grid points in row-major order, last coordinate fastest.
    pub fn grid_points(&self) -> Result<Vec<Vec<f64>>> {
        let values: Vec<Vec<f64>> = self.grid_axes()?.iter().map(GridAxis::values).collect();
        let mut out = vec![Vec::new()];
        for vals in &values {
            out = out
                .into_iter()
                .flat_map(|prefix| {
                    vals.iter().map(move |v| {
                        let mut p = prefix.clone();
                        p.push(*v);
                        p
                    })
                })
                .collect();
        }
        Ok(out)
    }

    pub fn grid_shape(&self) -> Result<Vec<usize>> {
        Ok(self.grid_axes()?.iter().map(|a| a.count).collect())
    }

    pub fn lemma_dims(&self) -> Vec<usize> {
        self.lemma23.n.clone().unwrap_or_else(|| vec![self.metric.dim.clamp(2, 4)])
    }
}
