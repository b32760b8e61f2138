//! Command-line front end: `relcurv <command> --config <path> [--seed N] [--out <path>]`.
//!
//! Exit codes: 0 success, 1 verification failure, 2 configuration error,
//! 3 numerical failure. Failures print one `ERROR:<code>:<kind>: <message>`
//! line on stderr.

mod config;
mod output;

pub use config::{
    parse_config, AnalysisSection, GridAxis, MetricSection, OdeSection, OutputSection, RotationalSection,
    RunConfig, ToleranceOverrides, VerifySection, DEFAULT_PLANES, DEFAULT_SEED, DEFAULT_T_SPAN,
};
pub use output::{revolve, write_csv, write_csv_to, write_obj, write_obj_to, Cell, Mesh, Table};

use std::ffi::OsString;
use std::path::{Path, PathBuf};

use clap::{Parser, ValueEnum};
use rayon::prelude::*;

use crate::directed::{directedness_report_with, locally_symmetric_test, DirectedReport, Tolerances};
use crate::distribution::{leaf_gauss_check, umbilicity_residual, UnitField};
use crate::error::{Error, Result};
use crate::metric::{ChartPoint, MetricSpec};
use crate::rotational::{
    curvature_identity_check, meridian_ode, nabla_r_analytic, profile_consistency, RotationalChart,
};
use crate::tensorcalc::{lemma23_rank_check, riemann_residuals, symmetry_residuals, CurvatureBundle};

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Command {
    /// Directedness report over the configured grid.
    Analyze,
    /// Meridian of the configured `ode` profile.
    Meridian,
    /// Invariant suite over the grid; nonzero exit on any failure.
    Verify,
    /// Null-space dimensions of the symmetric-space constraint system.
    Lemma23,
    /// OBJ surface of revolution for a two-dimensional profile.
    ExportMesh,
}

#[derive(Debug, Parser)]
#[command(name = "relcurv", version, about = "Relative sectional curvature of Riemannian charts")]
struct Args {
    #[arg(value_enum)]
    command: Command,
    #[arg(long)]
    config: PathBuf,
    /// Overrides `analysis.seed`.
    #[arg(long)]
    seed: Option<u64>,
    /// Output path; stdout when absent or `-`.
    #[arg(long)]
    out: Option<PathBuf>,
}

/// Result of a command that ran to completion.
#[derive(Debug, Clone, PartialEq)]
pub struct Outcome {
    pub passed: bool,
    pub table: Option<Table>,
}

pub const EXIT_OK: i32 = 0;
pub const EXIT_VERIFY: i32 = 1;
pub const EXIT_CONFIG: i32 = 2;
pub const EXIT_NUMERIC: i32 = 3;

pub fn exit_code(e: &Error) -> i32 {
    match e {
        Error::ConfigSyntax { .. } | Error::ConfigSemantic(_) | Error::Io(_) | Error::InvalidArgument(_) => EXIT_CONFIG,
        Error::PropertyViolation(_) | Error::SymmetryViolation { .. } | Error::HypothesisViolated(_) => EXIT_VERIFY,
        _ => EXIT_NUMERIC,
    }
}

pub fn error_kind(e: &Error) -> &'static str {
    match e {
        Error::OutOfDomain { .. } => "out-of-domain",
        Error::DegenerateMetric { .. } => "degenerate-metric",
        Error::JetOrderInsufficient { .. } => "jet-order",
        Error::SymmetryViolation { .. } => "symmetry-violation",
        Error::NotUnit { .. } => "not-unit",
        Error::RankTolerance { .. } => "rank-tolerance",
        Error::DegenerateScalarGradient { .. } => "degenerate-gradient",
        Error::PlaneInsideDistribution { .. } => "plane-inside-distribution",
        Error::LocallySymmetric { .. } => "locally-symmetric",
        Error::ProfileDomain { .. } => "profile-domain",
        Error::ConstantCurvatureDegeneracy { .. } => "constant-curvature",
        Error::RadiusCollapse { .. } => "radius-collapse",
        Error::StepFailure { .. } => "step-failure",
        Error::DomainExit { .. } => "domain-exit",
        Error::DomainViolation(_) => "domain-violation",
        Error::QuadratureFailure { .. } => "quadrature-failure",
        Error::ModulusOutOfRange(_) => "modulus-out-of-range",
        Error::DiscriminantNegative(_) => "discriminant-negative",
        Error::FieldNotEvaluable(_) => "field-not-evaluable",
        Error::HypothesisViolated(_) => "hypothesis-violated",
        Error::NearSingularFit { .. } => "near-singular-fit",
        Error::PropertyViolation(_) => "property-violation",
        Error::InvalidArgument(_) => "invalid-argument",
        Error::ConfigSyntax { .. } => "config-syntax",
        Error::ConfigSemantic(_) => "config-semantic",
        Error::Io(_) => "io",
    }
}

/// One-line diagnostic for `e`.
pub fn error_line(e: &Error) -> String {
    let msg = e.to_string().replace('\n', " ");
    format!("ERROR:{}:{}: {}", exit_code(e), error_kind(e), msg)
}

/// Parses arguments, runs the command and returns the process exit code.
pub fn run_from_args<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let args = match Args::try_parse_from(args) {
        Ok(a) => a,
        Err(e) => {
            use clap::error::ErrorKind;
            if matches!(e.kind(), ErrorKind::DisplayHelp | ErrorKind::DisplayVersion) {
                print!("{e}");
                return EXIT_OK;
            }
            eprint!("{e}");
            eprintln!("ERROR:{EXIT_CONFIG}:usage: invalid command line");
            return EXIT_CONFIG;
        }
    };
    let result = load(&args.config, args.seed)
        .and_then(|cfg| run_command(&cfg, args.command, args.out.as_deref().or(cfg.output.path.as_deref().map(Path::new))));
    match result {
        Ok(o) if o.passed => EXIT_OK,
        Ok(_) => {
            eprintln!("ERROR:{EXIT_VERIFY}:verification-failed: one or more checks failed");
            EXIT_VERIFY
        }
        Err(e) => {
            eprintln!("{}", error_line(&e));
            exit_code(&e)
        }
    }
}

fn load(path: &Path, seed: Option<u64>) -> Result<RunConfig> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| Error::Io(format!("cannot read config {}: {e}", path.display())))?;
    let mut cfg = parse_config(&text)?;
    if let Some(s) = seed {
        cfg.analysis.seed = s;
    }
    Ok(cfg)
}

/// Runs `command` and writes its table to `out` (stdout when `None`).
pub fn run_command(cfg: &RunConfig, command: Command, out: Option<&Path>) -> Result<Outcome> {
    let precision = cfg.output.precision;
    if command == Command::ExportMesh {
        let mesh = build_mesh(cfg)?;
        write_obj_to(&mesh, precision, out)?;
        return Ok(Outcome { passed: true, table: None });
    }
    let outcome = execute(cfg, command)?;
    if let Some(t) = &outcome.table {
        write_csv_to(t, precision, out)?;
    }
    Ok(outcome)
}

/// Runs a table-producing command without writing anything.
pub fn execute(cfg: &RunConfig, command: Command) -> Result<Outcome> {
    match command {
        Command::Analyze => analyze(cfg).map(|t| Outcome { passed: true, table: Some(t) }),
        Command::Meridian => meridian(cfg).map(|t| Outcome { passed: true, table: Some(t) }),
        Command::Verify => verify(cfg),
        Command::Lemma23 => lemma23(cfg),
        Command::ExportMesh => Err(Error::InvalidArgument("export-mesh writes OBJ, not a table".into())),
    }
}

fn point_seed(seed: u64, index: usize) -> u64 {
    seed.wrapping_add((index as u64).wrapping_mul(0x9e37_79b9_7f4a_7c15))
}

fn is_domain_error(e: &Error) -> bool {
    matches!(e, Error::OutOfDomain { .. } | Error::ProfileDomain { .. })
}

/// Grid points inside the chart domain, with their grid index.
fn domain_points(cfg: &RunConfig, spec: &MetricSpec) -> Result<Vec<(usize, ChartPoint)>> {
    let mut kept = Vec::new();
    let mut skipped = 0usize;
    for (i, c) in cfg.grid_points()?.into_iter().enumerate() {
        let p = ChartPoint::new(c)?;
        match spec.field().check_domain(p.coords()) {
            Ok(()) => kept.push((i, p)),
            Err(e) if is_domain_error(&e) => skipped += 1,
            Err(e) => return Err(e),
        }
    }
    if skipped > 0 {
        log::warn!("skipped {skipped} grid points outside the chart domain");
    }
    Ok(kept)
}

const REPORT_FLAGS: [&str; 3] = ["locally_symmetric", "directed", "pointwise_constant"];

fn analyze(cfg: &RunConfig) -> Result<Table> {
    let spec = cfg.metric_spec()?;
    let tol = cfg.tolerances(&spec);
    let points = domain_points(cfg, &spec)?;
    let seed = cfg.analysis.seed;
    let planes = cfg.analysis.planes_per_point;
    let reports: Vec<DirectedReport> = points
        .par_iter()
        .map(|(i, p)| directedness_report_with(p, &spec, planes, point_seed(seed, *i), &tol))
        .collect::<Result<_>>()?;

    let n = spec.dim();
    let jumps = eta_jumps(cfg, &points, &reports)?;
    let mut header: Vec<String> = (0..n).map(|i| format!("x{i}")).collect();
    header.extend(
        [
            "tau",
            "dtau_norm",
            "k_fit",
            "k_from_dtau",
            "residual_collinearity",
            "residual_delta_planes",
            "residual_model",
            "k_spread",
            "eta_jump",
        ]
        .iter()
        .chain(REPORT_FLAGS.iter())
        .map(|s| s.to_string()),
    );
    let mut table = Table { header, rows: Vec::with_capacity(points.len()) };
    for (((_, p), r), jump) in points.iter().zip(&reports).zip(jumps) {
        let mut row: Vec<Cell> = p.coords().iter().map(|&v| Cell::Num(v)).collect();
        row.extend([
            r.tau.into(),
            r.dtau_norm.into(),
            r.k_fit.into(),
            r.k_from_dtau.into(),
            r.residual_collinearity.into(),
            r.residual_delta_planes.into(),
            r.residual_model.into(),
            r.k_spread.into(),
            jump.into(),
            r.locally_symmetric.into(),
            r.directed.into(),
            r.pointwise_constant.into(),
        ]);
        table.rows.push(row);
    }
    Ok(table)
}

/// Max componentwise change of `eta` to the previous grid neighbour along
/// each axis, a continuity check on the pointwise choice of `eta`.
fn eta_jumps(cfg: &RunConfig, points: &[(usize, ChartPoint)], reports: &[DirectedReport]) -> Result<Vec<Option<f64>>> {
    let shape = cfg.grid_shape()?;
    let mut strides = vec![1usize; shape.len()];
    for k in (0..shape.len().saturating_sub(1)).rev() {
        strides[k] = strides[k + 1] * shape[k + 1];
    }
    let by_index: std::collections::HashMap<usize, usize> =
        points.iter().enumerate().map(|(pos, (i, _))| (*i, pos)).collect();
    Ok(points
        .iter()
        .zip(reports)
        .map(|((i, _), r)| {
            let eta = r.eta.as_ref()?;
            let mut worst: Option<f64> = None;
            for (k, &s) in strides.iter().enumerate() {
                if (i / s) % shape[k] == 0 {
                    continue;
                }
                let Some(&pos) = by_index.get(&(i - s)) else { continue };
                if let Some(other) = &reports[pos].eta {
                    let d = eta.max_diff(other);
                    worst = Some(worst.map_or(d, |w: f64| w.max(d)));
                }
            }
            worst
        })
        .collect())
}

fn meridian(cfg: &RunConfig) -> Result<Table> {
    let sol = meridian_ode(&cfg.meridian_problem()?)?;
    let mut t = Table::new(&["t", "r", "r_prime", "a", "b", "lambda", "tau", "k"]);
    for s in &sol.samples {
        t.rows.push(
            [s.t, s.r, s.r_prime, s.a, s.b, s.lambda, s.tau, s.k]
                .into_iter()
                .map(Cell::Num)
                .collect(),
        );
    }
    Ok(t)
}

fn lemma23(cfg: &RunConfig) -> Result<Outcome> {
    let mut t = Table::new(&["n", "dim_sym", "dim_constrained", "gap_sym", "gap_constrained"]);
    let mut passed = true;
    for n in cfg.lemma_dims() {
        let r = lemma23_rank_check(n)?;
        passed &= r.dim_constrained == 0;
        t.rows.push(vec![
            n.into(),
            r.dim_sym.into(),
            r.dim_constrained.into(),
            r.gap_sym.into(),
            r.gap_constrained.into(),
        ]);
    }
    Ok(Outcome { passed, table: Some(t) })
}

fn build_mesh(cfg: &RunConfig) -> Result<Mesh> {
    if !cfg.is_rotational() || cfg.metric.dim != 2 {
        return Err(Error::ConfigSemantic(
            "export-mesh needs family = \"rotational\" with dim = 2".into(),
        ));
    }
    let profile = cfg.profile()?;
    let range = match cfg.output.mesh_t_range {
        Some([a, b]) => (a, b),
        None => {
            let (lo, hi) = profile.domain();
            let (lo, hi) = (lo.max(-1.0), hi.min(1.0));
            let inset = 0.01 * (hi - lo);
            (lo + inset, hi - inset)
        }
    };
    revolve(profile.as_ref(), range, cfg.output.mesh_angular, cfg.output.mesh_axial)
}

/// Absolute bound on identity residuals of analytic jets.
pub const IDENTITY_TOLERANCE: f64 = 1e-9;
const FD_IDENTITY_TOLERANCE: f64 = 1e-6;
pub const ROTATIONAL_TOLERANCE: f64 = 1e-6;
pub const UMBILIC_TOLERANCE: f64 = 1e-8;
pub const K_AGREEMENT_TOLERANCE: f64 = 1e-6;

struct Check {
    point: Option<usize>,
    name: &'static str,
    value: f64,
    tolerance: f64,
    passed: bool,
}

impl Check {
    fn below(point: Option<usize>, name: &'static str, value: f64, tolerance: f64) -> Self {
        Self { point, name, value, tolerance, passed: value < tolerance }
    }

    fn expect(point: usize, name: &'static str, actual: bool, expected: Option<bool>) -> Option<Self> {
        expected.map(|e| Self {
            point: Some(point),
            name,
            value: if actual { 1.0 } else { 0.0 },
            tolerance: if e { 1.0 } else { 0.0 },
            passed: actual == e,
        })
    }
}

fn point_checks(
    cfg: &RunConfig,
    spec: &MetricSpec,
    chart: Option<&RotationalChart>,
    tol: &Tolerances,
    i: usize,
    p: &ChartPoint,
) -> Result<Vec<Check>> {
    let id_tol = if spec.is_analytic() { IDENTITY_TOLERANCE } else { FD_IDENTITY_TOLERANCE };
    let at = Some(i);
    let mut out = Vec::new();
    let bundle = match CurvatureBundle::at(spec, p) {
        Ok(b) => b,
        Err(Error::SymmetryViolation { residual, tolerance, .. }) => {
            out.push(Check { point: at, name: "bianchi_dtau", value: residual, tolerance, passed: false });
            return Ok(out);
        }
        Err(e) => return Err(e),
    };
    out.push(Check::below(at, "riemann_identities", riemann_residuals(&bundle.riem).max(), id_tol));
    out.push(Check::below(at, "nabla_identities", symmetry_residuals(&bundle.nabla_riem).max(), id_tol));

    let report = directedness_report_with(p, spec, cfg.analysis.planes_per_point, point_seed(cfg.analysis.seed, i), tol)?;
    out.push(Check {
        point: at,
        name: "locally_symmetric",
        value: report.nabla_norm,
        tolerance: tol.locally_symmetric,
        passed: match locally_symmetric_test(p, spec) {
            Ok(_) => true,
            Err(Error::PropertyViolation(_)) => false,
            Err(e) => return Err(e),
        },
    });
    out.push(Check {
        point: at,
        name: "directed",
        value: report.residual_collinearity.max(report.residual_delta_planes),
        tolerance: tol.relative,
        passed: report.directed,
    });
    if report.pointwise_constant && !report.locally_symmetric {
        let k = report.k_fit.unwrap_or(f64::NAN);
        out.push(Check::below(at, "k_matches_dtau", (k - report.k_from_dtau).abs(), K_AGREEMENT_TOLERANCE));
    }
    let v = &cfg.verify;
    out.extend(Check::expect(i, "expect_locally_symmetric", report.locally_symmetric, v.expect_locally_symmetric));
    out.extend(Check::expect(i, "expect_directed", report.directed, v.expect_directed));
    out.extend(Check::expect(i, "expect_pointwise_constant", report.pointwise_constant, v.expect_pointwise_constant));

    if let Some(c) = chart {
        let t = c.t_of(p);
        out.push(Check::below(at, "profile_consistency", profile_consistency(c.profile().as_ref(), t)?, ROTATIONAL_TOLERANCE));
        out.push(Check::below(at, "curvature_decomposition", curvature_identity_check(c, p)?, ROTATIONAL_TOLERANCE));
        let nabla = nabla_r_analytic(c, p)?;
        out.push(Check::below(at, "nabla_closed_form", nabla.max_diff(&bundle.nabla_riem), ROTATIONAL_TOLERANCE));
        let u = umbilicity_residual(&UnitField::axial(c), p, spec)?;
        out.push(Check::below(at, "umbilicity", u.residual_eq24, UMBILIC_TOLERANCE));
        out.push(Check::below(at, "involutivity", u.residual_involutive, 10.0 * UMBILIC_TOLERANCE));
        if spec.dim() >= 3 {
            out.push(Check::below(at, "gauss_closure", leaf_gauss_check(c.profile().clone(), spec.dim(), t)?, UMBILIC_TOLERANCE));
        }
    }
    Ok(out)
}

fn verify(cfg: &RunConfig) -> Result<Outcome> {
    let spec = cfg.metric_spec()?;
    let tol = cfg.tolerances(&spec);
    let chart = if cfg.is_rotational() { Some(cfg.chart()?) } else { None };
    let points = domain_points(cfg, &spec)?;
    let per_point: Vec<Vec<Check>> = points
        .par_iter()
        .map(|(i, p)| point_checks(cfg, &spec, chart.as_ref(), &tol, *i, p))
        .collect::<Result<_>>()?;
    let mut checks: Vec<Check> = per_point.into_iter().flatten().collect();

    if cfg.rotational.as_ref().is_some_and(|r| r.ode.is_some()) && cfg.is_rotational() {
        let sol = meridian_ode(&cfg.meridian_problem()?)?;
        checks.push(Check::below(None, "meridian_a_spread", sol.a_spread, ROTATIONAL_TOLERANCE));
    }
    for n in cfg.lemma_dims() {
        let r = lemma23_rank_check(n)?;
        checks.push(Check {
            point: None,
            name: "lemma23_dim_constrained",
            value: r.dim_constrained as f64,
            tolerance: 0.0,
            passed: r.dim_constrained == 0,
        });
    }

    let mut t = Table::new(&["point", "check", "value", "tolerance", "passed"]);
    for c in &checks {
        t.rows.push(vec![
            c.point.map_or(Cell::Empty, Cell::from),
            Cell::Text(c.name.into()),
            c.value.into(),
            c.tolerance.into(),
            c.passed.into(),
        ]);
    }
    let failed = checks.iter().filter(|c| !c.passed).count();
    log::info!("verify: {} checks, {failed} failed", checks.len());
    Ok(Outcome { passed: failed == 0, table: Some(t) })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cfg(text: &str) -> RunConfig {
        parse_config(text).unwrap()
    }

    #[test]
    fn sphere_verify_passes_and_is_locally_symmetric() {
        let c = cfg("[metric]\nfamily = \"sphere\"\ndim = 3\nradius = 1.0\n[verify]\nexpect_locally_symmetric = true\n");
        let o = execute(&c, Command::Verify).unwrap();
        assert!(o.passed);
        let t = o.table.unwrap();
        assert!(t.rows.iter().any(|r| r[1] == Cell::Text("expect_locally_symmetric".into())));
    }

    #[test]
    fn cosh_analyze_flags() {
        let c = cfg("[metric]\nfamily = \"rotational\"\ndim = 3\n[rotational]\nprofile = \"cosh\"\n");
        let t = analyze(&c).unwrap();
        let col = |name: &str| t.header.iter().position(|h| h == name).unwrap();
        // the waist t = 0 is a critical point of the even profile, where nabla R vanishes
        for row in t.rows.iter().filter(|r| r[col("locally_symmetric")] == Cell::Bool(false)) {
            assert_eq!(row[col("directed")], Cell::Bool(true));
            assert_eq!(row[col("pointwise_constant")], Cell::Bool(false));
            assert!(matches!(row[col("eta_jump")], Cell::Empty | Cell::Num(_)));
        }
    }

    #[test]
    fn circle_meridian_satisfies_circle_equation() {
        let rho: f64 = 1.5;
        let c = cfg(&format!(
            "[metric]\nfamily = \"rotational\"\ndim = 3\n[rotational]\node = {{B = {}, r0 = {rho}, v0 = 0.0, t_span = [-1.0, 1.0]}}\n",
            1.0 / (rho * rho)
        ));
        let t = meridian(&c).unwrap();
        for row in &t.rows {
            let (Cell::Num(tt), Cell::Num(r)) = (&row[0], &row[1]) else { panic!() };
            assert!((tt * tt + r * r - rho * rho).abs() < 1e-6);
        }
    }

    #[test]
    fn failing_expectation() {
        let c = cfg("[metric]\nfamily = \"rotational\"\ndim = 3\n[rotational]\nprofile = \"cosh\"\n[verify]\nexpect_pointwise_constant = true\n[lemma23]\nn = [2]\n");
        assert!(!execute(&c, Command::Verify).unwrap().passed);
    }

    #[test]
    fn exit_codes() {
        assert_eq!(exit_code(&Error::ConfigSemantic("x".into())), 2);
        assert_eq!(exit_code(&Error::RadiusCollapse { t: 0.0, r: 0.0 }), 3);
        assert!(error_line(&Error::StepFailure { t: 1.0, h: 1e-13 }).starts_with("ERROR:3:step-failure: "));
    }

    #[test]
    fn mesh_requires_surface() {
        let c = cfg("[metric]\nfamily = \"rotational\"\ndim = 3\n[rotational]\nprofile = \"cosh\"\n");
        assert!(matches!(build_mesh(&c), Err(Error::ConfigSemantic(_))));
    }
}
