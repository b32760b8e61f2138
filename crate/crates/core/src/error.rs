use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("point {coords:?} is outside the chart domain: {reason}")]
    OutOfDomain { coords: Vec<f64>, reason: String },

    #[error("metric is degenerate (smallest eigenvalue {min_eigenvalue:e})")]
    DegenerateMetric { min_eigenvalue: f64 },

    #[error("jet of order {available} is insufficient, order {required} required")]
    JetOrderInsufficient { available: usize, required: usize },

    #[error("tensor fails the {identity} identity (residual {residual:e} > {tolerance:e})")]
    SymmetryViolation {
        identity: &'static str,
        residual: f64,
        tolerance: f64,
    },

    #[error("one-form is not unit (norm {norm})")]
    NotUnit { norm: f64 },

    #[error("ambiguous numerical rank: singular value gap {gap:e}")]
    RankTolerance { gap: f64 },

    #[error("scalar curvature gradient vanishes (|dtau| = {norm:e})")]
    DegenerateScalarGradient { norm: f64 },

    #[error("2-plane lies inside the distribution (|eta|_E| = {norm:e})")]
    PlaneInsideDistribution { norm: f64 },

    #[error("covariant derivative of curvature vanishes (|nabla R| = {norm:e})")]
    LocallySymmetric { norm: f64 },

    #[error("t = {t} is outside the profile domain [{lo}, {hi}]")]
    ProfileDomain { t: f64, lo: f64, hi: f64 },

    #[error("coefficient b vanishes ({b:e}); lambda = xi(a)/(2b) is undefined")]
    ConstantCurvatureDegeneracy { b: f64 },

    #[error("meridian radius collapsed to {r:e} at t = {t}")]
    RadiusCollapse { t: f64, r: f64 },

    #[error("integrator step {h:e} fell below the minimum at t = {t}")]
    StepFailure { t: f64, h: f64 },

    #[error("solution left the admissible domain at t = {t}: {reason}")]
    DomainExit { t: f64, reason: String },

    #[error("domain constraint violated: {0}")]
    DomainViolation(String),

    #[error("quadrature did not converge (estimated error {error:e})")]
    QuadratureFailure { error: f64 },

    #[error("elliptic modulus {0} is outside [0, 1)")]
    ModulusOutOfRange(f64),

    #[error("discriminant B^2 + 4A = {0} is negative")]
    DiscriminantNegative(f64),

    #[error("unit field cannot be evaluated: {0}")]
    FieldNotEvaluable(String),

    #[error("hypothesis violated: {0}")]
    HypothesisViolated(String),

    #[error("fit is singular at t = {t} (|tau - nB| = {gap:e})")]
    NearSingularFit { t: f64, gap: f64 },

    #[error("property violated: {0}")]
    PropertyViolation(String),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("config syntax error at line {line}: {message}")]
    ConfigSyntax { line: usize, message: String },

    #[error("config error: {0}")]
    ConfigSemantic(String),

    #[error("i/o failure: {0}")]
    Io(String),
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

impl From<csv::Error> for Error {
    fn from(e: csv::Error) -> Self {
        Error::Io(e.to_string())
    }
}
