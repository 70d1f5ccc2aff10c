use thiserror::Error;

/// Errors produced by the delta-shell toolkit.
#[derive(Error, Debug, Clone, PartialEq)]
pub enum ShellError {
    #[error("dimension out of range: q = {0} (supported: 1, 2, 3)")]
    DimensionOutOfRange(usize),

    #[error("dimension mismatch: expected length {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("spectral parameter on branch cut: z = {0}")]
    OnBranchCut(String),

    #[error("singular point: fundamental solution evaluated at x = 0")]
    SingularPoint,

    #[error("unsupported spectral parameter: Bessel argument {0} has non-positive real part")]
    UnsupportedSpectralParameter(String),

    #[error("normal vector is not unit length: |nu| = {0}")]
    NonUnitNormal(f64),

    #[error("empty gap: mass m = {0} admits no discrete spectrum scan")]
    EmptyGap(f64),

    #[error("pole of resolvent: z = {z} is within {margin:.3e} of an eigenvalue")]
    ResolventPole { z: f64, margin: f64 },

    #[error("degenerate curve parameters: {0}")]
    DegenerateCurve(String),

    #[error("grid size must be even and at least 16, got {0}")]
    BadGridSize(usize),

    #[error("point lies on the curve: use jump relation for on-curve traces")]
    PointOnCurve,

    #[error("evaluation point too close to the curve: distance {dist:.3e} < limit {limit:.3e}")]
    TooCloseToCurve { dist: f64, limit: f64 },

    #[error("sample point too close to the kernel pole: distance {0:.3e}")]
    NearPole(f64),

    #[error("resolvent pole proximity: sigma_min(z) = {0:.3e} is below the safety threshold")]
    ResolventPoleProximity(f64),

    #[error("lapack routine {routine} failed with info = {info}")]
    Lapack { routine: &'static str, info: i32 },

    #[error("curve spec parse error: {0}")]
    CurveParse(String),

    #[error("invalid configuration: {0}")]
    BadConfig(String),
}

pub type Result<T> = std::result::Result<T, ShellError>;
