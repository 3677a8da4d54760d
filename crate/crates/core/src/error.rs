use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

/// Every failure the engines can report.
///
/// The CLI prints [`Error::name`] on stderr, so variant names are part of the
/// external interface and should not be renamed casually.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("projective point has no nonzero finite coordinate")]
    InvalidProjectivePoint,
    #[error("function does not change sign on [{lo}, {hi}]")]
    NoBracket { lo: f64, hi: f64 },
    #[error("non-finite value encountered: {0}")]
    NumericOverflow(String),
    #[error("level {level} exceeds the supported maximum {max}")]
    LevelTooLarge { level: usize, max: usize },
    #[error("decimation disagrees with the dense oracle at level {level}: {detail}")]
    DecimationMismatch { level: usize, detail: String },
    #[error("eigenvalue sequence does not converge: {0}")]
    DivergentSequence(String),
    #[error("seed {0} is not a forbidden eigenvalue (1/2, 5/4 or 3/2)")]
    InvalidSeed(f64),
    #[error("alpha = {0} is outside the supported range")]
    UnsupportedAlpha(f64),
    #[error("depth {depth} exceeds the supported maximum {max}")]
    DepthTooLarge { depth: u32, max: u32 },
    #[error("point is an indeterminacy point of the map")]
    IndeterminacyPoint,
    #[error("scan grid too coarse to certify simple roots: {0}")]
    GridTooCoarse(String),
    #[error("insufficient coverage: {0}")]
    CoverageError(String),
    #[error("lambda = {lambda} is not an eigenvalue (terminal ratio {ratio:e})")]
    NotAnEigenvalue { lambda: f64, ratio: f64 },
    #[error("interior block of the quadratic form is singular")]
    SingularInterior,
    #[error("value leaves the affine chart (vanishing denominator)")]
    ProjectiveInfinity,
    #[error("pole encountered at z = {0}")]
    PoleEncountered(String),
    #[error("s = {0} lies outside the convergence region")]
    OutsideConvergenceStrip(String),
    #[error("s = {0} is within tolerance of a pole of the geometric factor")]
    NearPole(String),
    #[error("annulus radii must satisfy r_in < 1 < r_out (got {r_in}, {r_out})")]
    InvalidAnnulus { r_in: f64, r_out: f64 },
    #[error("Re(s) = 0 puts the argument on the unit circle")]
    OnCircleBoundary,
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
}

impl Error {
    /// Stable identifier of the variant.
    pub fn name(&self) -> &'static str {
        match self {
            Error::InvalidProjectivePoint => "InvalidProjectivePoint",
            Error::NoBracket { .. } => "NoBracket",
            Error::NumericOverflow(_) => "NumericOverflow",
            Error::LevelTooLarge { .. } => "LevelTooLarge",
            Error::DecimationMismatch { .. } => "DecimationMismatch",
            Error::DivergentSequence(_) => "DivergentSequence",
            Error::InvalidSeed(_) => "InvalidSeed",
            Error::UnsupportedAlpha(_) => "UnsupportedAlpha",
            Error::DepthTooLarge { .. } => "DepthTooLarge",
            Error::IndeterminacyPoint => "IndeterminacyPoint",
            Error::GridTooCoarse(_) => "GridTooCoarse",
            Error::CoverageError(_) => "CoverageError",
            Error::NotAnEigenvalue { .. } => "NotAnEigenvalue",
            Error::SingularInterior => "SingularInterior",
            Error::ProjectiveInfinity => "ProjectiveInfinity",
            Error::PoleEncountered(_) => "PoleEncountered",
            Error::OutsideConvergenceStrip(_) => "OutsideConvergenceStrip",
            Error::NearPole(_) => "NearPole",
            Error::InvalidAnnulus { .. } => "InvalidAnnulus",
            Error::OnCircleBoundary => "OnCircleBoundary",
            Error::InvalidArgument(_) => "InvalidArgument",
        }
    }
}
