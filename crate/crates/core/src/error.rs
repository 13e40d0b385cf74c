use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

/// Every failure the library can report. [`Error::name`] gives the stable
/// identifier printed by the CLI.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("matrix is not Hermitian (max asymmetry {asymmetry:e})")]
    NotHermitian { asymmetry: f64 },

    #[error("matrix dimension {0} unsupported (expected 2 or 3)")]
    UnsupportedDimension(usize),

    #[error("panel count {0} too small (need n >= 8)")]
    InvalidPanelCount(usize),

    #[error("target {target:e} is not bracketed by g(lo) = {g_lo:e}, g(hi) = {g_hi:e}")]
    NoBracket { target: f64, g_lo: f64, g_hi: f64 },

    #[error("no convergence after {iterations} iterations (residual {residual:e})")]
    NoConvergence { iterations: usize, residual: f64 },

    #[error("bad input: {0}")]
    BadInput(String),

    #[error("invalid model parameter: {0}")]
    InvalidModel(String),

    #[error("Berry phase undefined at the level crossing Rc = r = 0")]
    DegeneratePoint,

    #[error("closed form requires fixed theta and phi along the loop")]
    UnsupportedLoop,

    #[error("spectral gap {gap:e} below tolerance {gap_tol:e} at t = {t}")]
    GapCollapse { t: f64, gap: f64, gap_tol: f64 },

    #[error(
        "phase changed by {change:e} when doubling points from {points} (tolerance {phase_tol:e})"
    )]
    InsufficientResolution {
        points: usize,
        change: f64,
        phase_tol: f64,
    },

    #[error("Gram-Schmidt failed to complete an orthonormal frame")]
    FrameDegeneracy,

    #[error("predicted broadening {0:e} underflows")]
    PredictionUnderflow(f64),
}

impl Error {
    pub fn name(&self) -> &'static str {
        match self {
            Error::NotHermitian { .. } => "NotHermitian",
            Error::UnsupportedDimension(_) => "UnsupportedDimension",
            Error::InvalidPanelCount(_) => "InvalidPanelCount",
            Error::NoBracket { .. } => "NoBracket",
            Error::NoConvergence { .. } => "NoConvergence",
            Error::BadInput(_) => "BadInput",
            Error::InvalidModel(_) => "InvalidModel",
            Error::DegeneratePoint => "DegeneratePoint",
            Error::UnsupportedLoop => "UnsupportedLoop",
            Error::GapCollapse { .. } => "GapCollapse",
            Error::InsufficientResolution { .. } => "InsufficientResolution",
            Error::FrameDegeneracy => "FrameDegeneracy",
            Error::PredictionUnderflow(_) => "PredictionUnderflow",
        }
    }

    /// Failures of a numerical procedure on otherwise valid input.
    pub fn is_numerical(&self) -> bool {
        matches!(
            self,
            Error::GapCollapse { .. }
                | Error::NoConvergence { .. }
                | Error::InsufficientResolution { .. }
                | Error::NoBracket { .. }
                | Error::DegeneratePoint
                | Error::FrameDegeneracy
                | Error::PredictionUnderflow(_)
                | Error::NotHermitian { .. }
        )
    }
}
