use std::path::PathBuf;

use crate::lensing::LensingResult;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("invalid argument `{name}`: {reason}")]
    InvalidArgument { name: &'static str, reason: String },

    /// b1*eta*pi/2 sits on a multiple of pi, so the on-axis fringe contrast vanishes.
    #[error("degenerate first-pulse amplitude: sin(b1*eta*pi/2) = {sine:e}")]
    DegenerateAmplitude { sine: f64 },

    #[error("Ramsey fringe amplitude {fringe:e} is below the usable threshold")]
    DegenerateContrast { fringe: f64 },

    #[error("quadrature did not reach tolerance {tolerance:e} (estimated error {estimate:e})")]
    AccuracyNotReached {
        tolerance: f64,
        estimate: f64,
        best: Box<LensingResult>,
    },

    #[error("statistical error {stat_err:e} exceeds the requested bound {bound:e}")]
    StatisticsNotReached { stat_err: f64, bound: f64 },

    #[error("no atoms reach the detection region")]
    NoAtoms,

    #[error("slope {slope:e} is consistent with zero (sigma {sigma:e}); no zero crossing")]
    SlopeDegenerate { slope: f64, sigma: f64 },

    #[error("quadratic coefficient {curvature:e} is consistent with zero (sigma {sigma:e})")]
    VertexUndetermined { curvature: f64, sigma: f64 },

    #[error("amplitude scan contains {found} contrast maxima, at least 2 are needed")]
    InsufficientScan { found: usize },

    #[error("contrast maxima cannot be matched to odd pulse-area multiples: {0}")]
    AmbiguousCalibration(String),

    #[error("density ratio kappa = {0} must exceed 1")]
    InvalidRatio(f64),

    #[error("singular normal equations")]
    Singular,

    #[error("config key `{key}`: {reason}")]
    Config { key: String, reason: String },

    #[error("{path}:{line}: {msg}")]
    Parse {
        path: PathBuf,
        line: usize,
        msg: String,
    },

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl Error {
    pub(crate) fn invalid(name: &'static str, reason: impl Into<String>) -> Self {
        Error::InvalidArgument {
            name,
            reason: reason.into(),
        }
    }

    pub(crate) fn parse(path: impl Into<PathBuf>, line: usize, msg: impl Into<String>) -> Self {
        Error::Parse {
            path: path.into(),
            line,
            msg: msg.into(),
        }
    }
}
