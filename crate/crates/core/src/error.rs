use num_complex::Complex64;
use thiserror::Error;

use crate::continuum::SampledCurve;
use crate::dynamics::Sign;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("NaN component in point ({re}, {im})")]
    NanComponent { re: f64, im: f64 },

    #[error("empty point set")]
    EmptyPointSet,

    #[error("euclidean metric requires finite points; point {index} is infinity")]
    InfiniteInEuclidean { index: usize },

    #[error("epsilon must be positive and finite, got {0}")]
    InvalidEpsilon(f64),

    #[error("asymptotic value has no preimage under this branch")]
    AsymptoticValue,

    #[error("point {w} is outside the closed {sign} half-plane")]
    WrongHalfPlane { sign: Sign, w: Complex64 },

    #[error("branch-cut point {w}")]
    BranchCut { w: Complex64 },

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("refinement budget exceeded ({samples} samples) while building generation {}", partial.generation)]
    RefinementBudget {
        samples: usize,
        partial: Box<SampledCurve>,
    },

    #[error("ray depth insufficient at t = {t}: convergence gap {gap:e} exceeds tolerance {tol:e} (depth {depth})")]
    RayDepthInsufficient {
        t: f64,
        gap: f64,
        tol: f64,
        depth: usize,
    },

    #[error("parse error at line {line}: {message}")]
    Parse { line: usize, message: String },

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),

    #[error(transparent)]
    Image(#[from] image::ImageError),
}

impl Error {
    pub(crate) fn parse(line: usize, message: impl Into<String>) -> Self {
        Error::Parse {
            line,
            message: message.into(),
        }
    }

    pub(crate) fn invalid(message: impl Into<String>) -> Self {
        Error::InvalidParameter(message.into())
    }
}
