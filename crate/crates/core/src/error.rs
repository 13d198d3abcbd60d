use num_complex::Complex64;
use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("constant path not admissible")]
    ConstantPath,

    #[error("degenerate subinterval [{0}, {1}]")]
    DegenerateSubinterval(f64, f64),

    #[error("subinterval [{t0}, {t1}] is not contained in the parameter interval [{a}, {b}]")]
    OutsideParameterInterval { t0: f64, t1: f64, a: f64, b: f64 },

    #[error("segment {index} is invalid: {reason}")]
    InvalidSegment { index: usize, reason: String },

    #[error("segments {index} and {next} do not join (gap {gap:e})")]
    Discontinuous { index: usize, next: usize, gap: f64 },

    #[error("quadrature did not converge: best estimate {value} with error estimate {error_estimate:e}")]
    QuadratureNonConvergence {
        value: Complex64,
        error_estimate: f64,
    },

    #[error("denominator is identically zero")]
    ZeroDenominator,

    #[error("pole at evaluation point {0}")]
    PoleAtPoint(Complex64),

    #[error("pole within {distance:e} of the sampled contour near {point}")]
    PoleNearContour { point: Complex64, distance: f64 },

    #[error("pole on X at {0}")]
    PoleOnSet(Complex64),

    #[error("sequence entry {index} is not a positive finite number")]
    NonPositiveEntry { index: usize },

    #[error("insufficient divergence at this order: ratio sum {ratio_sum} must exceed 4e*s = {required}")]
    InsufficientDivergence { ratio_sum: f64, required: f64 },

    #[error("point touches a deleted disk (hole {0})")]
    TouchesHole(usize),

    #[error("hole budget exhausted before resolution {requested}: achieved {achieved}")]
    BudgetExhausted { requested: f64, achieved: f64 },

    #[error("precondition failed: {0}")]
    Precondition(String),

    #[error("verification failed: {0}")]
    Verification(String),

    #[error("malformed input: {0}")]
    Malformed(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl Error {
    pub(crate) fn precondition(msg: impl Into<String>) -> Self {
        Error::Precondition(msg.into())
    }
}

impl From<serde_json::Error> for Error {
    fn from(err: serde_json::Error) -> Self {
        Error::Malformed(err.to_string())
    }
}
