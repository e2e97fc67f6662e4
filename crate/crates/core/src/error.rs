//! Error type shared by every module.

use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension mismatch in {context}: expected {expected}, found {found}")]
    DimensionMismatch {
        context: String,
        expected: usize,
        found: usize,
    },
    #[error("pole of {node} node at argument {value:e}")]
    Pole { node: &'static str, value: f64 },
    #[error("map is not polynomial: contains a {0} node")]
    NonPolynomial(&'static str),
    #[error("jet order {order} exceeds the cap {cap}")]
    OrderTooHigh { order: usize, cap: usize },
    #[error("malformed map expression: {0}")]
    InvalidMap(String),
    #[error("invalid input: {0}")]
    InvalidInput(String),
    #[error("degenerate geometry: {0}")]
    Degenerate(String),
    #[error("rejection sampling budget exhausted: {accepted} accepted out of {attempts} attempts")]
    RejectionBudget { accepted: usize, attempts: usize },
    #[error("unsupported operation: {0}")]
    Unsupported(String),
    #[error("ill-conditioned system: residual {residual:e}")]
    IllConditioned { residual: f64 },
    #[error("degree cap {cap} reached without meeting the fit contract ({reason})")]
    DegreeCap { cap: usize, reason: String },
    #[error("no admissible w: {0}")]
    InfeasibleW(String),
    #[error("no admissible delta: sign conditions fail down to {0:e}")]
    NoDelta(f64),
    #[error("loop sample {index} lies within {distance:e} of the center")]
    CenterHit { index: usize, distance: f64 },
    #[error("angular step {step} at sample {index} is not below pi/2")]
    StepTooLarge { index: usize, step: f64 },
    #[error("winding sum is not near an integer (residual {0})")]
    WindingResidual(f64),
    #[error("retraction undefined at its center")]
    AtCenter,
    #[error("connectivity: {0}")]
    Connectivity(String),
    #[error("separation failed: {0}")]
    Separation(String),
    #[error("precondition violated: {0}")]
    Precondition(String),
    #[error("linear program: {0}")]
    Lp(String),
    #[error("json: {0}")]
    Json(#[from] serde_json::Error),
    #[error("io: {0}")]
    Io(#[from] std::io::Error),
}

impl Error {
    pub(crate) fn dim(context: impl Into<String>, expected: usize, found: usize) -> Self {
        Error::DimensionMismatch {
            context: context.into(),
            expected,
            found,
        }
    }

    /// True for failures of the numerical machinery itself, as opposed to
    /// malformed input.
    pub fn is_numeric(&self) -> bool {
        matches!(
            self,
            Error::Pole { .. }
                | Error::IllConditioned { .. }
                | Error::DegreeCap { .. }
                | Error::InfeasibleW(_)
                | Error::NoDelta(_)
                | Error::CenterHit { .. }
                | Error::StepTooLarge { .. }
                | Error::WindingResidual(_)
                | Error::AtCenter
                | Error::Separation(_)
                | Error::Degenerate(_)
                | Error::RejectionBudget { .. }
                | Error::Lp(_)
                | Error::Connectivity(_)
        )
    }
}
