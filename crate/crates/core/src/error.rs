use thiserror::Error;

/// Errors produced by the library.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid metric ({x1}, {x2}, {x3}): all scaling parameters must be finite and > 0")]
    InvalidMetric { x1: f64, x2: f64, x3: f64 },

    #[error("unsupported block dimension d = {0} (expected 2, 4 or 8)")]
    UnsupportedDimension(u32),

    #[error("argument out of domain: {0}")]
    Domain(String),

    #[error("invalid flow options: {0}")]
    InvalidOptions(String),

    #[error("step size underflow at t = {t}: controller asked for h = {h:e}")]
    StepSizeUnderflow { t: f64, h: f64 },

    #[error("no sign change bracketed on [{lo}, {hi}]")]
    NoSignChange { lo: f64, hi: f64 },

    #[error("initial metric is not on the x1 = x2 slice")]
    NotOnEqualPairSlice,

    #[error("invalid grid spec: {0}")]
    InvalidGridSpec(String),

    #[error("numerical failure: {0}")]
    Numerical(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl Error {
    /// True for failures of the numerics rather than of the caller's input.
    pub fn is_numerical(&self) -> bool {
        matches!(
            self,
            Error::StepSizeUnderflow { .. } | Error::NoSignChange { .. } | Error::Numerical(_)
        )
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

pub(crate) fn domain(msg: impl Into<String>) -> Error {
    Error::Domain(msg.into())
}
