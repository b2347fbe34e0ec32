use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid input: {0}")]
    InvalidInput(String),

    /// The geometry shrank below the extinction scale; not an input defect.
    #[error("geometry has collapsed below the extinction scale")]
    Extinct,

    #[error("timestep {dt:e} exceeds the stability bound {limit:e}")]
    TimestepTooLarge { dt: f64, limit: f64 },

    #[error("fit failed: {0}")]
    FitFailure(String),

    #[error("degenerate geometry: {0}")]
    Degenerate(String),

    #[error("numerical breakdown at t = {time}: {reason}")]
    NumericalBreakdown { time: f64, reason: String },

    #[error("t = {t} is at or beyond the extinction time {lifetime}")]
    PastExtinction { t: f64, lifetime: f64 },

    #[error("line {line}: {msg}")]
    Parse { line: usize, msg: String },

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl Error {
    pub(crate) fn invalid(msg: impl Into<String>) -> Self {
        Error::InvalidInput(msg.into())
    }
}
