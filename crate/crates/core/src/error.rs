use thiserror::Error;

/// Errors shared across the crate.
#[derive(Debug, Error)]
pub enum Error {
    /// Input outside the domain of an operation (e.g. `t <= 0` for a lifetime).
    #[error("domain error: {0}")]
    Domain(String),

    /// Root bracketing failed: no sign change on the supplied interval.
    #[error("bracket error: {0}")]
    Bracket(String),

    /// Adaptive quadrature exhausted its refinement budget. Carries the best
    /// estimate and its error bound so callers can decide what to do with it.
    #[error("quadrature did not converge: estimate {estimate}, error bound {error}")]
    Quadrature { estimate: f64, error: f64 },

    /// The minimizer could not make progress (non-finite objective, failed
    /// line search).
    #[error("optimization error: {0}")]
    Optimization(String),

    /// A model fit failed end to end.
    #[error("fit error: {0}")]
    Fit(String),

    /// A quantity overflowed or underflowed past the point of being usable
    /// (e.g. hazard rate where the survival function has underflowed).
    #[error("overflow error: {0}")]
    Overflow(String),

    /// Observed information matrix is singular; standard errors unavailable.
    #[error("singular information matrix")]
    SingularInformation,

    /// Invalid parameters or malformed request.
    #[error("invalid input: {0}")]
    Invalid(String),

    /// Dataset or scenario ingestion failure, with per-line detail.
    #[error("parse error at line {line}: {message}")]
    Parse { line: usize, message: String },

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    /// CLI exit code classification: 2 for input problems, 3 for numerical
    /// failures.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Domain(_) | Error::Invalid(_) | Error::Parse { .. } | Error::Io(_) => 2,
            _ => 3,
        }
    }
}
