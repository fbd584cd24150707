use thiserror::Error;

/// Errors produced by the spectral and evolution layers.
#[derive(Error, Debug)]
pub enum CoreError {
    /// A field was passed in the wrong representation (physical vs Fourier)
    /// to an operation that does not auto-convert.
    #[error("representation mismatch: expected {expected}, got {got}")]
    Representation { expected: &'static str, got: &'static str },

    /// Two fields live on incompatible grids.
    #[error("grid mismatch: {0}")]
    GridMismatch(String),

    /// A multiplier is singular on an occupied lattice mode and no zero-mode
    /// policy was supplied.
    #[error("singular multiplier at an occupied mode: {0}")]
    SingularMultiplier(String),

    /// An input violated a constraint (nonzero mean with policy `Error`, ...).
    #[error("constraint violation: {0}")]
    Constraint(String),

    /// Degenerate geometry (zero vector where a direction is required).
    #[error("undefined direction: {0}")]
    UndefinedDirection(String),

    /// Parameter outside its admissible range.
    #[error("parameter out of range: {0}")]
    Parameter(String),

    /// The time stepper produced a non-finite value; carries the time of the
    /// last good state.
    #[error("solution blew up at t = {t_last_good}")]
    BlowUp { t_last_good: f64 },

    /// No admissible local existence time in the scan range.
    #[error("no admissible T in (0,1]: {0}")]
    NoAdmissibleTime(String),

    #[error("io error: {0}")]
    Io(#[from] std::io::Error),

    #[error("format error: {0}")]
    Format(String),
}

pub type Result<T> = std::result::Result<T, CoreError>;
