use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("length mismatch: {left} vs {right}")]
    LengthMismatch { left: usize, right: usize },
    #[error("non-finite value at row {row}, column {column}")]
    NonFinite { row: usize, column: usize },
    #[error("series too short: need at least {required} observations, got {got}")]
    TooShort { required: usize, got: usize },
    #[error("median heuristic is degenerate (all points identical); pass an explicit bandwidth")]
    DegenerateBandwidth,
    #[error("kernel bandwidth must be resolved to an explicit positive value")]
    UnresolvedBandwidth,
    #[error("naive evaluation budget exceeded: n={n}, arity={arity}")]
    BudgetExceeded { n: usize, arity: usize },
    #[error("alpha must lie in (0, 1), got {0}")]
    InvalidAlpha(f64),
    #[error("invalid configuration: {0}")]
    InvalidConfig(String),
    #[error("numeric blow-up at t={t} (|value| > 1e6)")]
    NumericBlowUp { t: usize },
    #[error("csv row {row}: {message}")]
    Csv { row: usize, message: String },
    #[error("io: {0}")]
    Io(String),
}

impl Error {
    /// Stable machine-readable code, used in CLI error output.
    pub fn code(&self) -> &'static str {
        match self {
            Error::DimensionMismatch { .. } => "dimension_mismatch",
            Error::LengthMismatch { .. } => "length_mismatch",
            Error::NonFinite { .. } => "non_finite",
            Error::TooShort { .. } => "too_short",
            Error::DegenerateBandwidth => "degenerate_bandwidth",
            Error::UnresolvedBandwidth => "unresolved_bandwidth",
            Error::BudgetExceeded { .. } => "budget_exceeded",
            Error::InvalidAlpha(_) => "invalid_alpha",
            Error::InvalidConfig(_) => "invalid_config",
            Error::NumericBlowUp { .. } => "numeric_blow_up",
            Error::Csv { .. } => "csv",
            Error::Io(_) => "io",
        }
    }
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

pub(crate) fn check_alpha(alpha: f64) -> Result<()> {
    if alpha > 0.0 && alpha < 1.0 {
        Ok(())
    } else {
        Err(Error::InvalidAlpha(alpha))
    }
}
