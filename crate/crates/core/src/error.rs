//! Error type shared across the crate.

use thiserror::Error;

/// Coarse classification used by callers (e.g. the CLI) to map failures
/// onto exit codes: data problems vs. configuration problems.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ErrorCategory {
    /// The input data is unusable (malformed file, gaps, non-finite values).
    Data,
    /// The requested configuration is invalid or infeasible for the data.
    Config,
}

#[derive(Debug, Error)]
pub enum Error {
    #[error("series must contain at least one sample")]
    EmptySeries,

    #[error("sample {index} is not finite ({value})")]
    NonFiniteSample { index: usize, value: f64 },

    #[error("period must be >= 1")]
    InvalidPeriod,

    #[error("trim range {from}..={to} out of bounds for series of length {len}")]
    TrimOutOfBounds { from: usize, to: usize, len: usize },

    #[error("invalid filter parameter: {0}")]
    InvalidParameter(String),

    #[error("coefficient arithmetic overflowed exact integer range for m={m}, k={k}")]
    CoefficientOverflow { m: usize, k: usize },

    #[error("series too short for filter: need at least {required} samples, have {actual}")]
    InsufficientData { required: usize, actual: usize },

    #[error(
        "bandwidth infeasible: component at {frequency} needs window m={required_m}, \
         which requires at least {min_n} samples (series has {n})"
    )]
    InfeasibleBandwidth {
        frequency: String,
        required_m: usize,
        min_n: usize,
        n: usize,
    },

    #[error("duplicate component frequency {frequency}")]
    DuplicateFrequency { frequency: String },

    #[error("phase {phase} of period {period} is never observed in the series")]
    IncompleteCycle { phase: usize, period: usize },

    #[error("need at least one full block of {period} samples, have {n}")]
    InsufficientCycles { period: usize, n: usize },

    #[error("empty bootstrap ensemble")]
    EmptyEnsemble,

    #[error("incompatible ensembles: {0}")]
    IncompatibleEnsembles(String),

    #[error("confidence complement alpha must lie in (0, 1), got {0}")]
    InvalidAlpha(f64),

    #[error("correlation undefined: {0} series is constant over the common support")]
    ConstantSeries(&'static str),

    #[error("series have no common support")]
    NoCommonSupport,

    #[error("mismatched components: {0}")]
    MismatchedComponents(String),

    #[error("population must be positive, got {0}")]
    NonPositivePopulation(f64),

    #[error("row {row}: {message}")]
    MalformedRow { row: usize, message: String },

    #[error("missing column {name:?} in CSV header")]
    MissingColumn { name: String },

    #[error("duplicate date {date} in input")]
    DuplicateDate { date: String },

    #[error("gap in input: no row for {date}")]
    DateGap { date: String },

    #[error("synthetic spec invalid: {0}")]
    InvalidSynthSpec(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error("JSON error: {0}")]
    Json(#[from] serde_json::Error),

    #[error("CSV error: {0}")]
    Csv(#[from] csv::Error),
}

impl Error {
    pub fn category(&self) -> ErrorCategory {
        use Error::*;
        match self {
            InvalidPeriod
            | TrimOutOfBounds { .. }
            | InvalidParameter(_)
            | CoefficientOverflow { .. }
            | InfeasibleBandwidth { .. }
            | DuplicateFrequency { .. }
            | IncompatibleEnsembles(_)
            | InvalidAlpha(_)
            | MismatchedComponents(_)
            | NonPositivePopulation(_)
            | InvalidSynthSpec(_) => ErrorCategory::Config,
            _ => ErrorCategory::Data,
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
