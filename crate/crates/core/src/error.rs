use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("divisor interval contains zero")]
    DivisorContainsZero,

    #[error("square root of an interval lying entirely below zero")]
    NegativeDomain,

    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("operation requires a non-empty box")]
    EmptyBox,

    #[error("strip coefficient C[{row}][{col}] is zero")]
    ZeroCoefficient { row: usize, col: usize },

    #[error("scaling vector must be strictly positive (component {index} is {value})")]
    NonpositiveScale { index: usize, value: f64 },

    #[error("cannot bisect dimension {dim}: zero width")]
    ZeroWidthSplit { dim: usize },

    #[error("operation requires a non-empty box collection")]
    EmptyCollection,

    #[error("metric values must be positive for normalization (got {0})")]
    NonpositiveMetric(f64),

    #[error("measurements are inconsistent with the predicted enclosure: every box was discarded")]
    InconsistentMeasurements,

    #[error("state domain violated: {0}")]
    DomainViolation(String),

    #[error("initial state lies outside the initial enclosure")]
    InitialStateOutsideX0,

    #[error("invalid configuration: {0}")]
    InvalidConfig(String),

    #[error("i/o error: {0}")]
    Io(String),

    #[error("at step {step}: {source}")]
    AtStep {
        step: usize,
        #[source]
        source: Box<Error>,
    },
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

impl From<csv::Error> for Error {
    fn from(e: csv::Error) -> Self {
        Error::Io(e.to_string())
    }
}

impl Error {
    pub(crate) fn at_step(self, step: usize) -> Self {
        match self {
            e @ Error::AtStep { .. } => e,
            e => Error::AtStep {
                step,
                source: Box::new(e),
            },
        }
    }

    /// The innermost error, unwrapping step context.
    pub fn root(&self) -> &Error {
        match self {
            Error::AtStep { source, .. } => source.root(),
            e => e,
        }
    }

    pub fn step(&self) -> Option<usize> {
        match self {
            Error::AtStep { step, .. } => Some(*step),
            _ => None,
        }
    }
}
