use thiserror::Error;

use crate::witness::OscillationWitness;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    /// Sequence and net indices are 1-based.
    #[error("index must be at least 1")]
    IndexZero,

    #[error("length mismatch: {coeffs} coefficients for {seqs} sequences")]
    LengthMismatch { coeffs: usize, seqs: usize },

    #[error("empty input: {0}")]
    EmptyInput(&'static str),

    #[error("empty index window")]
    EmptyWindow,

    #[error("invalid argument `{name}`: {reason}")]
    InvalidArgument { name: &'static str, reason: String },

    #[error("coordinate {index} has |value| {value} above the certified bound {bound}")]
    BoundViolation { index: usize, value: f64, bound: f64 },

    #[error("kind mismatch: expected {expected}, found {found}")]
    KindMismatch { expected: String, found: String },

    #[error("expected a unit vector, found norm {0}")]
    NotUnitVector(f64),

    #[error("operation requires a nonzero element")]
    ZeroElement,

    #[error("invalid space `{field}`: {reason}")]
    InvalidSpace { field: String, reason: String },

    #[error("invalid element: {0}")]
    InvalidElement(String),

    #[error("invalid sequence spec `{spec}`: {reason}")]
    InvalidSequence { spec: String, reason: String },

    #[error("basis is empty")]
    EmptyBasis,

    #[error("basis members look linearly dependent on the probe window (rank {rank} < {members})")]
    DependentBasis { rank: usize, members: usize },

    #[error("scheme exhausted: coordinate {0} lies beyond the extendable prefix")]
    SchemeExhausted(usize),

    #[error("budget exhausted: {0}")]
    BudgetExhausted(Box<Exhausted>),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

/// Payload of [`Error::BudgetExhausted`]. Searches report what they found.
#[derive(Debug, Clone)]
pub enum Exhausted {
    Witness {
        found: usize,
        requested: usize,
        partial: OscillationWitness,
    },
    Extraction {
        completed_stages: usize,
        survivors: usize,
        required: usize,
    },
}

impl std::fmt::Display for Exhausted {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Exhausted::Witness {
                found, requested, ..
            } => write!(f, "found {found} of {requested} witness pairs"),
            Exhausted::Extraction {
                completed_stages,
                survivors,
                required,
            } => write!(
                f,
                "{survivors} surviving indices (need {required}) after {completed_stages} completed stages"
            ),
        }
    }
}

impl Error {
    pub(crate) fn invalid(name: &'static str, reason: impl Into<String>) -> Self {
        Error::InvalidArgument {
            name,
            reason: reason.into(),
        }
    }

    pub fn is_budget_exhausted(&self) -> bool {
        matches!(self, Error::BudgetExhausted(_) | Error::SchemeExhausted(_))
    }
}
