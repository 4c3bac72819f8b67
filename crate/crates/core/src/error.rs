use thiserror::Error;

/// Everything that can go wrong in this crate.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },

    #[error("invalid model: {0}")]
    InvalidModel(String),

    #[error("invalid assignment: {0}")]
    InvalidAssignment(String),

    #[error("model not rescaled: factor {factor} entry {entry} has log-weight {log_weight} <= 0")]
    NotRescaled {
        factor: usize,
        entry: usize,
        log_weight: f64,
    },

    #[error("clique {clique} has {count} bits set, expected exactly one")]
    CliqueBits { clique: usize, count: usize },

    #[error("conflicting shared variable {variable}: {first} vs {second}")]
    ConflictingVariable {
        variable: usize,
        first: usize,
        second: usize,
    },

    #[error("infeasible setting: vertices {0} and {1} are adjacent and both asserted")]
    Infeasible(usize, usize),

    #[error("{what}: size {size} exceeds guard {limit} (set PERFECTMAP_GUARD_OVERRIDE to lift)")]
    Guard {
        what: &'static str,
        size: usize,
        limit: usize,
    },

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("simplex exceeded {0} iterations")]
    IterationLimit(usize),

    #[error("non-finite message on edge ({0}, {1})")]
    NonFiniteMessage(usize, usize),

    #[error("invariant violated: {0}")]
    Invariant(String),

    #[error("i/o error: {0}")]
    Io(String),
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

pub type Result<T> = std::result::Result<T, Error>;
