use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("visibilities violate the uncertainty relation: vx² + vy² = {0} > 1")]
    UncertaintyViolation(f64),

    #[error("{what} out of range: {value}")]
    Domain { what: &'static str, value: f64 },

    #[error("invalid density matrix: {0}")]
    InvalidState(String),

    #[error("projection has vanishing probability ({0:e})")]
    ZeroProbability(f64),

    #[error("precise expectation value vanishes ({0:e}); visibility undefined")]
    VanishingExpectation(f64),

    #[error("count table is empty (all counts zero)")]
    EmptyCounts,

    #[error("count table line {line}: {msg}")]
    CountFormat { line: usize, msg: String },

    #[error("count table is missing outcome {0}")]
    MissingOutcome(String),

    #[error("degenerate fit: {0}")]
    DegenerateFit(String),
}

pub type Result<T> = std::result::Result<T, Error>;
