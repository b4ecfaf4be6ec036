use thiserror::Error;

/// Errors raised by curve construction, operator assembly and time stepping.
#[derive(Debug, Error)]
pub enum Error {
    #[error("length mismatch: expected {expected} samples, got {got}")]
    Misaligned { expected: usize, got: usize },

    #[error("curve needs at least {min} nodes, got {got}")]
    TooFewNodes { min: usize, got: usize },

    #[error("nodes {i} and {j} coincide")]
    DegenerateSpacing { i: usize, j: usize },

    #[error("normal line through node {node} does not meet the curve exactly once inside the tubular band")]
    NoGraphRepresentation { node: usize },

    #[error("curve self-intersects (segments {a} and {b})")]
    EmbeddingLost { a: usize, b: usize },

    #[error("fold-over at node {node}: tangential Jacobian {jacobian:.3e} is not positive")]
    FoldOver { node: usize, jacobian: f64 },

    #[error("height field violates distance comparability at pair ({i}, {j}): ratio {ratio:.4}")]
    ComparabilityViolated { i: usize, j: usize, ratio: f64 },

    #[error("linear system (I - dt A) could not be factorized")]
    SingularSystem,

    #[error("fixed-point iteration failed to contract: ratio {ratio:.4} at iteration {iteration}")]
    NoContraction { iteration: usize, ratio: f64 },

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("parse error at line {line}: {message}")]
    Parse { line: usize, message: String },

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

pub(crate) fn check_len(expected: usize, got: usize) -> Result<()> {
    if expected == got {
        Ok(())
    } else {
        Err(Error::Misaligned { expected, got })
    }
}
