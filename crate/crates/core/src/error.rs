use std::path::PathBuf;

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

/// Graph invariants checked on load. The display text names the violated
/// invariant first so callers can report it verbatim.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum ValidationError {
    #[error("empty graph")]
    EmptyGraph,
    #[error("duplicate vertex `{0}`")]
    DuplicateVertex(String),
    #[error("nonpositive measure at vertex `{0}`")]
    NonpositiveMeasure(String),
    #[error("nonpositive weight on edge `{0}`-`{1}`")]
    NonpositiveWeight(String, String),
    #[error("self-loop at vertex `{0}`")]
    SelfLoop(String),
    #[error("duplicate edge `{0}`-`{1}`")]
    DuplicateEdge(String, String),
    #[error("unknown endpoint `{0}`")]
    UnknownEndpoint(String),
    #[error("disconnected graph: `{0}` is unreachable from `{1}`")]
    Disconnected(String, String),
    #[error("empty interior")]
    EmptyInterior,
    #[error("unknown interior vertex `{0}`")]
    UnknownInteriorVertex(String),
    #[error("empty boundary: the interior touches no outside vertex")]
    EmptyBoundary,
}

#[derive(Debug, Error)]
pub enum Error {
    #[error("failed to read `{path}`: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("parse error: {0}")]
    Parse(String),
    #[error("validation error: {0}")]
    Validation(#[from] ValidationError),
    #[error("vertex `{0}` is outside the effective set Ω ∪ ∂Ω")]
    OutsideDomain(String),
    #[error("unknown vertex `{0}`")]
    UnknownVertex(String),
    #[error("dimension mismatch: expected {expected}, got {found}")]
    DimensionMismatch { expected: usize, found: usize },
    #[error("non-finite value in input")]
    NonFinite,
    #[error("matrix is not positive definite: {0}")]
    NotPositiveDefinite(&'static str),
    #[error("invalid parameters: {0}")]
    InvalidParams(String),
    #[error("{stage}: {reason}")]
    Solver { stage: &'static str, reason: String },
}

impl Error {
    pub(crate) fn solver(stage: &'static str, reason: impl Into<String>) -> Self {
        Error::Solver {
            stage,
            reason: reason.into(),
        }
    }

    /// Input errors map to CLI exit code 1, solver failures to 2.
    pub fn is_solver_failure(&self) -> bool {
        matches!(self, Error::Solver { .. })
    }
}
