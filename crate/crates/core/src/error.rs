use thiserror::Error;

use crate::graph::Vertex;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("infeasible model parameters: {0}")]
    Infeasible(String),

    #[error("vertex {vertex} out of range for a graph on {n} vertices")]
    VertexOutOfRange { vertex: u64, n: usize },

    #[error("neighbor index {index} out of range for vertex {vertex} of degree {degree}")]
    NeighborIndexOutOfRange {
        vertex: Vertex,
        index: usize,
        degree: usize,
    },

    #[error("malformed graph: {0}")]
    MalformedGraph(String),

    #[error("malformed stream at event {index}: {reason}")]
    MalformedStream { index: usize, reason: String },

    #[error("sampler recovery failed: {0}")]
    RecoveryFailure(String),

    #[error("decomposition property violated: {0}")]
    PropertyViolation(String),

    #[error("improper coloring: {0}")]
    ProperViolation(String),

    #[error("list coloring failed with {residual} uncolored vertices")]
    ListColoringFailed { residual: usize },

    #[error("final max degree {observed} exceeds declared bound {declared}")]
    DegreeBoundExceeded { declared: usize, observed: usize },

    #[error("machine {machine} exceeded its {cap}-word cap in round {round} ({kind}: {words} words)")]
    MemoryCap {
        machine: usize,
        round: usize,
        kind: &'static str,
        words: u64,
        cap: u64,
    },

    #[error("parse error on line {line}: {reason}")]
    Parse { line: usize, reason: String },

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl Error {
    /// Stable snake_case name used in machine-readable failure reports.
    pub fn kind(&self) -> &'static str {
        match self {
            Error::InvalidParameter(_) => "invalid_parameter",
            Error::Infeasible(_) => "infeasible",
            Error::VertexOutOfRange { .. } => "vertex_out_of_range",
            Error::NeighborIndexOutOfRange { .. } => "neighbor_index_out_of_range",
            Error::MalformedGraph(_) => "malformed_graph",
            Error::MalformedStream { .. } => "malformed_stream",
            Error::RecoveryFailure(_) => "recovery_failure",
            Error::PropertyViolation(_) => "property_violation",
            Error::ProperViolation(_) => "proper_violation",
            Error::ListColoringFailed { .. } => "list_coloring_failed",
            Error::DegreeBoundExceeded { .. } => "degree_bound_exceeded",
            Error::MemoryCap { .. } => "memory_cap",
            Error::Parse { .. } => "parse",
            Error::Io(_) => "io",
            Error::Json(_) => "json",
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn invalid(msg: impl Into<String>) -> Error {
    Error::InvalidParameter(msg.into())
}
