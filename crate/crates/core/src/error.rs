use thiserror::Error;

use crate::graph::{Timestamp, VertexId};

#[derive(Debug, Error)]
pub enum Error {
    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },

    #[error("graph has no edges")]
    EmptyGraph,

    #[error(transparent)]
    Query(#[from] QueryError),

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("workload: {0}")]
    Workload(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

/// Reasons a query is rejected before any work is done.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum QueryError {
    #[error("source equals target")]
    SourceEqualsTarget,

    #[error("empty interval [{tau_b},{tau_e}]")]
    EmptyInterval { tau_b: Timestamp, tau_e: Timestamp },

    #[error("timestamp {0} leaves no headroom for interval sentinels")]
    TimestampOutOfRange(Timestamp),

    #[error("vertex index {0} is not in the graph")]
    UnknownVertex(VertexId),

    #[error("unknown vertex id {0}")]
    UnknownExternalId(String),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
