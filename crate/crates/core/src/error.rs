use thiserror::Error;

use crate::arch::{EdgeId, NodeId};

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid {field}: {reason}")]
    Validation { field: &'static str, reason: String },

    #[error("unknown edge {0}")]
    UnknownEdge(EdgeId),

    #[error("unknown node {0}")]
    UnknownNode(NodeId),

    #[error("edge {0} is not part of the routing graph")]
    NotRoutable(EdgeId),

    #[error("no cycle available to move chain off edge {mover} onto edge {next}")]
    NoCycle { mover: EdgeId, next: EdgeId },

    #[error("memory zone saturated: {0}")]
    Saturation(String),

    #[error("schedule did not finish within {steps} time steps: {dump}")]
    Livelock { steps: usize, dump: String },

    #[error("parse error at {line}:{column}: {message}")]
    Parse {
        line: usize,
        column: usize,
        message: String,
    },

    #[error("unsupported: {0}")]
    Unsupported(String),

    #[error("front layer is empty")]
    EmptyFrontLayer,

    #[error("state budget of {budget} exceeded ({explored} states explored, frontier {frontier})")]
    Budget {
        budget: usize,
        explored: usize,
        frontier: usize,
    },

    #[error("malformed schedule: {0}")]
    Schedule(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl Error {
    pub(crate) fn validation(field: &'static str, reason: impl Into<String>) -> Self {
        Error::Validation {
            field,
            reason: reason.into(),
        }
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
