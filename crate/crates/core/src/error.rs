use std::io;
use std::path::PathBuf;

use thiserror::Error;

use crate::clustering::ClusterId;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: io::Error,
    },

    #[error("{path}:{line}: {message}")]
    Parse {
        path: PathBuf,
        line: usize,
        message: String,
    },

    #[error("{0}: input contains no records")]
    EmptyInput(PathBuf),

    #[error("edge endpoint {node} out of bounds for {n} nodes")]
    NodeOutOfBounds { node: usize, n: usize },

    #[error("node {0} has no cluster assignment")]
    MissingAssignment(String),

    #[error("node {node} assigned to both cluster {first} and cluster {second}")]
    ConflictingAssignment {
        node: String,
        first: ClusterId,
        second: ClusterId,
    },

    #[error("node {0} is not part of the clustering's node universe")]
    UnknownNode(String),

    #[error("cluster {cluster} has {size} nodes, above the min-cut size limit of {limit}")]
    ClusterTooLarge {
        cluster: ClusterId,
        size: usize,
        limit: usize,
    },

    #[error("no precomputed statistics for cluster {0}")]
    MissingStats(ClusterId),

    #[error("sequence length mismatch: {left} vs {right}")]
    LengthMismatch { left: usize, right: usize },

    #[error("matrix shape mismatch: {left:?} vs {right:?}")]
    ShapeMismatch {
        left: (usize, usize),
        right: (usize, usize),
    },

    #[error("clusterings cover different node universes ({left} vs {right} nodes)")]
    UniverseMismatch { left: usize, right: usize },

    #[error("invalid configuration: {0}")]
    Config(String),

    #[error("stage `{stage}` failed: {source}")]
    Stage {
        stage: &'static str,
        #[source]
        source: Box<Error>,
    },
}

impl Error {
    pub(crate) fn io(path: impl Into<PathBuf>, source: io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }

    pub(crate) fn in_stage(self, stage: &'static str) -> Self {
        match self {
            already @ Error::Stage { .. } => already,
            other => Error::Stage {
                stage,
                source: Box::new(other),
            },
        }
    }

    /// True for failures caused by unreadable or malformed input files.
    pub fn is_input_error(&self) -> bool {
        match self {
            Error::Io { .. }
            | Error::Parse { .. }
            | Error::EmptyInput(_)
            | Error::MissingAssignment(_)
            | Error::ConflictingAssignment { .. }
            | Error::UnknownNode(_)
            | Error::Config(_) => true,
            Error::Stage { source, .. } => source.is_input_error(),
            _ => false,
        }
    }
}
