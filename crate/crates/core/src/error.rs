use std::path::PathBuf;

use thiserror::Error;

/// Errors reported by the toolkit.
#[derive(Debug, Error)]
pub enum Error {
    #[error("line {line}: {msg}")]
    Parse { line: usize, msg: String },

    #[error("vertex {index}: coordinate {value} is not finite or exceeds 1e9 in magnitude")]
    BadCoordinate { index: usize, value: f64 },

    #[error("graph is disconnected: {components} components, vertex {unreached} is not reachable from vertex 0")]
    Disconnected { components: usize, unreached: usize },

    #[error("vertex {0} out of range")]
    VertexOutOfRange(usize),

    #[error("{what} of {n} vertices exceeds the limit of {limit}")]
    TooLarge { what: &'static str, n: usize, limit: usize },

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("doubled distance {value} does not fit the oracle tables (limit {limit})")]
    DistanceOverflow { value: i64, limit: i64 },

    #[error("invalid oracle file: {0}")]
    Format(String),

    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error(transparent)]
    IoStream(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
