use std::path::PathBuf;

use thiserror::Error;

use crate::tdn::{Lifetime, NodeId, Timestep};

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("record {index}: self-loop on node {node} is not a valid interaction")]
    SelfLoop { index: usize, node: NodeId },

    #[error("record {index}: lifetime must be a positive integer, got {value}")]
    NonPositiveLifetime { index: usize, value: i64 },

    #[error("record {index}: lifetime-from-column policy requires a lifetime field")]
    MissingLifetime { index: usize },

    #[error("lifetime {lifetime} exceeds the configured maximum {max}")]
    LifetimeExceedsMax { lifetime: Lifetime, max: u32 },

    #[error("stream is not chronological: batch arrives at {found} but the clock is at {now}")]
    NonChronological { now: Timestep, found: Timestep },

    #[error("invalid configuration: {0}")]
    Config(String),

    #[error("exhaustive search over {subsets} subsets exceeds the limit of {limit}")]
    SearchTooLarge { subsets: u128, limit: u128 },

    #[error("{}:{line}: {message}", path.display())]
    Parse {
        path: PathBuf,
        line: usize,
        message: String,
    },

    #[error("{}: stream contains no interactions", path.display())]
    EmptyStream { path: PathBuf },

    #[error("{}: {source}", path.display())]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error(transparent)]
    Write(#[from] std::io::Error),
}
