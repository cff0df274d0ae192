use std::io;

use thiserror::Error;

use crate::spread::WeightVector;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("i/o error")]
    Io(#[from] io::Error),

    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("invalid config: {0}")]
    Config(String),

    #[error("empty input: {0}")]
    Empty(&'static str),

    #[error("sample target of {target} posts exceeds the {available} posts available")]
    SampleTooLarge { target: usize, available: usize },

    #[error("tag retrieval `{retrieval}` is not supported on a {variant} graph")]
    RetrievalMismatch { retrieval: &'static str, variant: &'static str },

    #[error("unknown node `{0}`")]
    UnknownNode(String),

    #[error("graph invariant violated: {0}")]
    Graph(String),

    #[error("spreading did not converge after {iterations} iterations (residual {residual:e})")]
    NotConverged {
        iterations: usize,
        residual: f64,
        last: Box<WeightVector>,
    },

    #[error("query has neither a known user nor any document-side preference node")]
    NoPreferenceNodes,
}
