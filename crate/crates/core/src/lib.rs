//! Graph-based tag recommendation over folksonomies.
//!
//! The crate covers the whole experimental pipeline: ingesting tagging data
//! ([`dataset`]), building Tf-Idf document models ([`content`]), constructing
//! the folksonomy, Adapted, Post and content graphs ([`graph`]), spreading
//! weight with iterative FolkRank or breadth-first PathRank ([`spread`]), and
//! scoring the resulting recommendations ([`eval`]).

pub mod content;
pub mod dataset;
pub mod error;
pub mod eval;
pub mod fixtures;
pub mod graph;
pub mod spread;
pub mod synth;

pub use content::{DocumentContentModel, SimilarityList, Tokenizer, WordVector};
pub use dataset::{Post, QueryPost, TagAssignment, TaggingDataset};
pub use error::{Error, Result};
pub use eval::{EvalResult, Metrics, TagRecommender};
pub use graph::{GraphModel, GraphVariant, NodeId, NodeKind};
pub use spread::{EngineConfig, PreferenceVector, Recommender, TagRanking, WeightVector};
