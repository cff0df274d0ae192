//! Weight spreading over a [`GraphModel`](crate::graph::GraphModel) and tag
//! ranking.

mod config;
mod engine;
mod folkrank;
mod pathrank;
mod preference;
mod ranking;

pub use config::{Balance, EngineConfig, RankingMode, SpreaderKind};
pub use engine::Recommender;
pub use folkrank::{
    differential_rank, folkrank_spread, folkrank_spread_observed, uniform_preferences, with_background,
    SpreadParams,
};
pub use pathrank::{
    combine_weight_vectors, pathrank_spread, pathrank_spread_with, PathRankCache, PathRankNorm,
};
pub use preference::{make_preference_vector, original_balance, DocumentPrefs, PreferenceVector};
pub use ranking::{tag_scores, TagRanking, TagRetrieval, TIE_TOLERANCE};

use crate::graph::NodeId;

/// Dense node weights produced by a spreader, indexed by [`NodeId`].
#[derive(Clone, Debug, Default, PartialEq)]
pub struct WeightVector {
    pub weights: Vec<f64>,
    /// Iterations for iterative spreading, levels for PathRank.
    pub iterations: usize,
    /// Directed edge traversals that carried weight.
    pub edges_traversed: u64,
}

impl WeightVector {
    pub fn zeros(n: usize) -> Self {
        WeightVector {
            weights: vec![0.0; n],
            iterations: 0,
            edges_traversed: 0,
        }
    }

    #[inline]
    pub fn get(&self, node: NodeId) -> f64 {
        self.weights[node.index()]
    }

    pub fn len(&self) -> usize {
        self.weights.len()
    }

    pub fn is_empty(&self) -> bool {
        self.weights.is_empty()
    }

    pub fn sum(&self) -> f64 {
        self.weights.iter().sum()
    }
}
