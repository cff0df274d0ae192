//! Shared inputs for the spreading benchmarks.

use folkrank_core::graph::{build_graph, GraphModel, GraphVariant};
use folkrank_core::synth::{generate, SynthConfig};
use folkrank_core::{QueryPost, TaggingDataset};

pub struct Workload {
    pub dataset: TaggingDataset,
    pub graph: GraphModel,
    pub queries: Vec<QueryPost>,
}

/// A synthetic folksonomy of about `posts` posts with `queries` query posts
/// taken from its own users and documents.
pub fn workload(variant: GraphVariant, posts: usize, queries: usize) -> Workload {
    let cfg = SynthConfig {
        users: posts / 10 + 1,
        documents: posts / 3 + 1,
        tags: posts / 8 + 1,
        posts,
        seed: 42,
        ..SynthConfig::default()
    };
    let data = generate(&cfg);
    let graph = build_graph(variant, &data.dataset, None).expect("plain variants need no content");
    let queries = data
        .dataset
        .posts()
        .iter()
        .step_by((posts / queries.max(1)).max(1))
        .take(queries)
        .map(|p| QueryPost::new(&p.user, &p.document))
        .collect();
    Workload {
        dataset: data.dataset,
        graph,
        queries,
    }
}
