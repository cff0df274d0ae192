//! Weighted undirected graphs over users, documents, tags, posts and words.
//!
//! Nodes are interned to dense `u32` ids and adjacency is stored in
//! compressed rows holding both directions of every edge, so a spreading
//! pass is a linear scan.

mod build;
mod edgelist;

use std::collections::HashMap;
use std::fmt;
use std::str::FromStr;

pub use build::{
    build_adapted_graph, build_content_graph, build_folksonomy_graph, build_graph, build_post_graph,
};
pub use edgelist::{read_edge_list, write_edge_list};

use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct NodeId(pub u32);

impl NodeId {
    #[inline]
    pub fn index(self) -> usize {
        self.0 as usize
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum NodeKind {
    User,
    Document,
    Tag,
    Post,
    Word,
}

impl NodeKind {
    pub const ALL: [NodeKind; 5] = [
        NodeKind::User,
        NodeKind::Document,
        NodeKind::Tag,
        NodeKind::Post,
        NodeKind::Word,
    ];

    fn slot(self) -> usize {
        self as usize
    }

    pub fn as_str(self) -> &'static str {
        match self {
            NodeKind::User => "user",
            NodeKind::Document => "document",
            NodeKind::Tag => "tag",
            NodeKind::Post => "post",
            NodeKind::Word => "word",
        }
    }
}

impl FromStr for NodeKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        NodeKind::ALL
            .into_iter()
            .find(|k| k.as_str() == s)
            .ok_or_else(|| Error::InvalidArgument(format!("unknown node kind `{s}`")))
    }
}

impl fmt::Display for NodeKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash)]
pub enum GraphVariant {
    /// User, document and tag nodes; edges weighted by shared assignments.
    #[default]
    Folksonomy,
    /// As [`GraphVariant::Folksonomy`] but every user-document edge has weight 1.
    Adapted,
    /// Explicit post nodes; users, documents and tags connect only to posts.
    Post,
    /// Documents replaced by their Tf-Idf weighted content words.
    Content,
}

impl GraphVariant {
    pub fn as_str(self) -> &'static str {
        match self {
            GraphVariant::Folksonomy => "folksonomy",
            GraphVariant::Adapted => "adapted",
            GraphVariant::Post => "post",
            GraphVariant::Content => "content",
        }
    }

    /// Whether an edge between these node kinds may exist in this variant.
    pub fn allows(self, a: NodeKind, b: NodeKind) -> bool {
        use NodeKind::*;
        let pair = if a <= b { (a, b) } else { (b, a) };
        match self {
            GraphVariant::Folksonomy | GraphVariant::Adapted => {
                matches!(pair, (User, Document) | (User, Tag) | (Document, Tag))
            }
            GraphVariant::Post => matches!(pair, (User, Post) | (Document, Post) | (Tag, Post)),
            GraphVariant::Content => matches!(pair, (User, Word) | (User, Tag) | (Tag, Word)),
        }
    }
}

impl FromStr for GraphVariant {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "folksonomy" => Ok(GraphVariant::Folksonomy),
            "adapted" => Ok(GraphVariant::Adapted),
            "post" | "post-graph" => Ok(GraphVariant::Post),
            "content" => Ok(GraphVariant::Content),
            other => Err(Error::InvalidArgument(format!("unknown graph variant `{other}`"))),
        }
    }
}

impl fmt::Display for GraphVariant {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// Immutable weighted undirected graph in compressed adjacency form.
#[derive(Clone, Debug)]
pub struct GraphModel {
    variant: GraphVariant,
    kinds: Vec<NodeKind>,
    labels: Vec<String>,
    index: [HashMap<String, NodeId>; 5],
    by_kind: [Vec<NodeId>; 5],
    offsets: Vec<usize>,
    targets: Vec<NodeId>,
    weights: Vec<f64>,
    totals: Vec<f64>,
}

impl GraphModel {
    pub fn variant(&self) -> GraphVariant {
        self.variant
    }

    pub fn node_count(&self) -> usize {
        self.kinds.len()
    }

    /// Number of undirected edges.
    pub fn edge_count(&self) -> usize {
        self.targets.len() / 2
    }

    pub fn node(&self, kind: NodeKind, label: &str) -> Option<NodeId> {
        self.index[kind.slot()].get(label).copied()
    }

    pub fn kind(&self, node: NodeId) -> NodeKind {
        self.kinds[node.index()]
    }

    pub fn label(&self, node: NodeId) -> &str {
        &self.labels[node.index()]
    }

    pub fn nodes_of_kind(&self, kind: NodeKind) -> &[NodeId] {
        &self.by_kind[kind.slot()]
    }

    pub fn count_of_kind(&self, kind: NodeKind) -> usize {
        self.by_kind[kind.slot()].len()
    }

    pub fn neighbors(&self, node: NodeId) -> impl Iterator<Item = (NodeId, f64)> + '_ {
        let range = self.offsets[node.index()]..self.offsets[node.index() + 1];
        self.targets[range.clone()]
            .iter()
            .copied()
            .zip(self.weights[range].iter().copied())
    }

    pub fn degree(&self, node: NodeId) -> usize {
        self.offsets[node.index() + 1] - self.offsets[node.index()]
    }

    /// Sum of the weights of all edges incident to `node`.
    pub fn total_weight(&self, node: NodeId) -> f64 {
        self.totals[node.index()]
    }

    /// Weight of the edge between `a` and `b`, if any.
    pub fn edge_weight(&self, a: NodeId, b: NodeId) -> Option<f64> {
        let range = self.offsets[a.index()]..self.offsets[a.index() + 1];
        let row = &self.targets[range.clone()];
        row.binary_search(&b).ok().map(|i| self.weights[range.start + i])
    }

    /// Every undirected edge once, as `(a, b, weight)` with `a < b`.
    pub fn edges(&self) -> impl Iterator<Item = (NodeId, NodeId, f64)> + '_ {
        (0..self.node_count()).flat_map(move |i| {
            let a = NodeId(i as u32);
            self.neighbors(a).filter(move |(b, _)| a < *b).map(move |(b, w)| (a, b, w))
        })
    }

    pub(crate) fn csr(&self) -> (&[usize], &[NodeId], &[f64]) {
        (&self.offsets, &self.targets, &self.weights)
    }

    pub(crate) fn totals(&self) -> &[f64] {
        &self.totals
    }

    /// Checks the structural invariants: positive finite weights, no
    /// self-loops, symmetric storage, per-node totals and the variant's
    /// partiteness.
    pub fn validate(&self) -> Result<()> {
        for i in 0..self.node_count() {
            let a = NodeId(i as u32);
            let mut sum = 0.0;
            for (b, w) in self.neighbors(a) {
                if a == b {
                    return Err(Error::Graph(format!("self-loop on `{}`", self.label(a))));
                }
                if !(w.is_finite() && w > 0.0) {
                    return Err(Error::Graph(format!(
                        "edge {}-{} has weight {w}",
                        self.label(a),
                        self.label(b)
                    )));
                }
                if self.edge_weight(b, a) != Some(w) {
                    return Err(Error::Graph(format!(
                        "edge {}-{} is not stored symmetrically",
                        self.label(a),
                        self.label(b)
                    )));
                }
                if !self.variant.allows(self.kind(a), self.kind(b)) {
                    return Err(Error::Graph(format!(
                        "{}-{} edge not allowed in a {} graph",
                        self.kind(a),
                        self.kind(b),
                        self.variant
                    )));
                }
                sum += w;
            }
            if (sum - self.totals[i]).abs() > 1e-9 * sum.max(1.0) {
                return Err(Error::Graph(format!("total weight of `{}` is stale", self.label(a))));
            }
        }
        Ok(())
    }
}

/// Share of `weight` that `node` passes to each neighbour under the
/// row-stochastic adjacency: `weight * w(node, n) / total(node)`. Isolated
/// nodes pass nothing.
pub fn row_stochastic_spread(graph: &GraphModel, node: NodeId, weight: f64) -> Vec<(NodeId, f64)> {
    let total = graph.total_weight(node);
    if total <= 0.0 {
        return Vec::new();
    }
    graph.neighbors(node).map(|(n, w)| (n, weight * w / total)).collect()
}

/// Incremental graph construction; edges added twice accumulate weight.
#[derive(Debug, Default)]
pub struct GraphBuilder {
    kinds: Vec<NodeKind>,
    labels: Vec<String>,
    index: [HashMap<String, NodeId>; 5],
    edges: HashMap<(NodeId, NodeId), f64>,
}

impl GraphBuilder {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn node(&mut self, kind: NodeKind, label: &str) -> NodeId {
        if let Some(&id) = self.index[kind.slot()].get(label) {
            return id;
        }
        let id = NodeId(u32::try_from(self.kinds.len()).expect("node count fits in u32"));
        self.kinds.push(kind);
        self.labels.push(label.to_owned());
        self.index[kind.slot()].insert(label.to_owned(), id);
        id
    }

    pub fn lookup(&self, kind: NodeKind, label: &str) -> Option<NodeId> {
        self.index[kind.slot()].get(label).copied()
    }

    pub fn add_edge(&mut self, a: NodeId, b: NodeId, weight: f64) {
        debug_assert_ne!(a, b, "self-loop");
        let key = if a < b { (a, b) } else { (b, a) };
        *self.edges.entry(key).or_insert(0.0) += weight;
    }

    /// Overwrites the weight of an edge instead of accumulating.
    pub fn set_edge(&mut self, a: NodeId, b: NodeId, weight: f64) {
        let key = if a < b { (a, b) } else { (b, a) };
        self.edges.insert(key, weight);
    }

    pub fn finish(self, variant: GraphVariant) -> GraphModel {
        let n = self.kinds.len();
        let mut edges: Vec<((NodeId, NodeId), f64)> =
            self.edges.into_iter().filter(|(_, w)| *w > 0.0).collect();
        edges.sort_by_key(|(k, _)| *k);

        let mut degree = vec![0usize; n];
        for ((a, b), _) in &edges {
            degree[a.index()] += 1;
            degree[b.index()] += 1;
        }
        let mut offsets = Vec::with_capacity(n + 1);
        offsets.push(0);
        for d in &degree {
            offsets.push(offsets.last().unwrap() + d);
        }
        let mut cursor = offsets[..n].to_vec();
        let mut targets = vec![NodeId(0); offsets[n]];
        let mut weights = vec![0.0; offsets[n]];
        // edges are sorted by (a, b), so row `a` fills in ascending b; row b
        // receives a's in ascending order too because the outer key is a
        for &((a, b), w) in &edges {
            let (ia, ib) = (cursor[a.index()], cursor[b.index()]);
            targets[ia] = b;
            weights[ia] = w;
            targets[ib] = a;
            weights[ib] = w;
            cursor[a.index()] += 1;
            cursor[b.index()] += 1;
        }
        for i in 0..n {
            let range = offsets[i]..offsets[i + 1];
            let mut row: Vec<(NodeId, f64)> = targets[range.clone()]
                .iter()
                .copied()
                .zip(weights[range.clone()].iter().copied())
                .collect();
            if !row.windows(2).all(|w| w[0].0 < w[1].0) {
                row.sort_by_key(|e| e.0);
                for (k, (t, w)) in row.into_iter().enumerate() {
                    targets[range.start + k] = t;
                    weights[range.start + k] = w;
                }
            }
        }
        let totals = (0..n)
            .map(|i| weights[offsets[i]..offsets[i + 1]].iter().sum())
            .collect();

        let mut by_kind: [Vec<NodeId>; 5] = Default::default();
        for (i, k) in self.kinds.iter().enumerate() {
            by_kind[k.slot()].push(NodeId(i as u32));
        }
        GraphModel {
            variant,
            kinds: self.kinds,
            labels: self.labels,
            index: self.index,
            by_kind,
            offsets,
            targets,
            weights,
            totals,
        }
    }
}
