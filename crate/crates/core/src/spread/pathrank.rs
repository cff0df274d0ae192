use std::fmt;
use std::str::FromStr;
use std::sync::{Arc, OnceLock};

use super::WeightVector;
use crate::error::{Error, Result};
use crate::graph::{GraphModel, NodeId};

/// Denominator used when a frontier node divides its weight.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash)]
pub enum PathRankNorm {
    /// All incident edges; shares aimed at finalized nodes are lost.
    #[default]
    AllEdges,
    /// Only edges to nodes not finalized at an earlier level, so the node
    /// passes on its whole weight.
    Frontier,
}

impl PathRankNorm {
    pub fn as_str(self) -> &'static str {
        match self {
            PathRankNorm::AllEdges => "all-edges",
            PathRankNorm::Frontier => "frontier",
        }
    }
}

impl FromStr for PathRankNorm {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "all-edges" => Ok(PathRankNorm::AllEdges),
            "frontier" => Ok(PathRankNorm::Frontier),
            other => Err(Error::InvalidArgument(format!("unknown pathrank-norm `{other}`"))),
        }
    }
}

impl fmt::Display for PathRankNorm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

pub fn pathrank_spread(graph: &GraphModel, pref: NodeId, pl: usize) -> WeightVector {
    pathrank_spread_with(graph, pref, pl, PathRankNorm::AllEdges)
}

/// Breadth-first spreading from a single preference node holding weight 1.
///
/// Nodes are finalized at the first level that reaches them, with the sum
/// of the contributions from the previous level. Each level spreads once;
/// nothing flows back to a node finalized earlier, and nodes on the same
/// level do not feed each other. Stops after `pl` levels or when no new
/// node is reached.
pub fn pathrank_spread_with(
    graph: &GraphModel,
    pref: NodeId,
    pl: usize,
    norm: PathRankNorm,
) -> WeightVector {
    const UNREACHED: usize = usize::MAX;
    let n = graph.node_count();
    let mut out = WeightVector::zeros(n);
    let mut level = vec![UNREACHED; n];
    out.weights[pref.index()] = 1.0;
    level[pref.index()] = 0;
    let mut frontier = vec![pref];

    for l in 1..=pl {
        let mut next = Vec::new();
        for &f in &frontier {
            let wf = out.weights[f.index()];
            if wf == 0.0 {
                continue;
            }
            let total = match norm {
                PathRankNorm::AllEdges => graph.total_weight(f),
                PathRankNorm::Frontier => graph
                    .neighbors(f)
                    .filter(|(nb, _)| level[nb.index()] >= l)
                    .map(|(_, w)| w)
                    .sum(),
            };
            if total <= 0.0 {
                continue;
            }
            for (nb, w) in graph.neighbors(f) {
                let lv = &mut level[nb.index()];
                if *lv < l {
                    continue;
                }
                if *lv == UNREACHED {
                    *lv = l;
                    next.push(nb);
                }
                out.weights[nb.index()] += wf * w / total;
                out.edges_traversed += 1;
            }
        }
        if next.is_empty() {
            break;
        }
        out.iterations = l;
        next.sort_unstable();
        frontier = next;
    }
    out
}

/// Weighted average of weight vectors, with the combination weights
/// normalized to sum to 1. Traversal counts add up.
pub fn combine_weight_vectors(vectors: &[(&WeightVector, f64)]) -> Result<WeightVector> {
    let Some((first, _)) = vectors.first() else {
        return Err(Error::InvalidArgument("nothing to combine".into()));
    };
    let n = first.len();
    if vectors.iter().any(|(v, _)| v.len() != n) {
        return Err(Error::InvalidArgument("weight vectors differ in length".into()));
    }
    if vectors.iter().any(|(_, c)| !(c.is_finite() && *c >= 0.0)) {
        return Err(Error::InvalidArgument("combination weights must be non-negative".into()));
    }
    let total: f64 = vectors.iter().map(|(_, c)| c).sum();
    if total <= 0.0 {
        return Err(Error::InvalidArgument("combination weights are all zero".into()));
    }
    if let [(v, _)] = vectors {
        return Ok((*v).clone());
    }
    let mut out = WeightVector::zeros(n);
    for (v, c) in vectors {
        let c = c / total;
        if c > 0.0 {
            for (o, x) in out.weights.iter_mut().zip(&v.weights) {
                *o += c * x;
            }
        }
        out.iterations = out.iterations.max(v.iterations);
        out.edges_traversed += v.edges_traversed;
    }
    Ok(out)
}

/// Write-once store of per-node PathRank vectors, so users and documents
/// that recur across queries are spread only once.
#[derive(Debug)]
pub struct PathRankCache {
    pl: usize,
    norm: PathRankNorm,
    slots: Vec<OnceLock<Arc<WeightVector>>>,
}

impl PathRankCache {
    pub fn new(graph: &GraphModel, pl: usize, norm: PathRankNorm) -> Self {
        PathRankCache {
            pl,
            norm,
            slots: (0..graph.node_count()).map(|_| OnceLock::new()).collect(),
        }
    }

    pub fn get(&self, graph: &GraphModel, node: NodeId) -> Arc<WeightVector> {
        self.slots[node.index()]
            .get_or_init(|| Arc::new(pathrank_spread_with(graph, node, self.pl, self.norm)))
            .clone()
    }

    /// Number of vectors computed so far.
    pub fn filled(&self) -> usize {
        self.slots.iter().filter(|s| s.get().is_some()).count()
    }
}
