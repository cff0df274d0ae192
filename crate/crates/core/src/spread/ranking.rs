use std::fmt;
use std::str::FromStr;

use super::{RankingMode, WeightVector};
use crate::error::{Error, Result};
use crate::graph::{GraphModel, GraphVariant, NodeKind};

/// Scores closer than `TIE_TOLERANCE * tw` count as tied and are ordered by
/// tag name. This keeps ties stable under floating-point noise.
pub const TIE_TOLERANCE: f64 = 1e-12;

/// How tag scores are read off a weight vector.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash)]
pub enum TagRetrieval {
    /// The weight of the tag node.
    #[default]
    Direct,
    /// The summed weight of the post nodes a tag is attached to.
    PostSum,
}

impl TagRetrieval {
    pub fn as_str(self) -> &'static str {
        match self {
            TagRetrieval::Direct => "direct",
            TagRetrieval::PostSum => "post-sum",
        }
    }

    pub fn default_for(variant: GraphVariant) -> Self {
        match variant {
            GraphVariant::Post => TagRetrieval::PostSum,
            _ => TagRetrieval::Direct,
        }
    }
}

impl FromStr for TagRetrieval {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "direct" => Ok(TagRetrieval::Direct),
            "post-sum" => Ok(TagRetrieval::PostSum),
            other => Err(Error::InvalidArgument(format!("unknown tag retrieval `{other}`"))),
        }
    }
}

impl fmt::Display for TagRetrieval {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// Tags ordered by descending score, ties by tag name.
#[derive(Clone, Debug, PartialEq)]
pub struct TagRanking {
    pub mode: RankingMode,
    pub entries: Vec<(String, f64)>,
}

impl TagRanking {
    /// Sorts `entries`; scores within `TIE_TOLERANCE * tw` of their
    /// neighbour in the sorted order are grouped and ordered by name.
    pub fn new(mode: RankingMode, mut entries: Vec<(String, f64)>, tw: f64) -> Self {
        entries.sort_by(|a, b| b.1.total_cmp(&a.1).then_with(|| a.0.cmp(&b.0)));
        let tol = TIE_TOLERANCE * tw.abs();
        let mut start = 0;
        for i in 1..=entries.len() {
            if i == entries.len() || entries[i - 1].1 - entries[i].1 > tol {
                if i - start > 1 {
                    entries[start..i].sort_by(|a, b| a.0.cmp(&b.0));
                }
                start = i;
            }
        }
        TagRanking { mode, entries }
    }

    /// Ranking from scores indexed like `graph.nodes_of_kind(Tag)`.
    pub(crate) fn from_tag_vec(
        graph: &GraphModel,
        mode: RankingMode,
        scores: &[f64],
        tw: f64,
        positive_only: bool,
    ) -> Self {
        let entries = graph
            .nodes_of_kind(NodeKind::Tag)
            .iter()
            .zip(scores)
            .filter(|(_, s)| !positive_only || **s > 0.0)
            .map(|(t, s)| (graph.label(*t).to_owned(), *s))
            .collect();
        TagRanking::new(mode, entries, tw)
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn tags(&self) -> impl Iterator<Item = &str> {
        self.entries.iter().map(|(t, _)| t.as_str())
    }

    pub fn top(&self, n: usize) -> &[(String, f64)] {
        &self.entries[..n.min(self.entries.len())]
    }

    pub fn truncate(&mut self, n: usize) {
        self.entries.truncate(n);
    }

    pub fn score(&self, tag: &str) -> Option<f64> {
        self.entries.iter().find(|(t, _)| t == tag).map(|(_, s)| *s)
    }
}

/// Scores for every tag node, in `graph.nodes_of_kind(Tag)` order.
pub(crate) fn tag_score_vec(
    weights: &[f64],
    graph: &GraphModel,
    retrieval: TagRetrieval,
) -> Result<Vec<f64>> {
    let tags = graph.nodes_of_kind(NodeKind::Tag);
    match retrieval {
        TagRetrieval::Direct => Ok(tags.iter().map(|t| weights[t.index()]).collect()),
        TagRetrieval::PostSum => {
            if graph.variant() != GraphVariant::Post {
                return Err(Error::RetrievalMismatch {
                    retrieval: retrieval.as_str(),
                    variant: graph.variant().as_str(),
                });
            }
            Ok(tags
                .iter()
                .map(|&t| {
                    graph
                        .neighbors(t)
                        .filter(|(n, _)| graph.kind(*n) == NodeKind::Post)
                        .map(|(n, _)| weights[n.index()])
                        .sum()
                })
                .collect())
        }
    }
}

/// Ranks the tags with a positive score under `retrieval`.
pub fn tag_scores(
    weights: &WeightVector,
    graph: &GraphModel,
    retrieval: TagRetrieval,
    mode: RankingMode,
) -> Result<TagRanking> {
    let scores = tag_score_vec(&weights.weights, graph, retrieval)?;
    let tw = weights.sum().max(f64::MIN_POSITIVE);
    Ok(TagRanking::from_tag_vec(graph, mode, &scores, tw, true))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dataset::{Post, TaggingDataset};
    use crate::graph::{build_folksonomy_graph, build_post_graph};
    use chrono::NaiveDate;

    fn ds() -> TaggingDataset {
        let t = NaiveDate::from_ymd_opt(2009, 9, 9).unwrap().and_hms_opt(0, 0, 0).unwrap();
        TaggingDataset::new([
            Post::new("u1", "d1", ["t1", "t2", "t3"], t),
            Post::new("u2", "d2", ["t1"], t),
        ])
    }

    #[test]
    fn ties_break_by_name() {
        let r = TagRanking::new(
            RankingMode::ZeroPreference,
            vec![("b".into(), 0.5), ("c".into(), 0.7), ("a".into(), 0.5 + 1e-15)],
            1.0,
        );
        assert_eq!(r.tags().collect::<Vec<_>>(), ["c", "a", "b"]);
    }

    #[test]
    fn post_sum_ignores_tag_count() {
        let g = build_post_graph(&ds());
        let mut w = WeightVector::zeros(g.node_count());
        w.weights[g.node(NodeKind::Post, "p0").unwrap().index()] = 0.9;
        let r = tag_scores(&w, &g, TagRetrieval::PostSum, RankingMode::PathRank).unwrap();
        for t in ["t1", "t2", "t3"] {
            assert_eq!(r.score(t), Some(0.9));
        }
    }

    #[test]
    fn post_sum_adds_posts() {
        let g = build_post_graph(&ds());
        let mut w = WeightVector::zeros(g.node_count());
        w.weights[g.node(NodeKind::Post, "p0").unwrap().index()] = 0.4;
        w.weights[g.node(NodeKind::Post, "p1").unwrap().index()] = 0.2;
        let r = tag_scores(&w, &g, TagRetrieval::PostSum, RankingMode::PathRank).unwrap();
        assert!((r.score("t1").unwrap() - 0.6).abs() < 1e-15);
        assert_eq!(r.tags().next(), Some("t1"));
    }

    #[test]
    fn post_sum_needs_post_graph() {
        let g = build_folksonomy_graph(&ds());
        let w = WeightVector::zeros(g.node_count());
        assert!(matches!(
            tag_scores(&w, &g, TagRetrieval::PostSum, RankingMode::PathRank),
            Err(Error::RetrievalMismatch { .. })
        ));
    }

    #[test]
    fn direct_sorts_tag_weights() {
        let g = build_folksonomy_graph(&ds());
        let mut w = WeightVector::zeros(g.node_count());
        for (t, x) in [("t1", 0.1), ("t2", 0.3), ("t3", 0.2)] {
            w.weights[g.node(NodeKind::Tag, t).unwrap().index()] = x;
        }
        let r = tag_scores(&w, &g, TagRetrieval::Direct, RankingMode::ZeroPreference).unwrap();
        assert_eq!(r.tags().collect::<Vec<_>>(), ["t2", "t3", "t1"]);
    }
}
