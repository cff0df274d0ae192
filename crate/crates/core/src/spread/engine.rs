use std::sync::{Arc, OnceLock};

use super::folkrank::differential_from_global;
use super::ranking::tag_score_vec;
use super::{
    combine_weight_vectors, folkrank_spread, folkrank_spread_observed, make_preference_vector,
    original_balance, pathrank_spread_with, uniform_preferences, with_background, Balance, DocumentPrefs,
    EngineConfig, PathRankCache, PreferenceVector, RankingMode, SpreaderKind, TagRanking,
    WeightVector,
};
use crate::content::{top_k_similar, DocumentContentModel, WordVector};
use crate::dataset::{QueryPost, TaggingDataset};
use crate::error::{Error, Result};
use crate::graph::{build_graph, GraphModel, NodeKind};

/// A configured graph recommender. Shared read-only across threads; the
/// global ranking and the optional PathRank cache fill lazily.
#[derive(Debug)]
pub struct Recommender {
    config: EngineConfig,
    graph: GraphModel,
    content: Option<DocumentContentModel>,
    b: f64,
    global_weights: OnceLock<Arc<WeightVector>>,
    global_ranking: OnceLock<Arc<TagRanking>>,
    cache: Option<PathRankCache>,
}

impl Recommender {
    /// Builds the configured graph variant from `train`.
    pub fn new(
        config: EngineConfig,
        train: &TaggingDataset,
        content: Option<DocumentContentModel>,
    ) -> Result<Self> {
        config.validate()?;
        let graph = build_graph(config.variant, train, content.as_ref())?;
        Self::from_graph(config, graph, content)
    }

    pub fn from_graph(
        config: EngineConfig,
        graph: GraphModel,
        content: Option<DocumentContentModel>,
    ) -> Result<Self> {
        config.validate()?;
        if graph.variant() != config.variant {
            return Err(Error::Config(format!(
                "config asks for a {} graph but got a {} graph",
                config.variant,
                graph.variant()
            )));
        }
        if config.needs_content() && content.is_none() {
            return Err(Error::Config(
                "this configuration needs a document content model".into(),
            ));
        }
        // surfaces a retrieval/variant mismatch before any query runs
        tag_score_vec(&vec![0.0; graph.node_count()], &graph, config.retrieval())?;
        let b = match config.b {
            Balance::Fixed(b) => b,
            Balance::Original => original_balance(&graph),
        };
        let cache = (config.spreader == SpreaderKind::PathRank && config.precompute)
            .then(|| PathRankCache::new(&graph, config.pl, config.pathrank_norm));
        Ok(Recommender {
            config,
            graph,
            content,
            b,
            global_weights: OnceLock::new(),
            global_ranking: OnceLock::new(),
            cache,
        })
    }

    pub fn config(&self) -> &EngineConfig {
        &self.config
    }

    pub fn graph(&self) -> &GraphModel {
        &self.graph
    }

    pub fn content(&self) -> Option<&DocumentContentModel> {
        self.content.as_ref()
    }

    /// The user share b actually used.
    pub fn balance(&self) -> f64 {
        self.b
    }

    pub fn preference_vector(&self, query: &QueryPost) -> Result<PreferenceVector> {
        let empty = WordVector::new();
        let sims;
        let doc_prefs = match &self.content {
            Some(content) if self.config.variant == crate::graph::GraphVariant::Content => {
                DocumentPrefs::Words(content.vector(&query.document).unwrap_or(&empty))
            }
            Some(content) if self.config.k_similar > 0 => {
                sims = top_k_similar(&query.document, content, self.config.k_similar, |d| {
                    self.graph.node(NodeKind::Document, d).is_some()
                });
                DocumentPrefs::Similar(&sims)
            }
            _ => DocumentPrefs::Query,
        };
        make_preference_vector(query, &self.graph, self.b, doc_prefs, self.config.tw)
    }

    /// Node weights for `prefs` under the configured spreader, with zero
    /// preference on every other node.
    pub fn spread(&self, prefs: &PreferenceVector) -> Result<WeightVector> {
        match self.config.spreader {
            SpreaderKind::Iterative => folkrank_spread(&self.graph, prefs, &self.config.spread_params()),
            SpreaderKind::PathRank => {
                let runs: Vec<(Arc<WeightVector>, f64)> = prefs
                    .entries()
                    .iter()
                    .map(|&(node, w)| {
                        let v = match &self.cache {
                            Some(cache) => cache.get(&self.graph, node),
                            None => Arc::new(pathrank_spread_with(
                                &self.graph,
                                node,
                                self.config.pl,
                                self.config.pathrank_norm,
                            )),
                        };
                        (v, w)
                    })
                    .collect();
                let refs: Vec<(&WeightVector, f64)> = runs.iter().map(|(v, w)| (&**v, *w)).collect();
                combine_weight_vectors(&refs)
            }
        }
    }

    fn global_weights(&self) -> Result<Arc<WeightVector>> {
        if let Some(w) = self.global_weights.get() {
            return Ok(w.clone());
        }
        let w = match self.config.spreader {
            SpreaderKind::Iterative => folkrank_spread_observed(
                &self.graph,
                &uniform_preferences(&self.graph, self.config.tw),
                &self.config.spread_params(),
                |_, _| {},
            )?,
            // PathRank has no global run; weighted degree stands in
            SpreaderKind::PathRank => WeightVector {
                weights: (0..self.graph.node_count())
                    .map(|i| self.graph.total_weight(crate::graph::NodeId(i as u32)))
                    .collect(),
                ..WeightVector::default()
            },
        };
        Ok(self.global_weights.get_or_init(|| Arc::new(w)).clone())
    }

    /// All tags with a positive global score, used when a query has no
    /// preference node in the graph.
    pub fn global_ranking(&self) -> Result<Arc<TagRanking>> {
        if let Some(r) = self.global_ranking.get() {
            return Ok(r.clone());
        }
        let weights = self.global_weights()?;
        let scores = tag_score_vec(&weights.weights, &self.graph, self.config.retrieval())?;
        let scale = weights.sum().max(f64::MIN_POSITIVE);
        let r = TagRanking::from_tag_vec(&self.graph, self.config.effective_mode(), &scores, scale, true);
        Ok(self.global_ranking.get_or_init(|| Arc::new(r)).clone())
    }

    /// Every candidate tag for `query`, best first.
    pub fn rank(&self, query: &QueryPost) -> Result<TagRanking> {
        let prefs = match self.preference_vector(query) {
            Ok(p) => p,
            Err(Error::NoPreferenceNodes) => return Ok((*self.global_ranking()?).clone()),
            Err(e) => return Err(e),
        };
        let retrieval = self.config.retrieval();
        let mode = self.config.effective_mode();
        match mode {
            RankingMode::Differential => {
                let global = self.global_weights()?;
                let personal = with_background(&self.graph, &prefs, self.config.tw, self.config.background)?;
                differential_from_global(&self.graph, &personal, &self.config.spread_params(), retrieval, &global)
            }
            RankingMode::ZeroPreference | RankingMode::PathRank => {
                let w = self.spread(&prefs)?;
                let scores = tag_score_vec(&w.weights, &self.graph, retrieval)?;
                let scale = match mode {
                    RankingMode::PathRank => 1.0,
                    _ => self.config.tw,
                };
                Ok(TagRanking::from_tag_vec(&self.graph, mode, &scores, scale, true))
            }
        }
    }

    /// The top `N` tags for `query`.
    pub fn recommend(&self, query: &QueryPost) -> Result<TagRanking> {
        let mut r = self.rank(query)?;
        r.truncate(self.config.n);
        Ok(r)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dataset::Post;
    use crate::fixtures;
    use chrono::NaiveDate;

    #[test]
    fn single_post() {
        let t = NaiveDate::from_ymd_opt(2013, 1, 1).unwrap().and_hms_opt(0, 0, 0).unwrap();
        let ds = TaggingDataset::new([Post::new("u1", "d1", ["t1"], t)]);
        for spreader in ["iterative", "pathrank"] {
            for mode in ["differential", "zero-pref"] {
                let cfg = EngineConfig::parse(&format!("spreader = {spreader}\nmode = {mode}")).unwrap();
                let rec = Recommender::new(cfg, &ds, None).unwrap();
                let r = rec.recommend(&QueryPost::new("u1", "d1")).unwrap();
                assert_eq!(r.tags().collect::<Vec<_>>(), ["t1"], "{spreader} {mode}");
            }
        }
    }

    #[test]
    fn unknown_query_falls_back_to_global() {
        let (ds, _) = fixtures::deep();
        let rec = Recommender::new(EngineConfig::default(), &ds, None).unwrap();
        let r = rec.recommend(&QueryPost::new("nobody", "nothing")).unwrap();
        let global = rec.global_ranking().unwrap();
        assert_eq!(r.entries, global.top(5).to_vec());
    }

    #[test]
    fn content_config_needs_model() {
        let (ds, _) = fixtures::deep();
        let cfg = EngineConfig::parse("k-similar = 3").unwrap();
        assert!(matches!(Recommender::new(cfg, &ds, None), Err(Error::Config(_))));
    }

    #[test]
    fn precompute_is_identical() {
        let (ds, q) = fixtures::deep();
        let direct = Recommender::new(EngineConfig::parse("spreader = pathrank\npl = 4").unwrap(), &ds, None)
            .unwrap();
        let cached = Recommender::new(
            EngineConfig::parse("spreader = pathrank\npl = 4\nprecompute = true").unwrap(),
            &ds,
            None,
        )
        .unwrap();
        for _ in 0..2 {
            assert_eq!(direct.rank(&q).unwrap(), cached.rank(&q).unwrap());
        }
    }
}
