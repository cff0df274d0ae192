//! Recall, precision and F1 over a test split.

mod output;

use std::collections::{BTreeSet, HashSet};
use std::time::Instant;

use rayon::prelude::*;
use serde::Serialize;

pub use output::{metadata_json, write_details_tsv, write_plot_dat, write_summary_csv};

use crate::content::DocumentContentModel;
use crate::dataset::{QueryPost, TaggingDataset};
use crate::error::{Error, Result};
use crate::spread::{EngineConfig, Recommender};

#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize)]
pub struct Metrics {
    pub recall: f64,
    pub precision: f64,
    pub f1: f64,
}

impl Metrics {
    pub fn from_pr(precision: f64, recall: f64) -> Self {
        let f1 = if precision + recall > 0.0 {
            2.0 * precision * recall / (precision + recall)
        } else {
            0.0
        };
        Metrics { recall, precision, f1 }
    }
}

/// Metrics of the first `n` recommendations against `true_tags`.
/// Precision divides by the number of tags actually recommended, which can
/// be below `n`. Returns `None` when `true_tags` is empty.
pub fn recall_precision_f1<S: AsRef<str>>(
    recommended: &[S],
    true_tags: &BTreeSet<String>,
    n: usize,
) -> Option<Metrics> {
    if true_tags.is_empty() {
        return None;
    }
    let top = &recommended[..n.min(recommended.len())];
    let mut seen: HashSet<&str> = HashSet::new();
    let hits = top
        .iter()
        .map(AsRef::as_ref)
        .filter(|t| seen.insert(t) && true_tags.contains(*t))
        .count();
    let recall = hits as f64 / true_tags.len() as f64;
    let precision = if top.is_empty() {
        0.0
    } else {
        hits as f64 / top.len() as f64
    };
    Some(Metrics::from_pr(precision, recall))
}

/// Anything that can produce an ordered tag list for a query post.
pub trait TagRecommender: Sync {
    fn recommend_tags(&self, query: &QueryPost, n: usize) -> Result<Vec<String>>;
}

impl TagRecommender for Recommender {
    fn recommend_tags(&self, query: &QueryPost, n: usize) -> Result<Vec<String>> {
        let ranking = self.rank(query)?;
        Ok(ranking.tags().take(n).map(str::to_owned).collect())
    }
}

/// Recommends exactly the true tags that occur in training, the best any
/// recommender restricted to training tags can do.
#[derive(Clone, Debug)]
pub struct OracleRecommender {
    known: HashSet<String>,
}

impl OracleRecommender {
    pub fn new(train: &TaggingDataset) -> Self {
        OracleRecommender {
            known: train.tags().map(str::to_owned).collect(),
        }
    }
}

impl TagRecommender for OracleRecommender {
    fn recommend_tags(&self, query: &QueryPost, n: usize) -> Result<Vec<String>> {
        Ok(query
            .true_tags
            .iter()
            .flatten()
            .filter(|t| self.known.contains(*t))
            .take(n)
            .cloned()
            .collect())
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct PostDetail {
    pub user: String,
    pub document: String,
    pub true_tags: Vec<String>,
    pub recommended: Vec<String>,
    /// One entry per evaluated N.
    pub metrics: Vec<Metrics>,
    pub error: Option<String>,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct SummaryRow {
    pub n: usize,
    pub recall: f64,
    pub precision: f64,
    pub f1: f64,
    pub posts: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct EvalResult {
    pub config_hash: String,
    pub seed: u64,
    pub n_values: Vec<usize>,
    pub summary: Vec<SummaryRow>,
    pub details: Vec<PostDetail>,
    /// Test posts without true tags, left out of all averages.
    pub excluded: usize,
    /// Posts where the recommender failed; scored 0.
    pub failures: usize,
    pub seconds: f64,
}

/// Evaluates `recommender` on every test post in parallel. Means are
/// macro averages over posts, accumulated in test order so results do not
/// depend on thread scheduling.
pub fn evaluate(
    recommender: &dyn TagRecommender,
    test: &[QueryPost],
    n_values: &[usize],
    config_hash: &str,
    seed: u64,
) -> Result<EvalResult> {
    let started = Instant::now();
    let mut ns = n_values.to_vec();
    ns.sort_unstable();
    ns.dedup();
    if ns.is_empty() || ns[0] == 0 {
        return Err(Error::InvalidArgument("N values must be positive and non-empty".into()));
    }
    let max_n = *ns.last().unwrap();

    let usable: Vec<(&QueryPost, &BTreeSet<String>)> = test
        .iter()
        .filter_map(|q| match &q.true_tags {
            Some(t) if !t.is_empty() => Some((q, t)),
            _ => None,
        })
        .collect();
    let excluded = test.len() - usable.len();

    let details: Vec<PostDetail> = usable
        .par_iter()
        .map(|(q, truth)| {
            let (recommended, error) = match recommender.recommend_tags(q, max_n) {
                Ok(tags) => (tags, None),
                Err(e) => (Vec::new(), Some(e.to_string())),
            };
            let metrics = ns
                .iter()
                .map(|&n| recall_precision_f1(&recommended, truth, n).unwrap_or_default())
                .collect();
            PostDetail {
                user: q.user.clone(),
                document: q.document.clone(),
                true_tags: truth.iter().cloned().collect(),
                recommended,
                metrics,
                error,
            }
        })
        .collect();
    let failures = details.iter().filter(|d| d.error.is_some()).count();

    let count = details.len();
    let summary = ns
        .iter()
        .enumerate()
        .map(|(k, &n)| {
            let (mut r, mut p, mut f) = (0.0, 0.0, 0.0);
            for d in &details {
                r += d.metrics[k].recall;
                p += d.metrics[k].precision;
                f += d.metrics[k].f1;
            }
            let c = count.max(1) as f64;
            SummaryRow {
                n,
                recall: r / c,
                precision: p / c,
                f1: f / c,
                posts: count,
            }
        })
        .collect();

    Ok(EvalResult {
        config_hash: config_hash.to_owned(),
        seed,
        n_values: ns,
        summary,
        details,
        excluded,
        failures,
        seconds: started.elapsed().as_secs_f64(),
    })
}

/// Builds the configured recommender on `train` and evaluates it on `test`.
pub fn run_experiment(
    train: &TaggingDataset,
    test: &[QueryPost],
    config: &EngineConfig,
    content: Option<DocumentContentModel>,
    n_values: &[usize],
) -> Result<EvalResult> {
    let recommender = Recommender::new(config.clone(), train, content)?;
    evaluate(&recommender, test, n_values, &config.hash(), config.seed)
}
