//! Seeded synthetic folksonomies with timestamps and document titles, for
//! tests and benchmarks.

use std::collections::{BTreeSet, HashSet};

use chrono::{Datelike, Duration, Months, NaiveDate};
use rand::distr::weighted::WeightedIndex;
use rand::distr::Distribution;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::content::ContentTable;
use crate::dataset::{Post, TaggingDataset};

#[derive(Clone, Debug, PartialEq)]
pub struct SynthConfig {
    pub users: usize,
    pub documents: usize,
    pub tags: usize,
    /// Distinct (user, document) posts to generate. Capped by
    /// `users * documents`.
    pub posts: usize,
    pub max_tags_per_post: usize,
    /// Posts are spread evenly over this many calendar months.
    pub months: u32,
    /// Topics partition documents, tags and title words.
    pub topics: usize,
    pub vocabulary: usize,
    pub words_per_title: usize,
    pub start: NaiveDate,
    pub seed: u64,
}

impl Default for SynthConfig {
    fn default() -> Self {
        SynthConfig {
            users: 60,
            documents: 300,
            tags: 80,
            posts: 1000,
            max_tags_per_post: 4,
            months: 12,
            topics: 8,
            vocabulary: 400,
            words_per_title: 6,
            start: NaiveDate::from_ymd_opt(2008, 1, 1).unwrap(),
            seed: 7,
        }
    }
}

#[derive(Clone, Debug)]
pub struct SyntheticData {
    pub dataset: TaggingDataset,
    pub content: ContentTable,
}

/// Zipf-like weights `1 / (rank + 1)^s`.
fn zipf(n: usize, s: f64) -> WeightedIndex<f64> {
    WeightedIndex::new((0..n).map(|i| 1.0 / ((i + 1) as f64).powf(s))).expect("n > 0")
}

/// Generates a dataset with skewed user and document activity. Each
/// document belongs to a topic; tags are drawn mostly from the document's
/// topic and otherwise from the user's own favourite topic. Post `i` falls
/// in month `i * months / posts`.
pub fn generate(cfg: &SynthConfig) -> SyntheticData {
    assert!(cfg.users > 0 && cfg.documents > 0 && cfg.tags > 0 && cfg.topics > 0);
    assert!(cfg.max_tags_per_post > 0 && cfg.months > 0 && cfg.vocabulary > 0);
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let users = zipf(cfg.users, 0.9);
    let docs = zipf(cfg.documents, 0.7);
    let topics = cfg.topics.min(cfg.tags);
    let per_topic = cfg.tags.div_ceil(topics);
    let in_topic = zipf(per_topic, 1.0);
    let tag_count = zipf(cfg.max_tags_per_post, 1.2);
    let favourite: Vec<usize> = (0..cfg.users).map(|_| rng.random_range(0..topics)).collect();

    let target = cfg.posts.min(cfg.users * cfg.documents);
    let mut seen = HashSet::new();
    let mut posts = Vec::with_capacity(target);
    let mut attempts = 0usize;
    while posts.len() < target {
        attempts += 1;
        let (u, d) = if attempts > 50 * target {
            // dense request: walk the grid instead of sampling
            let k = seen.len();
            (k % cfg.users, k / cfg.users % cfg.documents)
        } else {
            (users.sample(&mut rng), docs.sample(&mut rng))
        };
        if !seen.insert((u, d)) {
            continue;
        }
        let n_tags = tag_count.sample(&mut rng) + 1;
        let mut tags = BTreeSet::new();
        for _ in 0..n_tags {
            let topic = if rng.random_bool(0.7) { d % topics } else { favourite[u] };
            let tag = (topic * per_topic + in_topic.sample(&mut rng)) % cfg.tags;
            tags.insert(format!("tag{tag}"));
        }
        let i = posts.len();
        let month = (i as u64 * cfg.months as u64 / target as u64) as u32;
        let first = cfg.start.with_day(1).unwrap() + Months::new(month);
        let days = (first + Months::new(1) - first).num_days();
        let ts = (first + Duration::days(rng.random_range(0..days)))
            .and_hms_opt(rng.random_range(0..24), rng.random_range(0..60), 0)
            .unwrap();
        posts.push(Post::new(&format!("user{u}"), &format!("doc{d}"), tags, ts));
    }

    let words_per_topic = cfg.vocabulary.div_ceil(topics).max(1);
    let word_pick = zipf(words_per_topic, 0.8);
    let mut content = ContentTable::default();
    for d in 0..cfg.documents {
        let topic = d % topics;
        let title: Vec<String> = (0..cfg.words_per_title)
            .map(|_| {
                let w = if rng.random_bool(0.8) {
                    topic * words_per_topic + word_pick.sample(&mut rng)
                } else {
                    rng.random_range(0..cfg.vocabulary)
                };
                format!("word{w}")
            })
            .collect();
        content.insert(&format!("doc{d}"), &title.join(" "), None);
    }

    SyntheticData {
        dataset: TaggingDataset::new(posts),
        content,
    }
}
