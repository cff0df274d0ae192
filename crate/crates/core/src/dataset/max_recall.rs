use std::collections::HashSet;

use serde::Serialize;

use super::{QueryPost, TaggingDataset};
use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct MaxRecall {
    pub n: usize,
    pub recall: f64,
    /// Test posts that entered the mean (those with at least one true tag).
    pub posts: usize,
}

/// Best recall@N any recommender restricted to training tags can reach:
/// per post `min(N, |true tags known in train|) / |true tags|`, averaged
/// over posts.
pub fn theoretical_max_recall(
    train: &TaggingDataset,
    test: &[QueryPost],
    n_values: &[usize],
) -> Result<Vec<MaxRecall>> {
    let known: HashSet<&str> = train.tags().collect();
    let per_post: Vec<(usize, usize)> = test
        .iter()
        .filter_map(|q| q.true_tags.as_ref())
        .filter(|tags| !tags.is_empty())
        .map(|tags| {
            let present = tags.iter().filter(|t| known.contains(t.as_str())).count();
            (present, tags.len())
        })
        .collect();
    if per_post.is_empty() {
        return Err(Error::Empty("max recall needs test posts with true tags"));
    }
    n_values
        .iter()
        .map(|&n| {
            if n == 0 {
                return Err(Error::InvalidArgument("N must be positive".into()));
            }
            let sum: f64 = per_post
                .iter()
                .map(|&(present, total)| present.min(n) as f64 / total as f64)
                .sum();
            Ok(MaxRecall {
                n,
                recall: sum / per_post.len() as f64,
                posts: per_post.len(),
            })
        })
        .collect()
}
