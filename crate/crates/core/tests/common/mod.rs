#![allow(dead_code)]

use chrono::{Duration, NaiveDate};
use folkrank_core::{Post, TaggingDataset};
use proptest::collection::{btree_set, vec};
use proptest::prelude::*;

pub type RawPost = (usize, usize, Vec<usize>);

pub fn build(raw: &[RawPost]) -> TaggingDataset {
    let start = NaiveDate::from_ymd_opt(2011, 1, 1).unwrap().and_hms_opt(0, 0, 0).unwrap();
    TaggingDataset::new(raw.iter().enumerate().map(|(i, (u, d, tags))| {
        Post::new(
            &format!("u{u}"),
            &format!("d{d}"),
            tags.iter().map(|t| format!("t{t}")),
            start + Duration::hours(i as i64),
        )
    }))
}

/// Random folksonomies over small id ranges so entities recur.
pub fn datasets(max_posts: usize, users: usize, docs: usize, tags: usize) -> impl Strategy<Value = TaggingDataset> {
    vec(
        (0..users, 0..docs, btree_set(0..tags, 1..4).prop_map(|s| s.into_iter().collect())),
        1..=max_posts,
    )
    .prop_map(|raw: Vec<RawPost>| build(&raw))
}
