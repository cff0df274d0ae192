//! Small hand-built folksonomies with known spreading behaviour, each with
//! its query post.

use chrono::{Duration, NaiveDate};

use crate::dataset::{Post, QueryPost, TaggingDataset};

fn dataset(posts: &[(&str, &str, &[&str])]) -> TaggingDataset {
    let start = NaiveDate::from_ymd_opt(2010, 1, 1)
        .unwrap()
        .and_hms_opt(12, 0, 0)
        .unwrap();
    TaggingDataset::new(
        posts
            .iter()
            .enumerate()
            .map(|(i, (u, d, t))| Post::new(u, d, t.iter().copied(), start + Duration::days(i as i64))),
    )
}

/// u1 has a three-tag post and a one-tag post sharing t3; query (u1, d3).
/// From u1, t3 receives 2/8 of the weight; d3 passes 1/2 to t4.
pub fn shared_tag() -> (TaggingDataset, QueryPost) {
    let ds = dataset(&[
        ("u1", "d1", &["t1", "t2", "t3"]),
        ("u1", "d2", &["t3"]),
        ("u2", "d1", &["t4"]),
        ("u3", "d2", &["t5"]),
        ("u4", "d3", &["t4"]),
    ]);
    (ds, QueryPost::new("u1", "d3"))
}

/// u1 used t1 and t2 once each. t1 is shared with a very active user u2,
/// t2 with u3 who has a single assignment. Query u1 on an unseen document.
pub fn swash_back() -> (TaggingDataset, QueryPost) {
    let mut posts: Vec<(&str, &str, &[&str])> = vec![
        ("u1", "d1", &["t1"]),
        ("u1", "d2", &["t2"]),
        ("u2", "d3", &["t1"]),
        ("u3", "d4", &["t2"]),
    ];
    const EXTRA: [(&str, &[&str]); 8] = [
        ("e1", &["x1"]),
        ("e2", &["x2"]),
        ("e3", &["x3"]),
        ("e4", &["x4"]),
        ("e5", &["x5"]),
        ("e6", &["x6"]),
        ("e7", &["x7"]),
        ("e8", &["x8"]),
    ];
    posts.extend(EXTRA.iter().map(|(d, t)| ("u2", *d, *t)));
    (dataset(&posts), QueryPost::new("u1", "dq"))
}

/// u1 tagged d1 with t1 and d2 with t2; d1 is popular with five other
/// users, d2 has no other posts. Query u1 on an unseen document.
pub fn triangle() -> (TaggingDataset, QueryPost) {
    let ds = dataset(&[
        ("u1", "d1", &["t1"]),
        ("u1", "d2", &["t2"]),
        ("u2", "d1", &["t3"]),
        ("u3", "d1", &["t4"]),
        ("u4", "d1", &["t5"]),
        ("u5", "d1", &["t6"]),
        ("u6", "d1", &["t7"]),
    ]);
    (ds, QueryPost::new("u1", "dq"))
}

/// Query (u1, d3) whose immediate neighbourhood holds t1 to t6; t7 is only
/// reachable through the deeper graph.
pub fn deep() -> (TaggingDataset, QueryPost) {
    let ds = dataset(&[
        ("u1", "d1", &["t1", "t2"]),
        ("u1", "d2", &["t2", "t3", "t4"]),
        ("u2", "d3", &["t1"]),
        ("u3", "d3", &["t5", "t6"]),
        ("u3", "d4", &["t7"]),
        ("u4", "d2", &["t7"]),
        ("u4", "d5", &["t6"]),
    ]);
    (ds, QueryPost::new("u1", "d3"))
}

/// Every fixture with its name.
pub fn all() -> Vec<(&'static str, TaggingDataset, QueryPost)> {
    let named: [(&'static str, fn() -> (TaggingDataset, QueryPost)); 4] = [
        ("shared-tag", shared_tag),
        ("swash-back", swash_back),
        ("triangle", triangle),
        ("deep", deep),
    ];
    named
        .into_iter()
        .map(|(name, f)| {
            let (ds, q) = f();
            (name, ds, q)
        })
        .collect()
}
