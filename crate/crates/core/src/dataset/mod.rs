//! Tagging data: posts, tag assignments and the preprocessing protocol
//! (cleaning, post-cores, splits, sampling).

mod clean;
mod io;
mod max_recall;
mod postcore;
mod sample;
mod split;

use std::collections::{BTreeMap, BTreeSet};

use chrono::{DateTime, NaiveDate, NaiveDateTime};

pub use clean::{clean_tags, CleaningProfile};
pub use io::{
    parse_posts, parse_posts_with, read_posts_file, write_posts, write_posts_file, write_queries,
    ColumnMapping, ParseReport,
};
pub use max_recall::{theoretical_max_recall, MaxRecall};
pub use postcore::{compute_post_core, compute_post_core_with, CoreGranularity};
pub use sample::{stratified_sample, SampleManifest, Stratum};
pub use split::{date_split, leave_one_out_split, TestWindow};

use crate::error::{Error, Result};

pub type Timestamp = NaiveDateTime;

/// A single `(user, document, tag)` triple.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct TagAssignment {
    pub user: String,
    pub document: String,
    pub tag: String,
}

/// One user's complete tag set for one document.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Post {
    pub user: String,
    pub document: String,
    pub tags: BTreeSet<String>,
    pub timestamp: Timestamp,
}

impl Post {
    pub fn new<I, S>(user: &str, document: &str, tags: I, timestamp: Timestamp) -> Self
    where
        I: IntoIterator<Item = S>,
        S: Into<String>,
    {
        Post {
            user: user.to_owned(),
            document: document.to_owned(),
            tags: tags.into_iter().map(Into::into).collect(),
            timestamp,
        }
    }

    pub fn key(&self) -> (&str, &str) {
        (&self.user, &self.document)
    }

    pub fn assignments(&self) -> impl Iterator<Item = TagAssignment> + '_ {
        self.tags.iter().map(move |t| TagAssignment {
            user: self.user.clone(),
            document: self.document.clone(),
            tag: t.clone(),
        })
    }

    pub fn to_query(&self) -> QueryPost {
        QueryPost {
            user: self.user.clone(),
            document: self.document.clone(),
            true_tags: Some(self.tags.clone()),
            timestamp: Some(self.timestamp),
        }
    }
}

/// A post whose tags are to be predicted. `true_tags` is only known in
/// evaluation. Neither the user nor the document has to exist in training.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct QueryPost {
    pub user: String,
    pub document: String,
    pub true_tags: Option<BTreeSet<String>>,
    pub timestamp: Option<Timestamp>,
}

impl QueryPost {
    pub fn new(user: &str, document: &str) -> Self {
        QueryPost {
            user: user.to_owned(),
            document: document.to_owned(),
            true_tags: None,
            timestamp: None,
        }
    }
}

/// Immutable collection of posts with per-user, per-document and per-tag
/// indexes.
///
/// Posts are kept in canonical `(timestamp, user, document)` order and every
/// `(user, document)` pair occurs at most once.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct TaggingDataset {
    posts: Vec<Post>,
    users: BTreeMap<String, Vec<usize>>,
    documents: BTreeMap<String, Vec<usize>>,
    tags: BTreeMap<String, Vec<usize>>,
}

impl TaggingDataset {
    /// Builds a dataset, dropping tag-less posts. When the same
    /// `(user, document)` pair occurs more than once the latest post wins;
    /// posts sharing that latest timestamp are merged.
    pub fn new<I: IntoIterator<Item = Post>>(posts: I) -> Self {
        let mut latest: BTreeMap<(String, String), Post> = BTreeMap::new();
        for post in posts {
            if post.tags.is_empty() {
                continue;
            }
            let key = (post.user.clone(), post.document.clone());
            match latest.get_mut(&key) {
                Some(kept) if kept.timestamp == post.timestamp => kept.tags.extend(post.tags),
                Some(kept) if kept.timestamp < post.timestamp => *kept = post,
                Some(_) => {}
                None => {
                    latest.insert(key, post);
                }
            }
        }
        let mut posts: Vec<Post> = latest.into_values().collect();
        posts.sort_by(|a, b| {
            (a.timestamp, &a.user, &a.document).cmp(&(b.timestamp, &b.user, &b.document))
        });
        Self::from_canonical(posts)
    }

    fn from_canonical(posts: Vec<Post>) -> Self {
        let mut users: BTreeMap<String, Vec<usize>> = BTreeMap::new();
        let mut documents: BTreeMap<String, Vec<usize>> = BTreeMap::new();
        let mut tags: BTreeMap<String, Vec<usize>> = BTreeMap::new();
        for (i, p) in posts.iter().enumerate() {
            users.entry(p.user.clone()).or_default().push(i);
            documents.entry(p.document.clone()).or_default().push(i);
            for t in &p.tags {
                tags.entry(t.clone()).or_default().push(i);
            }
        }
        TaggingDataset {
            posts,
            users,
            documents,
            tags,
        }
    }

    pub fn posts(&self) -> &[Post] {
        &self.posts
    }

    pub fn len(&self) -> usize {
        self.posts.len()
    }

    pub fn is_empty(&self) -> bool {
        self.posts.is_empty()
    }

    pub fn assignment_count(&self) -> usize {
        self.posts.iter().map(|p| p.tags.len()).sum()
    }

    pub fn assignments(&self) -> impl Iterator<Item = TagAssignment> + '_ {
        self.posts.iter().flat_map(Post::assignments)
    }

    pub fn users(&self) -> impl Iterator<Item = &str> {
        self.users.keys().map(String::as_str)
    }

    pub fn documents(&self) -> impl Iterator<Item = &str> {
        self.documents.keys().map(String::as_str)
    }

    pub fn tags(&self) -> impl Iterator<Item = &str> {
        self.tags.keys().map(String::as_str)
    }

    pub fn user_count(&self) -> usize {
        self.users.len()
    }

    pub fn document_count(&self) -> usize {
        self.documents.len()
    }

    pub fn tag_count(&self) -> usize {
        self.tags.len()
    }

    pub fn has_user(&self, user: &str) -> bool {
        self.users.contains_key(user)
    }

    pub fn has_document(&self, document: &str) -> bool {
        self.documents.contains_key(document)
    }

    pub fn has_tag(&self, tag: &str) -> bool {
        self.tags.contains_key(tag)
    }

    pub fn posts_of_user<'a>(&'a self, user: &str) -> impl Iterator<Item = &'a Post> + 'a {
        self.indexed(self.users.get(user))
    }

    pub fn posts_of_document<'a>(&'a self, document: &str) -> impl Iterator<Item = &'a Post> + 'a {
        self.indexed(self.documents.get(document))
    }

    pub fn posts_of_tag<'a>(&'a self, tag: &str) -> impl Iterator<Item = &'a Post> + 'a {
        self.indexed(self.tags.get(tag))
    }

    fn indexed<'a>(&'a self, ids: Option<&'a Vec<usize>>) -> impl Iterator<Item = &'a Post> + 'a {
        ids.into_iter().flatten().map(move |&i| &self.posts[i])
    }

    /// Number of posts each tag occurs in.
    pub fn tag_frequencies(&self) -> impl Iterator<Item = (&str, usize)> {
        self.tags.iter().map(|(t, ids)| (t.as_str(), ids.len()))
    }

    pub fn time_range(&self) -> Option<(Timestamp, Timestamp)> {
        Some((self.posts.first()?.timestamp, self.posts.last()?.timestamp))
    }

    pub fn to_queries(&self) -> Vec<QueryPost> {
        self.posts.iter().map(Post::to_query).collect()
    }
}

/// Parses an ISO-8601 timestamp: RFC 3339 with offset, a naive date-time
/// (`T` or space separated), or a bare date. Offsets are converted to UTC.
pub fn parse_timestamp(s: &str) -> Result<Timestamp> {
    let s = s.trim();
    if let Ok(dt) = DateTime::parse_from_rfc3339(s) {
        return Ok(dt.naive_utc());
    }
    for fmt in ["%Y-%m-%dT%H:%M:%S%.f", "%Y-%m-%d %H:%M:%S%.f", "%Y-%m-%dT%H:%M"] {
        if let Ok(dt) = NaiveDateTime::parse_from_str(s, fmt) {
            return Ok(dt);
        }
    }
    if let Ok(d) = NaiveDate::parse_from_str(s, "%Y-%m-%d") {
        return Ok(d.and_hms_opt(0, 0, 0).expect("midnight is valid"));
    }
    Err(Error::InvalidArgument(format!("unparseable timestamp `{s}`")))
}

pub fn format_timestamp(ts: &Timestamp) -> String {
    ts.format("%Y-%m-%dT%H:%M:%S%.fZ").to_string()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn day(d: u32) -> Timestamp {
        NaiveDate::from_ymd_opt(2020, 1, d).unwrap().and_hms_opt(0, 0, 0).unwrap()
    }

    #[test]
    fn indexes_are_consistent_with_posts() {
        let ds = TaggingDataset::new(vec![
            Post::new("u1", "d1", ["a", "b"], day(1)),
            Post::new("u2", "d1", ["b"], day(2)),
        ]);
        assert_eq!(ds.user_count(), 2);
        assert_eq!(ds.document_count(), 1);
        assert_eq!(ds.posts_of_tag("b").count(), 2);
        assert_eq!(ds.posts_of_document("d1").count(), 2);
        assert_eq!(ds.posts_of_user("nobody").count(), 0);
        assert_eq!(ds.assignment_count(), 3);
    }

    #[test]
    fn latest_post_per_pair_wins() {
        let ds = TaggingDataset::new(vec![
            Post::new("u1", "d1", ["old"], day(1)),
            Post::new("u1", "d1", ["new"], day(3)),
            Post::new("u1", "d1", ["also"], day(3)),
        ]);
        assert_eq!(ds.len(), 1);
        let tags: Vec<_> = ds.posts()[0].tags.iter().map(String::as_str).collect();
        assert_eq!(tags, ["also", "new"]);
    }

    #[test]
    fn tagless_posts_are_dropped() {
        let ds = TaggingDataset::new(vec![Post::new("u1", "d1", Vec::<String>::new(), day(1))]);
        assert!(ds.is_empty());
    }

    #[test]
    fn timestamp_formats() {
        let want = NaiveDate::from_ymd_opt(2012, 5, 1).unwrap().and_hms_opt(10, 30, 0).unwrap();
        assert_eq!(parse_timestamp("2012-05-01T10:30:00").unwrap(), want);
        assert_eq!(parse_timestamp("2012-05-01 10:30:00").unwrap(), want);
        assert_eq!(parse_timestamp("2012-05-01T12:30:00+02:00").unwrap(), want);
        assert_eq!(parse_timestamp("2012-05-01T10:30:00Z").unwrap(), want);
        assert_eq!(
            parse_timestamp("2012-05-01").unwrap(),
            want.date().and_hms_opt(0, 0, 0).unwrap()
        );
        assert!(parse_timestamp("yesterday").is_err());
        assert_eq!(parse_timestamp(&format_timestamp(&want)).unwrap(), want);
    }
}
