use std::collections::{BTreeMap, HashSet};
use std::fs::File;
use std::io::{self, BufRead, BufReader, BufWriter, Write};
use std::path::Path;

use serde::Serialize;

use super::{format_timestamp, parse_timestamp, Post, QueryPost, TaggingDataset, Timestamp};
use crate::error::{Error, Result};

/// Zero-based column positions of the four fields in a tab-separated line.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct ColumnMapping {
    pub user: usize,
    pub document: usize,
    pub tag: usize,
    pub timestamp: usize,
}

impl Default for ColumnMapping {
    fn default() -> Self {
        ColumnMapping {
            user: 0,
            document: 1,
            tag: 2,
            timestamp: 3,
        }
    }
}

impl ColumnMapping {
    fn width(&self) -> usize {
        self.user.max(self.document).max(self.tag).max(self.timestamp) + 1
    }
}

#[derive(Debug, Default, Serialize)]
pub struct ParseReport {
    /// Non-blank, non-comment lines read.
    pub lines: usize,
    /// Lines skipped for a missing or empty field.
    pub malformed: usize,
    /// Lines skipped because the timestamp did not parse.
    pub bad_timestamps: usize,
    /// Exact repeats of an earlier `(user, document, tag, timestamp)` line.
    pub duplicates: usize,
    /// Distinct assignments that were replaced by a later post of the same
    /// user for the same document.
    pub superseded: usize,
    pub posts: usize,
    pub assignments: usize,
    #[serde(skip)]
    pub errors: Vec<Error>,
}

pub fn parse_posts<R: BufRead>(reader: R) -> Result<(TaggingDataset, ParseReport)> {
    parse_posts_with(reader, ColumnMapping::default())
}

/// Reads one tag assignment per line. Malformed lines are skipped and counted
/// rather than aborting the run; only I/O failures are returned as errors.
pub fn parse_posts_with<R: BufRead>(
    reader: R,
    mapping: ColumnMapping,
) -> Result<(TaggingDataset, ParseReport)> {
    let mut report = ParseReport::default();
    let width = mapping.width();
    let mut seen: HashSet<(String, String, String, Timestamp)> = HashSet::new();
    // (user, document, timestamp) -> tags
    let mut grouped: BTreeMap<(String, String, Timestamp), Vec<String>> = BTreeMap::new();

    for (i, line) in reader.lines().enumerate() {
        let line = line?;
        let line = line.trim_end_matches(['\r', '\n']);
        if line.trim().is_empty() || line.starts_with('#') {
            continue;
        }
        report.lines += 1;
        let fields: Vec<&str> = line.split('\t').collect();
        if fields.len() < width {
            report.malformed += 1;
            report.errors.push(Error::Parse {
                line: i + 1,
                message: format!("expected {width} tab-separated fields, found {}", fields.len()),
            });
            continue;
        }
        let user = fields[mapping.user].trim();
        let document = fields[mapping.document].trim();
        let tag = fields[mapping.tag].trim();
        if user.is_empty() || document.is_empty() || tag.is_empty() {
            report.malformed += 1;
            report.errors.push(Error::Parse {
                line: i + 1,
                message: "empty user, document or tag".into(),
            });
            continue;
        }
        let timestamp = match parse_timestamp(fields[mapping.timestamp]) {
            Ok(ts) => ts,
            Err(e) => {
                report.bad_timestamps += 1;
                report.errors.push(Error::Parse {
                    line: i + 1,
                    message: e.to_string(),
                });
                continue;
            }
        };
        if !seen.insert((user.into(), document.into(), tag.into(), timestamp)) {
            report.duplicates += 1;
            continue;
        }
        grouped
            .entry((user.into(), document.into(), timestamp))
            .or_default()
            .push(tag.into());
    }

    let distinct: usize = grouped.values().map(Vec::len).sum();
    let dataset = TaggingDataset::new(
        grouped
            .into_iter()
            .map(|((user, document, timestamp), tags)| Post {
                user,
                document,
                tags: tags.into_iter().collect(),
                timestamp,
            }),
    );
    report.posts = dataset.len();
    report.assignments = dataset.assignment_count();
    report.superseded = distinct - report.assignments;
    Ok((dataset, report))
}

pub fn read_posts_file(path: impl AsRef<Path>) -> Result<(TaggingDataset, ParseReport)> {
    let file = File::open(path.as_ref())?;
    parse_posts(BufReader::new(file))
}

/// Writes one `user \t document \t tag \t timestamp` line per assignment, in
/// canonical post order with tags sorted.
pub fn write_posts<W: Write>(dataset: &TaggingDataset, out: W) -> io::Result<()> {
    write_post_iter(dataset.posts().iter(), out)
}

pub fn write_posts_file(dataset: &TaggingDataset, path: impl AsRef<Path>) -> io::Result<()> {
    let file = File::create(path)?;
    let mut out = BufWriter::new(file);
    write_posts(dataset, &mut out)?;
    out.flush()
}

/// Writes query posts that carry their true tags and timestamps in the post
/// format; queries without either are rejected.
pub fn write_queries<W: Write>(queries: &[QueryPost], out: W) -> io::Result<()> {
    let posts = queries
        .iter()
        .map(|q| match (&q.true_tags, q.timestamp) {
            (Some(tags), Some(timestamp)) => Ok(Post {
                user: q.user.clone(),
                document: q.document.clone(),
                tags: tags.clone(),
                timestamp,
            }),
            _ => Err(io::Error::new(
                io::ErrorKind::InvalidInput,
                format!("query ({}, {}) has no tags or timestamp", q.user, q.document),
            )),
        })
        .collect::<io::Result<Vec<_>>>()?;
    write_post_iter(posts.iter(), out)
}

fn write_post_iter<'a, W: Write>(posts: impl Iterator<Item = &'a Post>, mut out: W) -> io::Result<()> {
    for p in posts {
        let ts = format_timestamp(&p.timestamp);
        for t in &p.tags {
            writeln!(out, "{}\t{}\t{}\t{}", p.user, p.document, t, ts)?;
        }
    }
    Ok(())
}
