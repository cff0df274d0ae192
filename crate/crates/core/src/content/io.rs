use std::collections::BTreeMap;
use std::fs::File;
use std::io::{BufRead, BufReader};
use std::path::Path;

use super::{concatenate_title_variants, ContentSource};
use crate::error::{Error, Result};

/// Raw document texts read from a `document \t title \t fulltext` file.
/// A document may appear on several lines, one per title variant.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct ContentTable {
    titles: BTreeMap<String, Vec<String>>,
    fulltexts: BTreeMap<String, Vec<String>>,
}

impl ContentTable {
    pub fn insert(&mut self, document: &str, title: &str, fulltext: Option<&str>) {
        self.titles.entry(document.to_owned()).or_default().push(title.to_owned());
        let texts = self.fulltexts.entry(document.to_owned()).or_default();
        if let Some(ft) = fulltext.filter(|s| !s.is_empty()) {
            if !texts.iter().any(|t| t == ft) {
                texts.push(ft.to_owned());
            }
        }
    }

    pub fn len(&self) -> usize {
        self.titles.len()
    }

    pub fn is_empty(&self) -> bool {
        self.titles.is_empty()
    }

    /// One text per document for the chosen source. Title variants are
    /// concatenated.
    pub fn texts(&self, source: ContentSource) -> BTreeMap<String, String> {
        let map = match source {
            ContentSource::Title => &self.titles,
            ContentSource::Fulltext => &self.fulltexts,
        };
        map.iter()
            .map(|(id, variants)| (id.clone(), concatenate_title_variants(variants)))
            .collect()
    }
}

pub fn read_content_table<R: BufRead>(reader: R) -> Result<ContentTable> {
    let mut table = ContentTable::default();
    for (i, line) in reader.lines().enumerate() {
        let line = line?;
        let line = line.trim_end_matches('\r');
        if line.trim().is_empty() || line.starts_with('#') {
            continue;
        }
        let mut fields = line.splitn(3, '\t');
        let id = fields.next().unwrap_or("").trim();
        let Some(title) = fields.next() else {
            return Err(Error::Parse {
                line: i + 1,
                message: "expected `document \\t title [\\t fulltext]`".into(),
            });
        };
        if id.is_empty() {
            return Err(Error::Parse {
                line: i + 1,
                message: "empty document id".into(),
            });
        }
        table.insert(id, title, fields.next());
    }
    Ok(table)
}

pub fn read_content_file(path: impl AsRef<Path>) -> Result<ContentTable> {
    read_content_table(BufReader::new(File::open(path)?))
}
