use std::fmt;
use std::str::FromStr;

use super::{Post, TaggingDataset};
use crate::error::Error;

/// Dataset-specific tag filters applied after case folding.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum CleaningProfile {
    #[default]
    Generic,
    /// Drops the automatically generated import tags of CiteULike.
    CiteULike,
    /// Drops the over-represented placeholder tags of BibSonomy BibTeX.
    BibsonomyBibtex,
}

const CITEULIKE_EXACT: &[&str] = &["no-tag", "bibtex-import"];
const CITEULIKE_PATTERNS: &[&str] = &["*file-import*", "*import-*"];
const BIBSONOMY_BIBTEX_EXACT: &[&str] = &["jabrefnokeywordassigned", "myown"];

impl CleaningProfile {
    fn rejects(self, tag: &str) -> bool {
        match self {
            CleaningProfile::Generic => false,
            CleaningProfile::CiteULike => {
                CITEULIKE_EXACT.contains(&tag)
                    || CITEULIKE_PATTERNS.iter().any(|p| wildcard_match(p, tag))
            }
            CleaningProfile::BibsonomyBibtex => BIBSONOMY_BIBTEX_EXACT.contains(&tag),
        }
    }
}

impl FromStr for CleaningProfile {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "generic" => Ok(CleaningProfile::Generic),
            "citeulike" => Ok(CleaningProfile::CiteULike),
            "bibsonomy-bibtex" => Ok(CleaningProfile::BibsonomyBibtex),
            other => Err(Error::InvalidArgument(format!("unknown cleaning profile `{other}`"))),
        }
    }
}

impl fmt::Display for CleaningProfile {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            CleaningProfile::Generic => "generic",
            CleaningProfile::CiteULike => "citeulike",
            CleaningProfile::BibsonomyBibtex => "bibsonomy-bibtex",
        })
    }
}

/// Lower-cases every tag, drops the profile's junk tags and removes posts
/// left without tags. Duplicates created by case folding collapse because
/// a post's tags form a set.
pub fn clean_tags(dataset: &TaggingDataset, profile: CleaningProfile) -> TaggingDataset {
    TaggingDataset::new(dataset.posts().iter().map(|p| Post {
        user: p.user.clone(),
        document: p.document.clone(),
        tags: p
            .tags
            .iter()
            .map(|t| t.to_lowercase())
            .filter(|t| !t.is_empty() && !profile.rejects(t))
            .collect(),
        timestamp: p.timestamp,
    }))
}

/// Glob match where `*` matches any (possibly empty) run of characters.
fn wildcard_match(pattern: &str, text: &str) -> bool {
    let mut parts = pattern.split('*');
    let first = parts.next().unwrap_or("");
    let Some(mut rest) = text.strip_prefix(first) else {
        return false;
    };
    let mut parts: Vec<&str> = parts.collect();
    let Some(last) = parts.pop() else {
        // no `*` at all
        return rest.is_empty();
    };
    for part in parts {
        match rest.find(part) {
            Some(i) => rest = &rest[i + part.len()..],
            None => return false,
        }
    }
    rest.len() >= last.len() && rest.ends_with(last)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dataset::parse_timestamp;

    fn post(tags: &[&str]) -> TaggingDataset {
        let ts = parse_timestamp("2020-01-01").unwrap();
        TaggingDataset::new([Post::new("u1", "d1", tags.iter().copied(), ts)])
    }

    fn tags(ds: &TaggingDataset) -> Vec<&str> {
        ds.tags().collect()
    }

    #[test]
    fn case_fold_dedups() {
        let out = clean_tags(&post(&["Java", "java"]), CleaningProfile::Generic);
        assert_eq!(tags(&out), ["java"]);
        assert_eq!(out.assignment_count(), 1);
    }

    #[test]
    fn citeulike_import_patterns() {
        let out = clean_tags(&post(&["myfile-import-2009", "ml"]), CleaningProfile::CiteULike);
        assert_eq!(tags(&out), ["ml"]);
        let out = clean_tags(&post(&["Import-X", "bibtex-import", "ml"]), CleaningProfile::CiteULike);
        assert_eq!(tags(&out), ["ml"]);
    }

    #[test]
    fn post_without_remaining_tags_is_removed() {
        let out = clean_tags(&post(&["no-tag"]), CleaningProfile::CiteULike);
        assert!(out.is_empty());
    }

    #[test]
    fn generic_profile_keeps_import_tags() {
        let out = clean_tags(&post(&["no-tag"]), CleaningProfile::Generic);
        assert_eq!(tags(&out), ["no-tag"]);
    }

    #[test]
    fn bibsonomy_bibtex_profile() {
        let out = clean_tags(
            &post(&["JabRefNoKeywordAssigned", "myown", "graphs"]),
            CleaningProfile::BibsonomyBibtex,
        );
        assert_eq!(tags(&out), ["graphs"]);
    }

    #[test]
    fn wildcards() {
        assert!(wildcard_match("*file-import*", "file-import"));
        assert!(wildcard_match("*file-import*", "xfile-importy"));
        assert!(!wildcard_match("*file-import*", "file_import"));
        assert!(wildcard_match("*import-*", "import-"));
        assert!(!wildcard_match("*import-*", "imports"));
        assert!(wildcard_match("a*b*c", "abc"));
        assert!(wildcard_match("a*b*c", "axxbyyc"));
        assert!(!wildcard_match("a*b*c", "acb"));
        assert!(wildcard_match("exact", "exact"));
        assert!(!wildcard_match("exact", "exactly"));
        assert!(!wildcard_match("ab*ba", "aba"));
    }

    #[test]
    fn profile_names_round_trip() {
        for p in [
            CleaningProfile::Generic,
            CleaningProfile::CiteULike,
            CleaningProfile::BibsonomyBibtex,
        ] {
            assert_eq!(p.to_string().parse::<CleaningProfile>().unwrap(), p);
        }
        assert!("delicious".parse::<CleaningProfile>().is_err());
    }
}
