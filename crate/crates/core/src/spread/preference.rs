use crate::content::{SimilarityList, WordVector};
use crate::dataset::QueryPost;
use crate::error::{Error, Result};
use crate::graph::{GraphModel, NodeId, NodeKind};

/// Per-node preference weights summing to `total`.
#[derive(Clone, Debug, PartialEq)]
pub struct PreferenceVector {
    entries: Vec<(NodeId, f64)>,
    total: f64,
}

impl PreferenceVector {
    /// Merges duplicate nodes and drops zero entries. Fails on negative or
    /// non-finite weights.
    pub fn new(entries: impl IntoIterator<Item = (NodeId, f64)>) -> Result<Self> {
        let mut entries: Vec<(NodeId, f64)> = entries.into_iter().collect();
        if let Some((n, w)) = entries.iter().find(|(_, w)| !(w.is_finite() && *w >= 0.0)) {
            return Err(Error::InvalidArgument(format!(
                "preference weight {w} for node {}",
                n.0
            )));
        }
        entries.sort_by_key(|e| e.0);
        let mut merged: Vec<(NodeId, f64)> = Vec::with_capacity(entries.len());
        for (n, w) in entries {
            match merged.last_mut() {
                Some(last) if last.0 == n => last.1 += w,
                _ => merged.push((n, w)),
            }
        }
        merged.retain(|(_, w)| *w > 0.0);
        let total = merged.iter().map(|(_, w)| w).sum();
        Ok(PreferenceVector { entries: merged, total })
    }

    pub fn entries(&self) -> &[(NodeId, f64)] {
        &self.entries
    }

    /// PW, the sum of all preference weights.
    pub fn total(&self) -> f64 {
        self.total
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn get(&self, node: NodeId) -> f64 {
        self.entries
            .binary_search_by_key(&node, |e| e.0)
            .map(|i| self.entries[i].1)
            .unwrap_or(0.0)
    }

    pub fn to_dense(&self, n: usize) -> Vec<f64> {
        let mut p = vec![0.0; n];
        for &(node, w) in &self.entries {
            p[node.index()] = w;
        }
        p
    }
}

/// Where the document half of the preference weight goes.
#[derive(Clone, Copy, Debug)]
pub enum DocumentPrefs<'a> {
    /// The query document node itself.
    Query,
    /// Training documents weighted by normalized similarity to the query
    /// document.
    Similar(&'a SimilarityList),
    /// Content words of the query document weighted by normalized Tf-Idf.
    Words(&'a WordVector),
}

/// The balance used by the original FolkRank: `|U| / (|U| + |D|)`, giving
/// every user and document node the same share. On a content graph the
/// word nodes stand in for documents.
pub fn original_balance(graph: &GraphModel) -> f64 {
    let users = graph.count_of_kind(NodeKind::User) as f64;
    let docs = match graph.count_of_kind(NodeKind::Document) {
        0 => graph.count_of_kind(NodeKind::Word),
        n => n,
    } as f64;
    if users + docs == 0.0 {
        0.5
    } else {
        users / (users + docs)
    }
}

/// Preference vector for a query post. The query user gets `b * pw`, the
/// document side `(1 - b) * pw` spread over its nodes. Nodes missing from
/// the graph are skipped and the remaining nodes take over their share, so
/// the total stays `pw` whenever any side is present.
pub fn make_preference_vector(
    query: &QueryPost,
    graph: &GraphModel,
    b: f64,
    doc_prefs: DocumentPrefs<'_>,
    pw: f64,
) -> Result<PreferenceVector> {
    if !(0.0..=1.0).contains(&b) {
        return Err(Error::InvalidArgument(format!("b = {b} is outside [0, 1]")));
    }
    if !(pw.is_finite() && pw > 0.0) {
        return Err(Error::InvalidArgument(format!("preference total {pw} must be positive")));
    }
    let user = graph.node(NodeKind::User, &query.user);
    let doc_side: Vec<(NodeId, f64)> = match doc_prefs {
        DocumentPrefs::Query => graph
            .node(NodeKind::Document, &query.document)
            .map(|d| (d, 1.0))
            .into_iter()
            .collect(),
        DocumentPrefs::Similar(list) => list
            .entries
            .iter()
            .filter_map(|(d, s)| Some((graph.node(NodeKind::Document, d)?, *s)))
            .filter(|(_, s)| *s > 0.0)
            .collect(),
        DocumentPrefs::Words(vector) => vector
            .iter()
            .filter_map(|(w, s)| Some((graph.node(NodeKind::Word, w)?, *s)))
            .filter(|(_, s)| *s > 0.0)
            .collect(),
    };
    let doc_total: f64 = doc_side.iter().map(|(_, s)| s).sum();

    let (user_share, doc_share) = match (user.is_some(), doc_total > 0.0) {
        (false, false) => return Err(Error::NoPreferenceNodes),
        (true, true) => (b * pw, (1.0 - b) * pw),
        (true, false) => (pw, 0.0),
        (false, true) => (0.0, pw),
    };
    let mut entries = Vec::with_capacity(doc_side.len() + 1);
    if let Some(u) = user {
        entries.push((u, user_share));
    }
    entries.extend(doc_side.into_iter().map(|(n, s)| (n, s / doc_total * doc_share)));
    PreferenceVector::new(entries)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::build_folksonomy_graph;
    use crate::dataset::{Post, TaggingDataset};
    use chrono::NaiveDate;

    fn graph() -> GraphModel {
        let t = NaiveDate::from_ymd_opt(2012, 3, 4).unwrap().and_hms_opt(0, 0, 0).unwrap();
        build_folksonomy_graph(&TaggingDataset::new([
            Post::new("u1", "d1", ["t1"], t),
            Post::new("u1", "d2", ["t2"], t),
        ]))
    }

    #[test]
    fn both_sides_present() {
        let g = graph();
        let p = make_preference_vector(&QueryPost::new("u1", "d1"), &g, 0.5, DocumentPrefs::Query, 1.0)
            .unwrap();
        assert_eq!(p.get(g.node(NodeKind::User, "u1").unwrap()), 0.5);
        assert_eq!(p.get(g.node(NodeKind::Document, "d1").unwrap()), 0.5);
        assert_eq!(p.total(), 1.0);
    }

    #[test]
    fn similar_documents() {
        let g = graph();
        let sims = SimilarityList {
            query: "dx".into(),
            entries: vec![("d1".into(), 0.75), ("d2".into(), 0.25)],
        };
        let p = make_preference_vector(
            &QueryPost::new("u1", "dx"),
            &g,
            0.4,
            DocumentPrefs::Similar(&sims),
            1.0,
        )
        .unwrap();
        let get = |k, l| p.get(g.node(k, l).unwrap());
        assert!((get(NodeKind::User, "u1") - 0.4).abs() < 1e-12);
        assert!((get(NodeKind::Document, "d1") - 0.45).abs() < 1e-12);
        assert!((get(NodeKind::Document, "d2") - 0.15).abs() < 1e-12);
    }

    #[test]
    fn absent_side_is_reassigned() {
        let g = graph();
        let p = make_preference_vector(&QueryPost::new("u1", "new"), &g, 0.3, DocumentPrefs::Query, 1.0)
            .unwrap();
        assert_eq!(p.entries().len(), 1);
        assert_eq!(p.total(), 1.0);
        let p = make_preference_vector(&QueryPost::new("new", "d2"), &g, 0.3, DocumentPrefs::Query, 1.0)
            .unwrap();
        assert_eq!(p.get(g.node(NodeKind::Document, "d2").unwrap()), 1.0);
    }

    #[test]
    fn nothing_known_signals_fallback() {
        let g = graph();
        let err = make_preference_vector(&QueryPost::new("x", "y"), &g, 0.5, DocumentPrefs::Query, 1.0);
        assert!(matches!(err, Err(Error::NoPreferenceNodes)));
    }

    #[test]
    fn original_balance_counts_nodes() {
        // one user, two documents
        assert!((original_balance(&graph()) - 1.0 / 3.0).abs() < 1e-15);
    }

    #[test]
    fn rejects_bad_b() {
        let g = graph();
        assert!(make_preference_vector(&QueryPost::new("u1", "d1"), &g, 1.5, DocumentPrefs::Query, 1.0)
            .is_err());
    }
}
