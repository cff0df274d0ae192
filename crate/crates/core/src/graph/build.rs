use std::collections::BTreeSet;

use super::{GraphBuilder, GraphModel, GraphVariant, NodeKind};
use crate::content::DocumentContentModel;
use crate::dataset::TaggingDataset;
use crate::error::{Error, Result};

/// Interns users, documents and tags in sorted order so node ids are stable
/// for a given dataset.
fn intern_udt(train: &TaggingDataset, b: &mut GraphBuilder) {
    for u in train.users() {
        b.node(NodeKind::User, u);
    }
    for d in train.documents() {
        b.node(NodeKind::Document, d);
    }
    for t in train.tags() {
        b.node(NodeKind::Tag, t);
    }
}

fn tripartite(train: &TaggingDataset, unit_user_document: bool) -> GraphBuilder {
    let mut b = GraphBuilder::new();
    intern_udt(train, &mut b);
    for post in train.posts() {
        let u = b.node(NodeKind::User, &post.user);
        let d = b.node(NodeKind::Document, &post.document);
        if unit_user_document {
            b.set_edge(u, d, 1.0);
        } else {
            b.add_edge(u, d, post.tags.len() as f64);
        }
        for tag in &post.tags {
            let t = b.node(NodeKind::Tag, tag);
            b.add_edge(u, t, 1.0);
            b.add_edge(d, t, 1.0);
        }
    }
    b
}

/// Tripartite graph where each edge counts the tag assignments that contain
/// both endpoints.
pub fn build_folksonomy_graph(train: &TaggingDataset) -> GraphModel {
    tripartite(train, false).finish(GraphVariant::Folksonomy)
}

/// Like [`build_folksonomy_graph`] with every user-document edge at weight 1.
pub fn build_adapted_graph(train: &TaggingDataset) -> GraphModel {
    tripartite(train, true).finish(GraphVariant::Adapted)
}

/// One node per post, labelled by its position in the dataset. Users and
/// documents attach to posts with weight 1; each of a post's tags with
/// weight `1 / |tags|`.
pub fn build_post_graph(train: &TaggingDataset) -> GraphModel {
    let mut b = GraphBuilder::new();
    intern_udt(train, &mut b);
    for (i, post) in train.posts().iter().enumerate() {
        let p = b.node(NodeKind::Post, &format!("p{i}"));
        let u = b.node(NodeKind::User, &post.user);
        let d = b.node(NodeKind::Document, &post.document);
        b.add_edge(p, u, 1.0);
        b.add_edge(p, d, 1.0);
        let share = 1.0 / post.tags.len() as f64;
        for tag in &post.tags {
            let t = b.node(NodeKind::Tag, tag);
            b.add_edge(p, t, share);
        }
    }
    b.finish(GraphVariant::Post)
}

/// Users, tags and content words. User-word and word-tag edges sum the
/// Tf-Idf score of the word in each connecting post's document; user-tag
/// edges count posts. Documents missing from `content` add no word edges.
pub fn build_content_graph(train: &TaggingDataset, content: &DocumentContentModel) -> GraphModel {
    let mut b = GraphBuilder::new();
    for u in train.users() {
        b.node(NodeKind::User, u);
    }
    for t in train.tags() {
        b.node(NodeKind::Tag, t);
    }
    let words: BTreeSet<&str> = train
        .documents()
        .filter_map(|d| content.vector(d))
        .flat_map(|v| v.keys().map(String::as_str))
        .collect();
    for w in words {
        b.node(NodeKind::Word, w);
    }

    for post in train.posts() {
        let u = b.node(NodeKind::User, &post.user);
        let tags: Vec<_> = post.tags.iter().map(|t| b.node(NodeKind::Tag, t)).collect();
        for &t in &tags {
            b.add_edge(u, t, 1.0);
        }
        let Some(vector) = content.vector(&post.document) else {
            continue;
        };
        for (word, &score) in vector {
            let w = b.node(NodeKind::Word, word);
            b.add_edge(u, w, score);
            for &t in &tags {
                b.add_edge(w, t, score);
            }
        }
    }
    b.finish(GraphVariant::Content)
}

/// Builds the requested variant; the content variant needs a content model.
pub fn build_graph(
    variant: GraphVariant,
    train: &TaggingDataset,
    content: Option<&DocumentContentModel>,
) -> Result<GraphModel> {
    Ok(match variant {
        GraphVariant::Folksonomy => build_folksonomy_graph(train),
        GraphVariant::Adapted => build_adapted_graph(train),
        GraphVariant::Post => build_post_graph(train),
        GraphVariant::Content => {
            let content = content.ok_or_else(|| {
                Error::Config("the content graph needs a document content model".into())
            })?;
            build_content_graph(train, content)
        }
    })
}

#[cfg(test)]
mod tests {
    use std::collections::BTreeMap;

    use super::*;
    use crate::content::compute_tfidf;
    use crate::dataset::Post;
    use chrono::NaiveDate;

    fn ts(day: u32) -> crate::dataset::Timestamp {
        NaiveDate::from_ymd_opt(2010, 1, day).unwrap().and_hms_opt(0, 0, 0).unwrap()
    }

    fn ds(posts: &[(&str, &str, &[&str])]) -> TaggingDataset {
        TaggingDataset::new(
            posts
                .iter()
                .enumerate()
                .map(|(i, (u, d, t))| Post::new(u, d, t.iter().copied(), ts(i as u32 + 1))),
        )
    }

    fn w(g: &GraphModel, a: (NodeKind, &str), b: (NodeKind, &str)) -> Option<f64> {
        g.edge_weight(g.node(a.0, a.1)?, g.node(b.0, b.1)?)
    }

    use NodeKind::*;

    #[test]
    fn folksonomy_counts_assignments() {
        let g = build_folksonomy_graph(&ds(&[("u1", "d1", &["t1", "t2", "t3"]), ("u1", "d2", &["t3"])]));
        g.validate().unwrap();
        assert_eq!(w(&g, (User, "u1"), (Document, "d1")), Some(3.0));
        assert_eq!(w(&g, (User, "u1"), (Document, "d2")), Some(1.0));
        assert_eq!(w(&g, (User, "u1"), (Tag, "t3")), Some(2.0));
        assert_eq!(w(&g, (Document, "d1"), (Tag, "t1")), Some(1.0));
    }

    #[test]
    fn adapted_unit_user_document() {
        let data = ds(&[("u1", "d1", &["t1", "t2", "t3"])]);
        let g = build_adapted_graph(&data);
        g.validate().unwrap();
        assert_eq!(w(&g, (User, "u1"), (Document, "d1")), Some(1.0));
        assert_eq!(w(&g, (User, "u1"), (Tag, "t2")), Some(1.0));
        assert_eq!(w(&g, (Document, "d1"), (Tag, "t2")), Some(1.0));
    }

    #[test]
    fn post_graph_edges() {
        let g = build_post_graph(&ds(&[("u1", "d1", &["t1", "t2", "t3"])]));
        g.validate().unwrap();
        assert_eq!(w(&g, (Post, "p0"), (User, "u1")), Some(1.0));
        assert_eq!(w(&g, (Post, "p0"), (Document, "d1")), Some(1.0));
        for t in ["t1", "t2", "t3"] {
            assert_eq!(w(&g, (Post, "p0"), (Tag, t)), Some(1.0 / 3.0));
        }
        assert_eq!(w(&g, (User, "u1"), (Tag, "t1")), None);
        assert_eq!(g.node_count(), 1 + 1 + 3 + 1);
    }

    #[test]
    fn content_graph_sums_scores() {
        let data = ds(&[("u1", "d1", &["t1"]), ("u1", "d2", &["t2"]), ("u1", "d3", &["t1"])]);
        let mut corpus = BTreeMap::new();
        corpus.insert("d1".to_owned(), vec!["alpha".to_owned(), "beta".to_owned()]);
        corpus.insert("d2".to_owned(), vec!["alpha".to_owned(), "gamma".to_owned()]);
        corpus.insert("d4".to_owned(), vec!["delta".to_owned()]);
        let model = compute_tfidf(&corpus).unwrap();
        let g = build_content_graph(&data, &model);
        g.validate().unwrap();
        let a1 = model.vector("d1").unwrap()["alpha"];
        let a2 = model.vector("d2").unwrap()["alpha"];
        assert!((w(&g, (User, "u1"), (Word, "alpha")).unwrap() - (a1 + a2)).abs() < 1e-12);
        assert!((w(&g, (Word, "alpha"), (Tag, "t1")).unwrap() - a1).abs() < 1e-12);
        assert_eq!(w(&g, (User, "u1"), (Tag, "t1")), Some(2.0));
        assert!(g.node(Word, "delta").is_none());
        assert!(g.node(Document, "d1").is_none());
    }

    #[test]
    fn content_variant_requires_model() {
        let data = ds(&[("u1", "d1", &["t1"])]);
        assert!(build_graph(GraphVariant::Content, &data, None).is_err());
    }
}
