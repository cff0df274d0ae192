use std::collections::{BTreeMap, HashSet};

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use super::TaggingDataset;
use crate::error::{Error, Result};

/// One bin of documents sharing the same number of posts.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Stratum {
    pub posts_per_document: usize,
    pub documents: usize,
    pub sampled_documents: usize,
    pub sampled_posts: usize,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct SampleManifest {
    pub seed: u64,
    pub target_posts: usize,
    pub total_posts: usize,
    pub total_documents: usize,
    pub sampled_posts: usize,
    pub sampled_documents: usize,
    pub strata: Vec<Stratum>,
}

/// Draws documents stratified by their post count and keeps all of their
/// posts, stopping once at least `target_posts` posts are collected.
///
/// Each step takes a document from the bin that is furthest behind its
/// proportional share, so the sampled documents follow the input
/// distribution of documents over post counts. The seed decides which
/// documents are drawn within a bin and how bins tie.
pub fn stratified_sample(
    dataset: &TaggingDataset,
    target_posts: usize,
    seed: u64,
) -> Result<(TaggingDataset, SampleManifest)> {
    if target_posts == 0 {
        return Err(Error::InvalidArgument("sample target must be positive".into()));
    }
    if target_posts > dataset.len() {
        return Err(Error::SampleTooLarge {
            target: target_posts,
            available: dataset.len(),
        });
    }

    let mut bins: BTreeMap<usize, Vec<&str>> = BTreeMap::new();
    for doc in dataset.documents() {
        bins.entry(dataset.posts_of_document(doc).count()).or_default().push(doc);
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut bins: Vec<(usize, Vec<&str>)> = bins.into_iter().collect();
    for (_, docs) in &mut bins {
        docs.shuffle(&mut rng);
    }
    let mut priority: Vec<usize> = (0..bins.len()).collect();
    priority.shuffle(&mut rng);

    let mut drawn = vec![0usize; bins.len()];
    let mut chosen: HashSet<&str> = HashSet::new();
    let mut collected = 0usize;
    while collected < target_posts {
        let next = (0..bins.len())
            .filter(|&b| drawn[b] < bins[b].1.len())
            .min_by(|&a, &b| {
                // drawn[a]/size[a] vs drawn[b]/size[b], exactly
                let lhs = drawn[a] * bins[b].1.len();
                let rhs = drawn[b] * bins[a].1.len();
                lhs.cmp(&rhs).then(priority[a].cmp(&priority[b]))
            })
            .expect("target does not exceed available posts");
        let (posts_per_doc, docs) = &bins[next];
        chosen.insert(docs[drawn[next]]);
        drawn[next] += 1;
        collected += posts_per_doc;
    }

    let sample = TaggingDataset::new(
        dataset
            .posts()
            .iter()
            .filter(|p| chosen.contains(p.document.as_str()))
            .cloned(),
    );
    let strata = bins
        .iter()
        .zip(&drawn)
        .map(|((ppd, docs), &k)| Stratum {
            posts_per_document: *ppd,
            documents: docs.len(),
            sampled_documents: k,
            sampled_posts: k * ppd,
        })
        .collect();
    let manifest = SampleManifest {
        seed,
        target_posts,
        total_posts: dataset.len(),
        total_documents: dataset.document_count(),
        sampled_posts: sample.len(),
        sampled_documents: sample.document_count(),
        strata,
    };
    debug_assert_eq!(manifest.sampled_posts, collected);
    Ok((sample, manifest))
}


#[cfg(test)]
mod tests {
    use super::*;
    use crate::dataset::{parse_timestamp, Post};

    fn dataset(strata: &[(usize, usize)]) -> TaggingDataset {
        let ts = parse_timestamp("2020-01-01").unwrap();
        let mut posts = Vec::new();
        for &(docs, per_doc) in strata {
            for d in 0..docs {
                for u in 0..per_doc {
                    posts.push(Post::new(&format!("u{u}"), &format!("d{per_doc}_{d}"), ["t"], ts));
                }
            }
        }
        TaggingDataset::new(posts)
    }

    #[test]
    fn one_post_documents_hit_target_exactly() {
        let ds = dataset(&[(50, 1)]);
        let (s, m) = stratified_sample(&ds, 10, 7).unwrap();
        assert_eq!(s.len(), 10);
        assert_eq!(s.document_count(), 10);
        assert_eq!(m.sampled_posts, 10);
    }

    #[test]
    fn same_seed_same_sample() {
        let ds = dataset(&[(40, 1), (20, 2), (10, 5)]);
        let a = stratified_sample(&ds, 60, 11).unwrap();
        let b = stratified_sample(&ds, 60, 11).unwrap();
        assert_eq!(a, b);
        let c = stratified_sample(&ds, 60, 12).unwrap();
        assert_ne!(a.0, c.0);
    }

    #[test]
    fn all_posts_of_sampled_documents_are_kept() {
        let ds = dataset(&[(10, 1), (10, 3)]);
        let (s, _) = stratified_sample(&ds, 20, 3).unwrap();
        for doc in s.documents() {
            assert_eq!(s.posts_of_document(doc).count(), ds.posts_of_document(doc).count());
        }
        assert!(s.len() >= 20);
    }

    #[test]
    fn target_bounds() {
        let ds = dataset(&[(5, 1)]);
        assert!(matches!(
            stratified_sample(&ds, 6, 0),
            Err(Error::SampleTooLarge { target: 6, available: 5 })
        ));
        assert!(stratified_sample(&ds, 0, 0).is_err());
        let (all, _) = stratified_sample(&ds, 5, 0).unwrap();
        assert_eq!(all, ds);
    }
}
