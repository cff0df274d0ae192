//! Bag-of-words document model with normalized Tf-Idf scores, cosine
//! similarity and top-k similar training documents.

mod io;
mod tokenize;

use std::collections::{BTreeMap, HashMap};
use std::fmt;
use std::str::FromStr;

pub use io::{read_content_file, read_content_table, ContentTable};
pub use tokenize::{
    concatenate_title_variants, Tokenizer, BUNDLED_STOP_WORDS, BUNDLED_STOP_WORDS_SHA256,
    MAX_WORD_LEN, MIN_WORD_LEN,
};

use crate::error::{Error, Result};

/// Word -> normalized Tf-Idf score. Words with a zero score are not stored.
pub type WordVector = BTreeMap<String, f64>;

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum ContentSource {
    #[default]
    Title,
    Fulltext,
}

impl FromStr for ContentSource {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "title" => Ok(ContentSource::Title),
            "fulltext" => Ok(ContentSource::Fulltext),
            other => Err(Error::InvalidArgument(format!("unknown content source `{other}`"))),
        }
    }
}

impl fmt::Display for ContentSource {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            ContentSource::Title => "title",
            ContentSource::Fulltext => "fulltext",
        })
    }
}

/// Per-document normalized Tf-Idf vectors over a fixed corpus.
#[derive(Clone, Debug)]
pub struct DocumentContentModel {
    vectors: BTreeMap<String, WordVector>,
    doc_freq: BTreeMap<String, usize>,
    source: ContentSource,
    // word -> postings (document index, score), for similarity lookups
    postings: HashMap<String, Vec<(usize, f64)>>,
    ids: Vec<String>,
    norms: Vec<f64>,
}

impl DocumentContentModel {
    /// Tokenizes each document's text and builds the model.
    pub fn from_texts<'a, I>(texts: I, tokenizer: &Tokenizer, source: ContentSource) -> Result<Self>
    where
        I: IntoIterator<Item = (&'a str, &'a str)>,
    {
        let corpus: BTreeMap<String, Vec<String>> = texts
            .into_iter()
            .map(|(id, text)| (id.to_owned(), tokenizer.tokenize(text)))
            .collect();
        Ok(compute_tfidf(&corpus)?.with_source(source))
    }

    pub fn with_source(mut self, source: ContentSource) -> Self {
        self.source = source;
        self
    }

    pub fn source(&self) -> ContentSource {
        self.source
    }

    pub fn document_count(&self) -> usize {
        self.vectors.len()
    }

    /// Number of documents containing `word`.
    pub fn document_frequency(&self, word: &str) -> usize {
        self.doc_freq.get(word).copied().unwrap_or(0)
    }

    pub fn vector(&self, document: &str) -> Option<&WordVector> {
        self.vectors.get(document)
    }

    pub fn contains(&self, document: &str) -> bool {
        self.vectors.contains_key(document)
    }

    pub fn documents(&self) -> impl Iterator<Item = (&str, &WordVector)> {
        self.vectors.iter().map(|(k, v)| (k.as_str(), v))
    }
}

/// Unnormalized Tf-Idf `tc(w,d)/|d| * log2(|D| / dc(w))` per document, with
/// the corpus document frequencies. Zero scores are dropped.
pub fn raw_tfidf(
    corpus: &BTreeMap<String, Vec<String>>,
) -> (BTreeMap<String, WordVector>, BTreeMap<String, usize>) {
    let n_docs = corpus.len() as f64;
    let mut doc_freq: BTreeMap<String, usize> = BTreeMap::new();
    let mut term_counts: Vec<BTreeMap<&str, usize>> = Vec::with_capacity(corpus.len());
    for tokens in corpus.values() {
        let mut tc: BTreeMap<&str, usize> = BTreeMap::new();
        for w in tokens {
            *tc.entry(w.as_str()).or_insert(0) += 1;
        }
        for w in tc.keys() {
            *doc_freq.entry((*w).to_owned()).or_insert(0) += 1;
        }
        term_counts.push(tc);
    }

    let vectors = corpus
        .iter()
        .zip(term_counts)
        .map(|((id, tokens), tc)| {
            let len = tokens.len() as f64;
            let raw: WordVector = tc
                .into_iter()
                .map(|(w, c)| {
                    let idf = (n_docs / doc_freq[w] as f64).log2();
                    (w.to_owned(), c as f64 / len * idf)
                })
                .filter(|(_, s)| *s > 0.0)
                .collect();
            (id.clone(), raw)
        })
        .collect();
    (vectors, doc_freq)
}

/// Tf-Idf normalized to sum to 1 per document. Documents in which no word
/// discriminates (every word occurs in all documents, or no words at all)
/// keep an empty vector.
pub fn compute_tfidf(corpus: &BTreeMap<String, Vec<String>>) -> Result<DocumentContentModel> {
    if corpus.is_empty() {
        return Err(Error::Empty("Tf-Idf corpus has no documents"));
    }
    let (mut vectors, doc_freq) = raw_tfidf(corpus);
    for raw in vectors.values_mut() {
        let total: f64 = raw.values().sum();
        if total > 0.0 {
            raw.values_mut().for_each(|s| *s /= total);
        }
    }

    let ids: Vec<String> = vectors.keys().cloned().collect();
    let mut postings: HashMap<String, Vec<(usize, f64)>> = HashMap::new();
    let mut norms = Vec::with_capacity(ids.len());
    for (i, v) in vectors.values().enumerate() {
        for (w, &s) in v {
            postings.entry(w.clone()).or_default().push((i, s));
        }
        norms.push(norm(v));
    }

    Ok(DocumentContentModel {
        vectors,
        doc_freq,
        source: ContentSource::default(),
        postings,
        ids,
        norms,
    })
}

fn norm(v: &WordVector) -> f64 {
    v.values().map(|s| s * s).sum::<f64>().sqrt()
}

/// Cosine of two non-negative word vectors; 0 when either has zero norm.
pub fn cosine_similarity(a: &WordVector, b: &WordVector) -> f64 {
    let (small, large) = if a.len() <= b.len() { (a, b) } else { (b, a) };
    let dot: f64 = small
        .iter()
        .filter_map(|(w, x)| large.get(w).map(|y| x * y))
        .sum();
    let denom = norm(a) * norm(b);
    if denom == 0.0 {
        return 0.0;
    }
    (dot / denom).clamp(0.0, 1.0)
}

/// Training documents most similar to a query document, with scores
/// normalized to sum to 1.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct SimilarityList {
    pub query: String,
    pub entries: Vec<(String, f64)>,
}

impl SimilarityList {
    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }
}

/// The `k` training documents with the highest cosine similarity to `query`.
///
/// When the query document is itself a training document its similarity is
/// set to 1, since its content may have drifted between posts. Ties are
/// broken by document id. Documents with zero similarity are never returned.
pub fn top_k_similar(
    query: &str,
    model: &DocumentContentModel,
    k: usize,
    is_train: impl Fn(&str) -> bool,
) -> SimilarityList {
    let mut scores: BTreeMap<usize, f64> = BTreeMap::new();
    if let Some(qv) = model.vector(query) {
        let qn = norm(qv);
        if qn > 0.0 {
            for (w, qs) in qv {
                for &(doc, ds) in model.postings.get(w).into_iter().flatten() {
                    *scores.entry(doc).or_insert(0.0) += qs * ds;
                }
            }
            for (doc, s) in scores.iter_mut() {
                *s = (*s / (qn * model.norms[*doc])).clamp(0.0, 1.0);
            }
        }
    }
    let mut ranked: Vec<(&str, f64)> = scores
        .into_iter()
        .map(|(doc, s)| (model.ids[doc].as_str(), s))
        .filter(|(id, s)| *s > 0.0 && *id != query && is_train(id))
        .collect();
    if is_train(query) {
        ranked.push((query, 1.0));
    }
    ranked.sort_by(|a, b| b.1.total_cmp(&a.1).then_with(|| a.0.cmp(b.0)));
    ranked.truncate(k);

    let total: f64 = ranked.iter().map(|(_, s)| s).sum();
    let entries = if total > 0.0 {
        ranked.into_iter().map(|(id, s)| (id.to_owned(), s / total)).collect()
    } else {
        Vec::new()
    };
    SimilarityList {
        query: query.to_owned(),
        entries,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn corpus(docs: &[(&str, &str)]) -> BTreeMap<String, Vec<String>> {
        docs.iter()
            .map(|(id, text)| (id.to_string(), text.split_whitespace().map(String::from).collect()))
            .collect()
    }

    fn wv(entries: &[(&str, f64)]) -> WordVector {
        entries.iter().map(|(w, s)| (w.to_string(), *s)).collect()
    }

    #[test]
    fn two_document_corpus() {
        let m = compute_tfidf(&corpus(&[("d1", "graph graph tags"), ("d2", "tags")])).unwrap();
        assert_eq!(m.vector("d1").unwrap(), &wv(&[("graph", 1.0)]));
        // `tags` occurs everywhere, so d2 has nothing discriminative
        assert!(m.vector("d2").unwrap().is_empty());
        assert_eq!(m.document_frequency("tags"), 2);
        assert_eq!(m.document_frequency("graph"), 1);
    }

    #[test]
    fn single_document_corpus_is_all_zero() {
        let m = compute_tfidf(&corpus(&[("d1", "graph tags")])).unwrap();
        assert!(m.vector("d1").unwrap().is_empty());
    }

    #[test]
    fn empty_document_and_empty_corpus() {
        let m = compute_tfidf(&corpus(&[("d1", ""), ("d2", "graph")])).unwrap();
        assert!(m.vector("d1").unwrap().is_empty());
        assert_eq!(m.vector("d2").unwrap(), &wv(&[("graph", 1.0)]));
        assert!(compute_tfidf(&BTreeMap::new()).is_err());
    }

    #[test]
    fn normalized_vectors_sum_to_one() {
        let m = compute_tfidf(&corpus(&[
            ("d1", "graph graph tags models"),
            ("d2", "tags recommend users"),
            ("d3", "graph users users"),
        ]))
        .unwrap();
        for (_, v) in m.documents() {
            let s: f64 = v.values().sum();
            assert!((s - 1.0).abs() < 1e-9, "{s}");
        }
    }

    #[test]
    fn cosine_cases() {
        let a = wv(&[("x", 1.0)]);
        let b = wv(&[("x", 1.0), ("y", 1.0)]);
        assert!((cosine_similarity(&a, &b) - std::f64::consts::FRAC_1_SQRT_2).abs() < 1e-12);
        assert!((cosine_similarity(&b, &b) - 1.0).abs() < 1e-15);
        assert_eq!(cosine_similarity(&a, &wv(&[("z", 2.0)])), 0.0);
        assert_eq!(cosine_similarity(&a, &WordVector::new()), 0.0);
    }

    fn model() -> DocumentContentModel {
        compute_tfidf(&corpus(&[
            ("q", "graph tags graph"),
            ("a", "graph tags models"),
            ("b", "tags users"),
            ("c", "unrelated words here"),
        ]))
        .unwrap()
    }

    #[test]
    fn self_similarity_override() {
        let m = model();
        let list = top_k_similar("q", &m, 1, |_| true);
        assert_eq!(list.entries, vec![("q".to_string(), 1.0)]);
    }

    #[test]
    fn top_k_is_sorted_and_normalized() {
        let m = model();
        let list = top_k_similar("q", &m, 10, |id| id != "q");
        assert!(!list.is_empty());
        let total: f64 = list.entries.iter().map(|e| e.1).sum();
        assert!((total - 1.0).abs() < 1e-9);
        assert!(list.entries.windows(2).all(|w| w[0].1 >= w[1].1));
        assert!(list.entries.iter().all(|(id, _)| id != "c" && id != "q"));
        // agrees with the direct cosine
        let qa = cosine_similarity(m.vector("q").unwrap(), m.vector("a").unwrap());
        let qb = cosine_similarity(m.vector("q").unwrap(), m.vector("b").unwrap());
        let want_a = qa / (qa + qb);
        let got_a = list.entries.iter().find(|e| e.0 == "a").unwrap().1;
        assert!((got_a - want_a).abs() < 1e-12);
    }

    #[test]
    fn query_without_vector() {
        let m = model();
        assert!(top_k_similar("missing", &m, 5, |id| id != "missing").is_empty());
        // a training document without content still matches itself
        let own = top_k_similar("missing", &m, 5, |_| true);
        assert_eq!(own.entries, vec![("missing".to_string(), 1.0)]);
        let m = compute_tfidf(&corpus(&[("q", ""), ("a", "graph")])).unwrap();
        assert!(top_k_similar("q", &m, 5, |id| id == "a").is_empty());
    }
}
