use std::collections::HashSet;
use std::io::{self, BufRead};

/// Bundled English stop-word list, one word per line.
pub const BUNDLED_STOP_WORDS: &str = include_str!("../../data/stopwords-en.txt");

/// SHA-256 of [`BUNDLED_STOP_WORDS`]; recorded in run manifests so a result
/// can be tied to the exact list it was produced with.
pub const BUNDLED_STOP_WORDS_SHA256: &str =
    "8990306ef3ff023f8a89191592fb1b44359c0738004818802bdb6a2d4fa82d93";

pub const MIN_WORD_LEN: usize = 3;
pub const MAX_WORD_LEN: usize = 20;

/// Lower-cases, splits on non-alphanumeric characters, drops stop-words and
/// words outside `[MIN_WORD_LEN, MAX_WORD_LEN]` characters. No stemming.
#[derive(Clone, Debug)]
pub struct Tokenizer {
    stop_words: HashSet<String>,
}

impl Default for Tokenizer {
    fn default() -> Self {
        Tokenizer::with_stop_words(BUNDLED_STOP_WORDS.lines())
    }
}

impl Tokenizer {
    pub fn with_stop_words<I, S>(words: I) -> Self
    where
        I: IntoIterator<Item = S>,
        S: AsRef<str>,
    {
        let stop_words = words
            .into_iter()
            .map(|w| w.as_ref().trim().to_lowercase())
            .filter(|w| !w.is_empty())
            .collect();
        Tokenizer { stop_words }
    }

    /// Reads a newline-delimited stop-word file.
    pub fn from_stop_word_reader<R: BufRead>(reader: R) -> io::Result<Self> {
        let lines = reader.lines().collect::<io::Result<Vec<_>>>()?;
        Ok(Tokenizer::with_stop_words(lines))
    }

    pub fn tokenize(&self, text: &str) -> Vec<String> {
        text.split(|c: char| !c.is_alphanumeric())
            .filter(|w| !w.is_empty())
            .map(str::to_lowercase)
            .filter(|w| !self.stop_words.contains(w))
            .filter(|w| (MIN_WORD_LEN..=MAX_WORD_LEN).contains(&w.chars().count()))
            .collect()
    }
}

/// Joins the title variants a document received over time into a single
/// title, so words that persist across variants get a higher term count.
pub fn concatenate_title_variants<S: AsRef<str>>(titles: &[S]) -> String {
    titles.iter().map(AsRef::as_ref).collect::<Vec<_>>().join(" ")
}
