use std::fmt;
use std::str::FromStr;

use serde::Serialize;
use sha2::{Digest, Sha256};

use super::{PathRankNorm, SpreadParams, TagRetrieval};
use crate::content::ContentSource;
use crate::error::{Error, Result};
use crate::graph::GraphVariant;

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum SpreaderKind {
    #[default]
    Iterative,
    #[serde(rename = "pathrank")]
    PathRank,
}

impl FromStr for SpreaderKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "iterative" | "folkrank" => Ok(SpreaderKind::Iterative),
            "pathrank" => Ok(SpreaderKind::PathRank),
            other => Err(Error::Config(format!("unknown spreader `{other}`"))),
        }
    }
}

impl fmt::Display for SpreaderKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            SpreaderKind::Iterative => "iterative",
            SpreaderKind::PathRank => "pathrank",
        })
    }
}

/// How tag scores are derived from spread weights.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum RankingMode {
    /// Personalized weight minus global weight.
    #[default]
    Differential,
    /// Personalized weight with zero preference on non-query nodes.
    #[serde(rename = "zero-pref")]
    ZeroPreference,
    #[serde(rename = "pathrank")]
    PathRank,
}

impl FromStr for RankingMode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "differential" => Ok(RankingMode::Differential),
            "zero-pref" | "zero-preference" => Ok(RankingMode::ZeroPreference),
            "pathrank" => Ok(RankingMode::PathRank),
            other => Err(Error::Config(format!("unknown ranking mode `{other}`"))),
        }
    }
}

impl fmt::Display for RankingMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            RankingMode::Differential => "differential",
            RankingMode::ZeroPreference => "zero-pref",
            RankingMode::PathRank => "pathrank",
        })
    }
}

/// Split of the preference weight between the query user and the document
/// side.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Balance {
    Fixed(f64),
    /// `|U| / (|U| + |D|)` of the graph.
    Original,
}

impl Default for Balance {
    fn default() -> Self {
        Balance::Fixed(0.5)
    }
}

impl fmt::Display for Balance {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Balance::Fixed(b) => write!(f, "{b}"),
            Balance::Original => f.write_str("original"),
        }
    }
}

impl FromStr for Balance {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        if s == "original" {
            return Ok(Balance::Original);
        }
        let b: f64 = s.parse().map_err(|_| Error::Config(format!("bad b `{s}`")))?;
        if !(0.0..=1.0).contains(&b) {
            return Err(Error::Config(format!("b = {b} is outside [0, 1]")));
        }
        Ok(Balance::Fixed(b))
    }
}

/// Recommender settings, read from flat `key = value` text.
///
/// ```text
/// # SimFolkRank on the post graph
/// variant = post
/// k-similar = 5
/// b = 0.5
/// ```
#[derive(Clone, Debug, PartialEq)]
pub struct EngineConfig {
    pub variant: GraphVariant,
    pub spreader: SpreaderKind,
    pub mode: RankingMode,
    pub b: Balance,
    pub d: f64,
    pub epsilon: f64,
    pub max_iterations: usize,
    pub tw: f64,
    /// Share of the total preference weight spread uniformly over all nodes
    /// in the personalized run of differential ranking.
    pub background: f64,
    pub pl: usize,
    pub pathrank_norm: PathRankNorm,
    pub precompute: bool,
    /// Number of recommended tags.
    pub n: usize,
    /// Similar training documents added to the preference vector; 0 is off.
    pub k_similar: usize,
    pub content_source: ContentSource,
    /// `None` picks the variant's default.
    pub retrieval: Option<TagRetrieval>,
    pub seed: u64,
}

impl Default for EngineConfig {
    fn default() -> Self {
        EngineConfig {
            variant: GraphVariant::Folksonomy,
            spreader: SpreaderKind::Iterative,
            mode: RankingMode::Differential,
            b: Balance::default(),
            d: 0.1,
            epsilon: 1e-6,
            max_iterations: 200,
            tw: 1.0,
            background: 0.5,
            pl: 3,
            pathrank_norm: PathRankNorm::AllEdges,
            precompute: false,
            n: 5,
            k_similar: 0,
            content_source: ContentSource::Title,
            retrieval: None,
            seed: 0,
        }
    }
}

pub const CONFIG_KEYS: &[&str] = &[
    "variant",
    "spreader",
    "mode",
    "b",
    "d",
    "epsilon",
    "max-iterations",
    "tw",
    "background",
    "pl",
    "pathrank-norm",
    "precompute",
    "N",
    "k-similar",
    "content-source",
    "retrieval",
    "seed",
];

fn num<T: FromStr>(key: &str, value: &str) -> Result<T> {
    value
        .parse()
        .map_err(|_| Error::Config(format!("bad value `{value}` for `{key}`")))
}

impl EngineConfig {
    /// Parses `key = value` lines; `#` starts a comment. Unknown keys and
    /// repeated keys are errors.
    pub fn parse(text: &str) -> Result<Self> {
        let mut cfg = EngineConfig::default();
        let mut seen = Vec::new();
        for (i, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (k, v) = line
                .split_once('=')
                .ok_or_else(|| Error::Config(format!("line {}: expected key = value", i + 1)))?;
            let (k, v) = (k.trim(), v.trim());
            if seen.contains(&k) {
                return Err(Error::Config(format!("line {}: `{k}` set twice", i + 1)));
            }
            seen.push(k);
            cfg.set(k, v)?;
        }
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn set(&mut self, key: &str, value: &str) -> Result<()> {
        match key {
            "variant" => self.variant = value.parse().map_err(|e: Error| Error::Config(e.to_string()))?,
            "spreader" => self.spreader = value.parse()?,
            "mode" => self.mode = value.parse()?,
            "b" => self.b = value.parse()?,
            "d" => self.d = num(key, value)?,
            "epsilon" => self.epsilon = num(key, value)?,
            "max-iterations" => self.max_iterations = num(key, value)?,
            "tw" => self.tw = num(key, value)?,
            "background" => self.background = num(key, value)?,
            "pl" => self.pl = num(key, value)?,
            "pathrank-norm" => {
                self.pathrank_norm = value.parse().map_err(|e: Error| Error::Config(e.to_string()))?
            }
            "precompute" => self.precompute = num(key, value)?,
            "N" | "n" => self.n = num(key, value)?,
            "k-similar" => self.k_similar = num(key, value)?,
            "content-source" => {
                self.content_source = value.parse().map_err(|e: Error| Error::Config(e.to_string()))?
            }
            "retrieval" => {
                self.retrieval = match value {
                    "default" => None,
                    v => Some(v.parse().map_err(|e: Error| Error::Config(e.to_string()))?),
                }
            }
            "seed" => self.seed = num(key, value)?,
            other => return Err(Error::Config(format!("unknown key `{other}`"))),
        }
        Ok(())
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |m: String| Err(Error::Config(m));
        if !(self.d > 0.0 && self.d <= 1.0) {
            return bad(format!("d = {} is outside (0, 1]", self.d));
        }
        if !(self.epsilon > 0.0) {
            return bad(format!("epsilon = {} must be positive", self.epsilon));
        }
        if !(self.tw.is_finite() && self.tw > 0.0) {
            return bad(format!("tw = {} must be positive", self.tw));
        }
        if !(0.0..1.0).contains(&self.background) {
            return bad(format!("background = {} is outside [0, 1)", self.background));
        }
        if self.max_iterations == 0 {
            return bad("max-iterations must be at least 1".into());
        }
        if self.n == 0 {
            return bad("N must be at least 1".into());
        }
        if self.variant == GraphVariant::Content && self.k_similar > 0 {
            return bad("k-similar needs document nodes and cannot be used with the content variant".into());
        }
        if self.retrieval == Some(TagRetrieval::PostSum) && self.variant != GraphVariant::Post {
            return bad(format!("post-sum retrieval needs the post variant, not {}", self.variant));
        }
        Ok(())
    }

    /// Whether a document content model is needed.
    pub fn needs_content(&self) -> bool {
        self.variant == GraphVariant::Content || self.k_similar > 0
    }

    pub fn retrieval(&self) -> TagRetrieval {
        self.retrieval.unwrap_or(TagRetrieval::default_for(self.variant))
    }

    /// The ranking mode actually applied; PathRank has its own.
    pub fn effective_mode(&self) -> RankingMode {
        match self.spreader {
            SpreaderKind::PathRank => RankingMode::PathRank,
            SpreaderKind::Iterative if self.mode == RankingMode::PathRank => RankingMode::ZeroPreference,
            SpreaderKind::Iterative => self.mode,
        }
    }

    pub fn spread_params(&self) -> SpreadParams {
        SpreadParams {
            d: self.d,
            epsilon: self.epsilon,
            max_iterations: self.max_iterations,
            tw: self.tw,
        }
    }

    /// Every key with its value, one `key = value` per line in a fixed
    /// order; parses back to an equal config.
    pub fn to_kv_string(&self) -> String {
        let retrieval = self.retrieval.map_or("default", |r| r.as_str());
        let values: [String; 17] = [
            self.variant.to_string(),
            self.spreader.to_string(),
            self.mode.to_string(),
            self.b.to_string(),
            self.d.to_string(),
            self.epsilon.to_string(),
            self.max_iterations.to_string(),
            self.tw.to_string(),
            self.background.to_string(),
            self.pl.to_string(),
            self.pathrank_norm.to_string(),
            self.precompute.to_string(),
            self.n.to_string(),
            self.k_similar.to_string(),
            self.content_source.to_string(),
            retrieval.to_owned(),
            self.seed.to_string(),
        ];
        CONFIG_KEYS
            .iter()
            .zip(values)
            .map(|(k, v)| format!("{k} = {v}\n"))
            .collect()
    }

    /// First 12 hex digits of the SHA-256 of [`Self::to_kv_string`].
    pub fn hash(&self) -> String {
        let digest = Sha256::digest(self.to_kv_string().as_bytes());
        hex::encode(digest)[..12].to_owned()
    }
}

impl FromStr for EngineConfig {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        EngineConfig::parse(s)
    }
}
