use std::collections::{HashMap, HashSet};
use std::fs;
use std::path::Path;
use std::sync::LazyLock;

use rust_stemmers::{Algorithm, Stemmer};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

const DEFAULT_STOP_WORDS: &str = include_str!("stopwords.txt");

static STEMMER: LazyLock<Stemmer> = LazyLock::new(|| Stemmer::create(Algorithm::English));

/// A set of lowercase tokens removed by the pipeline.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct StopWords(HashSet<String>);

impl StopWords {
    pub fn new<I, S>(words: I) -> Self
    where
        I: IntoIterator<Item = S>,
        S: AsRef<str>,
    {
        StopWords(
            words
                .into_iter()
                .map(|w| w.as_ref().trim().to_lowercase())
                .filter(|w| !w.is_empty())
                .collect(),
        )
    }

    /// Reads one token per line.
    pub fn from_file(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Ok(Self::new(text.lines()))
    }

    pub fn none() -> Self {
        StopWords(HashSet::new())
    }

    pub fn contains(&self, token: &str) -> bool {
        self.0.contains(token)
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }
}

impl Default for StopWords {
    /// The bundled English list.
    fn default() -> Self {
        Self::new(DEFAULT_STOP_WORDS.lines())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct BigramConfig {
    pub enabled: bool,
    pub min_count: usize,
    pub threshold: f64,
}

impl Default for BigramConfig {
    fn default() -> Self {
        BigramConfig {
            enabled: true,
            min_count: 5,
            threshold: 10.0,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct PreprocessConfig {
    pub stop_words: StopWords,
    pub min_token_len: usize,
    pub stem: bool,
    pub bigrams: BigramConfig,
}

impl Default for PreprocessConfig {
    fn default() -> Self {
        PreprocessConfig {
            stop_words: StopWords::default(),
            min_token_len: 3,
            stem: true,
            bigrams: BigramConfig::default(),
        }
    }
}

/// Runs every per-document stage of the pipeline: lowercase, strip
/// punctuation and digits, split on whitespace, length filter, stop words,
/// stemming. Bigram merging needs corpus statistics and happens afterwards.
pub fn tokenize(raw: &str, config: &PreprocessConfig) -> Vec<String> {
    let cleaned: String = raw
        .to_lowercase()
        .chars()
        .map(|c| if c.is_alphabetic() { c } else { ' ' })
        .collect();

    cleaned
        .split_whitespace()
        .filter(|t| t.chars().count() >= config.min_token_len)
        .filter(|t| !config.stop_words.contains(t))
        .filter_map(|t| {
            if !config.stem {
                return Some(t.to_string());
            }
            let stem = STEMMER.stem(t).into_owned();
            // Stemming can shorten a token below the minimum or land on a stop word.
            (stem.chars().count() >= config.min_token_len && !config.stop_words.contains(&stem)).then_some(stem)
        })
        .collect()
}

/// Adjacent token pairs promoted to single `a_b` tokens.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct Phrases {
    pairs: HashSet<(String, String)>,
}

impl Phrases {
    /// Scores each adjacent pair as `count(ab) * N / (count(a) * count(b))`
    /// where `N` is the total token count, and keeps pairs seen at least
    /// `min_count` times with score at or above `threshold`.
    pub fn learn(documents: &[Vec<String>], config: &BigramConfig) -> Self {
        let mut unigrams: HashMap<&str, usize> = HashMap::new();
        let mut bigrams: HashMap<(&str, &str), usize> = HashMap::new();
        let mut total = 0usize;
        for doc in documents {
            total += doc.len();
            for t in doc {
                *unigrams.entry(t.as_str()).or_default() += 1;
            }
            for pair in doc.windows(2) {
                *bigrams.entry((pair[0].as_str(), pair[1].as_str())).or_default() += 1;
            }
        }

        let pairs = bigrams
            .into_iter()
            .filter(|&(_, count)| count >= config.min_count)
            .filter(|&((a, b), count)| {
                let score = count as f64 * total as f64 / (unigrams[a] as f64 * unigrams[b] as f64);
                score >= config.threshold
            })
            .map(|((a, b), _)| (a.to_string(), b.to_string()))
            .collect();
        Phrases { pairs }
    }

    pub fn len(&self) -> usize {
        self.pairs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.pairs.is_empty()
    }

    pub fn contains(&self, a: &str, b: &str) -> bool {
        self.pairs.contains(&(a.to_string(), b.to_string()))
    }

    /// Greedy left-to-right merge; each merge shortens the sequence by one.
    pub fn apply(&self, tokens: Vec<String>) -> Vec<String> {
        if self.pairs.is_empty() {
            return tokens;
        }
        let mut out = Vec::with_capacity(tokens.len());
        let mut iter = tokens.into_iter().peekable();
        while let Some(tok) = iter.next() {
            match iter.peek() {
                Some(next) if self.pairs.contains(&(tok.clone(), next.clone())) => {
                    let next = iter.next().unwrap();
                    out.push(format!("{tok}_{next}"));
                }
                _ => out.push(tok),
            }
        }
        out
    }
}

/// Full pipeline over a batch of raw documents, learning bigrams from the
/// batch itself.
pub fn preprocess_all<S: AsRef<str>>(raws: &[S], config: &PreprocessConfig) -> Vec<Vec<String>> {
    let stage: Vec<Vec<String>> = raws.iter().map(|r| tokenize(r.as_ref(), config)).collect();
    if !config.bigrams.enabled {
        return stage;
    }
    let phrases = Phrases::learn(&stage, &config.bigrams);
    stage.into_iter().map(|doc| phrases.apply(doc)).collect()
}

/// Full pipeline for a single document; bigram statistics come from the
/// document alone.
pub fn preprocess(raw: &str, config: &PreprocessConfig) -> Vec<String> {
    preprocess_all(&[raw], config).pop().unwrap_or_default()
}
