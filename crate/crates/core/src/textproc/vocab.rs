use std::collections::HashMap;

use serde::{Deserialize, Serialize};

use super::subword::{hash_subword, subwords, SubwordSet};
use crate::error::{Error, Result};

/// Vocabulary and subword settings.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct VocabConfig {
    pub min_count: u64,
    pub buckets: usize,
    pub ngram_min: usize,
    pub ngram_max: usize,
    pub use_boundaries: bool,
}

impl Default for VocabConfig {
    fn default() -> Self {
        VocabConfig {
            min_count: 1,
            buckets: 2_000_000,
            ngram_min: 3,
            ngram_max: 6,
            use_boundaries: true,
        }
    }
}

impl VocabConfig {
    /// Settings for large unlabeled pre-training corpora.
    pub fn unlabeled() -> Self {
        VocabConfig {
            min_count: 5,
            ..Default::default()
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.min_count < 1 {
            return Err(Error::Config("min_count must be at least 1".into()));
        }
        if self.buckets == 0 {
            return Err(Error::Config("bucket count must be positive".into()));
        }
        if self.ngram_min < 1 || self.ngram_min > self.ngram_max {
            return Err(Error::Config(format!(
                "n-gram range must satisfy 1 <= min <= max, got {}..={}",
                self.ngram_min, self.ngram_max
            )));
        }
        Ok(())
    }
}

/// Raw token counts. Shards can be counted independently and merged.
#[derive(Clone, Debug, Default)]
pub struct WordCounts {
    counts: HashMap<String, u64>,
}

impl WordCounts {
    pub fn add<S: AsRef<str>>(&mut self, token: S) {
        let token = token.as_ref();
        match self.counts.get_mut(token) {
            Some(n) => *n += 1,
            None => {
                self.counts.insert(token.to_string(), 1);
            }
        }
    }

    pub fn merge(&mut self, other: WordCounts) {
        for (word, n) in other.counts {
            *self.counts.entry(word).or_insert(0) += n;
        }
    }

    pub fn len(&self) -> usize {
        self.counts.len()
    }

    pub fn is_empty(&self) -> bool {
        self.counts.is_empty()
    }
}

impl<S: AsRef<str>> FromIterator<S> for WordCounts {
    fn from_iter<I: IntoIterator<Item = S>>(iter: I) -> Self {
        let mut counts = WordCounts::default();
        for token in iter {
            counts.add(token);
        }
        counts
    }
}

/// Words kept for training, ordered by descending count (ties broken
/// lexicographically), plus the subword bucket configuration.
///
/// Rows `0..len()` of an embedding matrix belong to words; rows
/// `len()..len() + buckets` belong to hashed subwords.
#[derive(Clone, Debug, PartialEq)]
pub struct Vocabulary {
    words: Vec<String>,
    counts: Vec<u64>,
    index: HashMap<String, usize>,
    config: VocabConfig,
}

pub fn build_vocab<I, S>(tokens: I, config: &VocabConfig) -> Result<Vocabulary>
where
    I: IntoIterator<Item = S>,
    S: AsRef<str>,
{
    config.validate()?;
    Vocabulary::from_counts(tokens.into_iter().collect(), config.clone())
}

impl Vocabulary {
    pub fn from_counts(counts: WordCounts, config: VocabConfig) -> Result<Self> {
        config.validate()?;
        let mut entries: Vec<(String, u64)> = counts
            .counts
            .into_iter()
            .filter(|&(_, n)| n >= config.min_count)
            .collect();
        entries.sort_by(|a, b| b.1.cmp(&a.1).then_with(|| a.0.cmp(&b.0)));
        let (words, counts): (Vec<_>, Vec<_>) = entries.into_iter().unzip();
        Vocabulary::from_parts(words, counts, config)
    }

    /// Rebuilds a vocabulary from stored words and counts, keeping their order.
    pub fn from_parts(words: Vec<String>, counts: Vec<u64>, config: VocabConfig) -> Result<Self> {
        config.validate()?;
        if words.len() != counts.len() {
            return Err(Error::Invalid(
                "word and count lists differ in length".into(),
            ));
        }
        let mut index = HashMap::with_capacity(words.len());
        for (i, w) in words.iter().enumerate() {
            if index.insert(w.clone(), i).is_some() {
                return Err(Error::Invalid(format!("duplicate vocabulary word `{w}`")));
            }
        }
        Ok(Vocabulary {
            words,
            counts,
            index,
            config,
        })
    }

    pub fn len(&self) -> usize {
        self.words.len()
    }

    pub fn is_empty(&self) -> bool {
        self.words.is_empty()
    }

    pub fn config(&self) -> &VocabConfig {
        &self.config
    }

    pub fn buckets(&self) -> usize {
        self.config.buckets
    }

    /// Total row count of an input matrix over this vocabulary.
    pub fn rows(&self) -> usize {
        self.words.len() + self.config.buckets
    }

    pub fn words(&self) -> &[String] {
        &self.words
    }

    pub fn counts(&self) -> &[u64] {
        &self.counts
    }

    pub fn index(&self, word: &str) -> Option<usize> {
        self.index.get(word).copied()
    }

    pub fn word(&self, index: usize) -> Option<&str> {
        self.words.get(index).map(String::as_str)
    }

    pub fn count(&self, index: usize) -> u64 {
        self.counts[index]
    }

    pub fn total_count(&self) -> u64 {
        self.counts.iter().sum()
    }

    pub fn subwords(&self, word: &str) -> SubwordSet {
        let c = &self.config;
        // The range was validated on construction.
        let ngrams = subwords(word, c.ngram_min, c.ngram_max, c.use_boundaries)
            .expect("validated n-gram range");
        let bucket_ids = ngrams
            .iter()
            .map(|g| self.words.len() + hash_subword(g, c.buckets))
            .collect();
        SubwordSet { ngrams, bucket_ids }
    }

    /// Every input row that makes up `word`: its own row when the word is in
    /// the vocabulary, followed by its subword bucket rows.
    pub fn units(&self, word: &str) -> Vec<usize> {
        let mut units = Vec::new();
        if let Some(i) = self.index(word) {
            units.push(i);
        }
        units.extend(self.subwords(word).bucket_ids);
        units
    }
}
