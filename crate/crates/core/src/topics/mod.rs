//! Biterm topic model fitted by collapsed Gibbs sampling.
//!
//! Each headline contributes every unordered pair of its (filtered) word
//! positions as a biterm; the model assigns each biterm one topic and
//! samples assignments from
//!
//! ```text
//! P(z | rest) ∝ (n_z + α) · φ(z, w1) · φ(z, w2),   φ(z, w) = (n_wz + β) / (2 n_z + V β)
//! ```
//!
//! with the biterm's own counts removed.

mod stopwords;

use std::collections::{HashMap, HashSet};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::error::{Error, Result};

pub use self::stopwords::{ENGLISH_STOPWORDS, STOPWORDS_VERSION};

pub fn default_stopwords() -> HashSet<String> {
    ENGLISH_STOPWORDS.iter().map(|s| s.to_string()).collect()
}

/// An unordered word pair with `w1 <= w2`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Biterm {
    pub w1: usize,
    pub w2: usize,
}

impl Biterm {
    pub fn new(a: usize, b: usize) -> Self {
        Biterm {
            w1: a.min(b),
            w2: a.max(b),
        }
    }
}

/// Biterms over a topic vocabulary (words in order of first appearance).
#[derive(Clone, Debug, Default, PartialEq)]
pub struct BitermCorpus {
    pub vocab: Vec<String>,
    pub biterms: Vec<Biterm>,
}

/// Drops stopwords and words shorter than two characters, then emits every
/// pair of distinct remaining positions of each document.
pub fn extract_biterms<S: AsRef<str>>(
    docs: &[Vec<S>],
    stopwords: &HashSet<String>,
) -> BitermCorpus {
    let mut index: HashMap<String, usize> = HashMap::new();
    let mut corpus = BitermCorpus::default();
    for doc in docs {
        let ids: Vec<usize> = doc
            .iter()
            .map(AsRef::as_ref)
            .filter(|w| w.chars().count() >= 2 && !stopwords.contains(*w))
            .map(|w| {
                *index.entry(w.to_string()).or_insert_with(|| {
                    corpus.vocab.push(w.to_string());
                    corpus.vocab.len() - 1
                })
            })
            .collect();
        for i in 0..ids.len() {
            for j in i + 1..ids.len() {
                corpus.biterms.push(Biterm::new(ids[i], ids[j]));
            }
        }
    }
    corpus
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct BtmConfig {
    pub topics: usize,
    pub alpha: f64,
    pub beta: f64,
    pub iterations: usize,
    pub seed: u64,
}

impl BtmConfig {
    /// `alpha = 50 / k`, `beta = 0.01`, 1,000 sweeps.
    pub fn with_topics(topics: usize) -> Self {
        BtmConfig {
            topics,
            alpha: 50.0 / topics as f64,
            beta: 0.01,
            iterations: 1_000,
            seed: 0,
        }
    }
}

impl Default for BtmConfig {
    fn default() -> Self {
        BtmConfig::with_topics(5)
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct BtmModel {
    pub topics: usize,
    pub alpha: f64,
    pub beta: f64,
    /// Biterms assigned to each topic.
    pub n_z: Vec<u64>,
    /// `n_wz[z][w]`: occurrences of word `w` in biterms of topic `z`.
    pub n_wz: Vec<Vec<u64>>,
    pub vocab: Vec<String>,
    pub iterations: usize,
    pub seed: u64,
}

impl BtmModel {
    /// `φ(z, w)` over the whole vocabulary.
    pub fn phi(&self, z: usize) -> Vec<f64> {
        let v = self.vocab.len() as f64;
        let denom = 2.0 * self.n_z[z] as f64 + v * self.beta;
        self.n_wz[z]
            .iter()
            .map(|&n| (n as f64 + self.beta) / denom)
            .collect()
    }

    /// Topic proportions `(n_z + α) / (|B| + K α)`.
    pub fn theta(&self) -> Vec<f64> {
        let total: u64 = self.n_z.iter().sum();
        let denom = total as f64 + self.topics as f64 * self.alpha;
        self.n_z
            .iter()
            .map(|&n| (n as f64 + self.alpha) / denom)
            .collect()
    }
}

/// Gibbs sampler state; [`fit_btm`] drives it for the configured sweeps.
pub struct BtmSampler<'a> {
    corpus: &'a BitermCorpus,
    config: BtmConfig,
    assignments: Vec<usize>,
    n_z: Vec<u64>,
    n_wz: Vec<Vec<u64>>,
    rng: ChaCha8Rng,
    weights: Vec<f64>,
}

impl<'a> BtmSampler<'a> {
    /// Assigns every biterm a uniformly random topic.
    pub fn new(corpus: &'a BitermCorpus, config: &BtmConfig) -> Result<Self> {
        if config.topics < 2 {
            return Err(Error::Config("topic count must be at least 2".into()));
        }
        if !(config.alpha > 0.0 && config.beta > 0.0) {
            return Err(Error::Config("alpha and beta must be positive".into()));
        }
        if corpus.biterms.is_empty() {
            return Err(Error::EmptyCorpus("no biterms to model".into()));
        }
        let k = config.topics;
        let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
        let mut n_z = vec![0u64; k];
        let mut n_wz = vec![vec![0u64; corpus.vocab.len()]; k];
        let assignments = corpus
            .biterms
            .iter()
            .map(|b| {
                let z = rng.gen_range(0..k);
                n_z[z] += 1;
                n_wz[z][b.w1] += 1;
                n_wz[z][b.w2] += 1;
                z
            })
            .collect();
        Ok(BtmSampler {
            corpus,
            config: config.clone(),
            assignments,
            n_z,
            n_wz,
            rng,
            weights: vec![0.0; k],
        })
    }

    /// Resamples every biterm's topic once, in corpus order.
    pub fn sweep(&mut self) {
        let k = self.config.topics;
        let (alpha, beta) = (self.config.alpha, self.config.beta);
        let vb = self.corpus.vocab.len() as f64 * beta;
        for (i, b) in self.corpus.biterms.iter().enumerate() {
            let old = self.assignments[i];
            self.n_z[old] -= 1;
            self.n_wz[old][b.w1] -= 1;
            self.n_wz[old][b.w2] -= 1;

            let mut total = 0.0;
            for z in 0..k {
                let denom = 2.0 * self.n_z[z] as f64 + vb;
                let p = (self.n_z[z] as f64 + alpha) * (self.n_wz[z][b.w1] as f64 + beta) / denom
                    * (self.n_wz[z][b.w2] as f64 + beta)
                    / denom;
                total += p;
                self.weights[z] = total;
            }
            let u = self.rng.gen::<f64>() * total;
            let new = self.weights.iter().position(|&c| u < c).unwrap_or(k - 1);

            self.assignments[i] = new;
            self.n_z[new] += 1;
            self.n_wz[new][b.w1] += 1;
            self.n_wz[new][b.w2] += 1;
        }
    }

    pub fn n_z(&self) -> &[u64] {
        &self.n_z
    }

    pub fn n_wz(&self) -> &[Vec<u64>] {
        &self.n_wz
    }

    pub fn into_model(self) -> BtmModel {
        BtmModel {
            topics: self.config.topics,
            alpha: self.config.alpha,
            beta: self.config.beta,
            n_z: self.n_z,
            n_wz: self.n_wz,
            vocab: self.corpus.vocab.clone(),
            iterations: self.config.iterations,
            seed: self.config.seed,
        }
    }
}

pub fn fit_btm(corpus: &BitermCorpus, config: &BtmConfig) -> Result<BtmModel> {
    let mut sampler = BtmSampler::new(corpus, config)?;
    for _ in 0..config.iterations {
        sampler.sweep();
    }
    Ok(sampler.into_model())
}

/// Ranked `(word, φ)` lists, one per topic.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct TopicSummary {
    pub topics: Vec<Vec<(String, f64)>>,
}

impl TopicSummary {
    /// One line per topic: `topic<TAB>w1 w2 ...`.
    pub fn to_grid(&self) -> String {
        let mut out = String::new();
        for (z, words) in self.topics.iter().enumerate() {
            let words: Vec<&str> = words.iter().map(|(w, _)| w.as_str()).collect();
            out.push_str(&format!("{}\t{}\n", z + 1, words.join(" ")));
        }
        out
    }
}

/// The `n` most probable words per topic; ties in φ are ordered
/// lexicographically. Asking for more words than exist returns them all.
pub fn top_words(model: &BtmModel, n: usize) -> Result<TopicSummary> {
    if n == 0 {
        return Err(Error::Config("need at least one word per topic".into()));
    }
    let topics = (0..model.topics)
        .map(|z| {
            let phi = model.phi(z);
            let mut ranked: Vec<(usize, f64)> = phi.into_iter().enumerate().collect();
            ranked.sort_by(|a, b| {
                b.1.total_cmp(&a.1)
                    .then_with(|| model.vocab[a.0].cmp(&model.vocab[b.0]))
            });
            ranked
                .into_iter()
                .take(n)
                .map(|(w, p)| (model.vocab[w].clone(), p))
                .collect()
        })
        .collect();
    Ok(TopicSummary { topics })
}
