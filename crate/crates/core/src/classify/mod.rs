//! Bag-of-embeddings clickbait classifier.
//!
//! A headline's sentence vector is the mean of its word vectors (each the
//! sum of word and subword rows); a linear layer followed by a softmax maps
//! it to class probabilities. Supervised training fine-tunes the embedding
//! rows along with the output weights.

mod io;

use std::sync::atomic::{AtomicU64, Ordering};

use num_traits::Float;
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::corpus::{label_counts, Label, LabeledHeadline};
use crate::embed::{EmbeddingModel, Matrix, Pretrained, SharedMatrix};
use crate::error::{Error, Result};
use crate::textproc::{tokenize, VocabConfig, Vocabulary, WordCounts};

pub use self::io::{
    load_classifier, read_classifier, save_classifier, write_classifier, CLASSIFIER_MAGIC,
};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ClassifierConfig {
    /// Embedding size; replaced by the pretrained dimension when
    /// initializing from a model file.
    pub dim: usize,
    pub vocab: VocabConfig,
    pub epochs: usize,
    pub initial_lr: f32,
    pub seed: u64,
    pub workers: usize,
    /// Keep embedding rows fixed and train only the output layer.
    pub freeze_embeddings: bool,
}

impl Default for ClassifierConfig {
    fn default() -> Self {
        ClassifierConfig {
            dim: 300,
            vocab: VocabConfig::default(),
            epochs: 5,
            initial_lr: 0.1,
            seed: 0,
            workers: 1,
            freeze_embeddings: false,
        }
    }
}

impl ClassifierConfig {
    pub fn validate(&self) -> Result<()> {
        if self.dim == 0 {
            return Err(Error::Config("dimension must be at least 1".into()));
        }
        if !(self.initial_lr > 0.0 && self.initial_lr.is_finite()) {
            return Err(Error::Config("learning rate must be positive".into()));
        }
        if self.workers == 0 {
            return Err(Error::Config("workers must be at least 1".into()));
        }
        self.vocab.validate()
    }
}

/// Class probabilities for one text.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct Prediction {
    pub label: Label,
    /// Indexed by [`Label::index`].
    pub probabilities: [f64; 2],
}

impl Prediction {
    /// Softmax over two logits. Ties go to `NonClickbait`.
    pub fn from_logits(logits: [f64; 2]) -> Self {
        let probabilities = softmax(logits);
        let label = if probabilities[1] > probabilities[0] {
            Label::Clickbait
        } else {
            Label::NonClickbait
        };
        Prediction {
            label,
            probabilities,
        }
    }

    pub fn p_clickbait(&self) -> f64 {
        self.probabilities[Label::Clickbait.index()]
    }
}

fn softmax<const N: usize>(logits: [f64; N]) -> [f64; N] {
    let max = logits.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let mut out = logits.map(|l| (l - max).exp());
    let sum: f64 = out.iter().sum();
    out.iter_mut().for_each(|p| *p /= sum);
    out
}

/// Mean cross-entropy of a softmax over `weights · hidden` (one row of
/// `weights` per class, stored row-major).
pub fn cross_entropy_loss<F: Float>(weights: &[F], hidden: &[F], label: usize) -> F {
    let d = hidden.len();
    let logits: Vec<F> = weights.chunks(d).map(|w| dot(w, hidden)).collect();
    let max = logits.iter().copied().fold(F::neg_infinity(), F::max);
    let log_sum = logits
        .iter()
        .fold(F::zero(), |acc, &l| acc + (l - max).exp())
        .ln()
        + max;
    log_sum - logits[label]
}

/// One SGD step of softmax cross-entropy.
///
/// Adds `lr * Σ_k (y_k - p_k) w_k` to `grad_hidden` with the weights from
/// before the step, then moves each class row by `lr * (y_k - p_k) * hidden`.
/// With `lr = 1` both are the negated gradients of [`cross_entropy_loss`].
pub fn softmax_step<F: Float>(
    weights: &mut [F],
    hidden: &[F],
    label: usize,
    lr: F,
    grad_hidden: &mut [F],
) -> F {
    let d = hidden.len();
    let logits: Vec<F> = weights.chunks(d).map(|w| dot(w, hidden)).collect();
    let max = logits.iter().copied().fold(F::neg_infinity(), F::max);
    let exps: Vec<F> = logits.iter().map(|&l| (l - max).exp()).collect();
    let sum = exps.iter().fold(F::zero(), |a, &e| a + e);
    for (k, row) in weights.chunks_mut(d).enumerate() {
        let target = if k == label { F::one() } else { F::zero() };
        let g = lr * (target - exps[k] / sum);
        for (gh, &w) in grad_hidden.iter_mut().zip(row.iter()) {
            *gh = *gh + g * w;
        }
        for (w, &h) in row.iter_mut().zip(hidden) {
            *w = *w + g * h;
        }
    }
    sum.ln() + max - logits[label]
}

fn dot<F: Float>(a: &[F], b: &[F]) -> F {
    a.iter().zip(b).fold(F::zero(), |acc, (&x, &y)| acc + x * y)
}

/// Embedding plus a `2 x d` output layer.
#[derive(Clone, Debug, PartialEq)]
pub struct ClassifierModel {
    embedding: EmbeddingModel,
    weights: Matrix,
}

impl ClassifierModel {
    pub fn new(embedding: EmbeddingModel, weights: Matrix) -> Result<Self> {
        if weights.rows() != Label::ALL.len() || weights.cols() != embedding.dim() {
            return Err(Error::Format(format!(
                "output weights are {}x{}, expected {}x{}",
                weights.rows(),
                weights.cols(),
                Label::ALL.len(),
                embedding.dim()
            )));
        }
        Ok(ClassifierModel { embedding, weights })
    }

    pub fn labels(&self) -> [Label; 2] {
        Label::ALL
    }

    pub fn embedding(&self) -> &EmbeddingModel {
        &self.embedding
    }

    pub fn weights(&self) -> &Matrix {
        &self.weights
    }

    pub fn weights_mut(&mut self) -> &mut Matrix {
        &mut self.weights
    }

    pub fn dim(&self) -> usize {
        self.embedding.dim()
    }

    pub fn sentence_vector(&self, text: &str) -> Vec<f32> {
        self.embedding.sentence_vector(&tokenize(text))
    }

    pub fn logits(&self, hidden: &[f32]) -> [f64; 2] {
        [0, 1].map(|k| {
            self.weights
                .row(k)
                .iter()
                .zip(hidden)
                .map(|(&w, &h)| w as f64 * h as f64)
                .sum()
        })
    }

    pub fn predict(&self, text: &str) -> Prediction {
        Prediction::from_logits(self.logits(&self.sentence_vector(text)))
    }

    /// Predicts every text, splitting the batch over `workers` threads.
    /// Results are identical to calling [`predict`](Self::predict) in order.
    pub fn predict_batch<S: AsRef<str> + Sync>(
        &self,
        texts: &[S],
        workers: usize,
    ) -> Vec<Prediction> {
        let workers = workers.max(1);
        if workers == 1 || texts.len() < 2 {
            return texts.iter().map(|t| self.predict(t.as_ref())).collect();
        }
        let chunk = texts.len().div_ceil(workers);
        std::thread::scope(|scope| {
            let handles: Vec<_> = texts
                .chunks(chunk)
                .map(|part| {
                    scope.spawn(move || {
                        part.iter()
                            .map(|t| self.predict(t.as_ref()))
                            .collect::<Vec<_>>()
                    })
                })
                .collect();
            handles
                .into_iter()
                .flat_map(|h| h.join().expect("prediction worker panicked"))
                .collect()
        })
    }
}

struct Example {
    /// Unit rows of every token, concatenated.
    units: Vec<usize>,
    tokens: usize,
    label: usize,
}

/// Trains a classifier by SGD on softmax cross-entropy.
///
/// The vocabulary is built from the training headlines. With `pretrained`
/// the embedding starts from those vectors: a binary model contributes its
/// word rows and all bucket rows (so every word keeps its pretrained vector);
/// text vectors set the rows of the words they cover and leave buckets at zero.
pub fn train_classifier(
    data: &[LabeledHeadline],
    pretrained: Option<&Pretrained>,
    config: &ClassifierConfig,
) -> Result<ClassifierModel> {
    config.validate()?;
    if !label_counts(data).has_both() {
        return Err(Error::SingleClass);
    }
    let token_lists: Vec<Vec<String>> = data.iter().map(|h| tokenize(&h.text)).collect();

    let mut vocab_config = config.vocab.clone();
    let mut dim = config.dim;
    if let Some(p) = pretrained {
        dim = p.dim();
        if let Pretrained::Model(m) = p {
            let c = m.vocab().config();
            vocab_config = VocabConfig {
                min_count: config.vocab.min_count,
                ..c.clone()
            };
        }
    }
    let counts: WordCounts = token_lists.iter().flatten().collect();
    let vocab = Vocabulary::from_counts(counts, vocab_config)?;
    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
    let input = initial_input(&vocab, dim, pretrained, &mut rng);
    let mut embedding = EmbeddingModel::new(vocab, input, Matrix::zeros(0, dim))?;
    let mut weights = Matrix::zeros(Label::ALL.len(), dim);

    let examples: Vec<Example> = token_lists
        .iter()
        .zip(data)
        .filter(|(tokens, _)| !tokens.is_empty())
        .map(|(tokens, h)| Example {
            units: tokens.iter().flat_map(|t| embedding.units(t)).collect(),
            tokens: tokens.len(),
            label: h.label.index(),
        })
        .collect();

    if config.epochs > 0 {
        let processed = AtomicU64::new(0);
        let shared = SharedState {
            input: embedding.input_mut().shared(),
            weights: weights.shared(),
            examples: &examples,
            processed: &processed,
            planned: (examples.len() as u64 * config.epochs as u64).max(1),
            config,
            dim,
        };
        let per_worker: Vec<Vec<(f64, u64)>> = if config.workers == 1 {
            vec![run_worker(&shared, 0)]
        } else {
            let shared = &shared;
            std::thread::scope(|scope| {
                let handles: Vec<_> = (0..config.workers)
                    .map(|w| scope.spawn(move || run_worker(shared, w)))
                    .collect();
                handles
                    .into_iter()
                    .map(|h| h.join().expect("worker panicked"))
                    .collect()
            })
        };
        for epoch in 0..config.epochs {
            let (loss, n) = per_worker
                .iter()
                .fold((0.0, 0), |(l, c), w| (l + w[epoch].0, c + w[epoch].1));
            let mean = loss / n.max(1) as f64;
            if !mean.is_finite() {
                return Err(Error::Divergence { epoch });
            }
            log::debug!("classifier epoch {epoch}: mean loss {mean:.5}");
        }
    }
    if !weights.is_finite() || !embedding.input().is_finite() {
        return Err(Error::Divergence {
            epoch: config.epochs.saturating_sub(1),
        });
    }
    ClassifierModel::new(embedding, weights)
}

fn initial_input(
    vocab: &Vocabulary,
    dim: usize,
    pretrained: Option<&Pretrained>,
    rng: &mut ChaCha8Rng,
) -> Matrix {
    let bound = 1.0 / dim as f32;
    match pretrained {
        None => Matrix::uniform(vocab.rows(), dim, bound, rng),
        Some(Pretrained::Model(m)) => {
            let mut input = Matrix::zeros(vocab.rows(), dim);
            for (i, w) in vocab.words().iter().enumerate() {
                if let Some(j) = m.vocab().index(w) {
                    input.row_mut(i).copy_from_slice(m.input().row(j));
                }
            }
            let (own, theirs) = (vocab.len(), m.vocab().len());
            for b in 0..vocab.buckets() {
                input
                    .row_mut(own + b)
                    .copy_from_slice(m.input().row(theirs + b));
            }
            input
        }
        Some(Pretrained::Vectors(v)) => {
            let mut input = Matrix::zeros(vocab.rows(), dim);
            for (i, w) in vocab.words().iter().enumerate() {
                match v.get(w) {
                    Some(vec) => input.row_mut(i).copy_from_slice(vec),
                    None => input
                        .row_mut(i)
                        .iter_mut()
                        .for_each(|x| *x = rng.gen_range(-bound..bound)),
                }
            }
            input
        }
    }
}

struct SharedState<'a> {
    input: SharedMatrix<'a>,
    weights: SharedMatrix<'a>,
    examples: &'a [Example],
    processed: &'a AtomicU64,
    planned: u64,
    config: &'a ClassifierConfig,
    dim: usize,
}

fn run_worker(shared: &SharedState<'_>, worker: usize) -> Vec<(f64, u64)> {
    let config = shared.config;
    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
    rng.set_stream(worker as u64 + 1);
    let d = shared.dim;
    let mut order: Vec<usize> = (worker..shared.examples.len())
        .step_by(config.workers)
        .collect();
    let mut hidden = vec![0.0f32; d];
    let mut grad = vec![0.0f32; d];
    let mut w = vec![0.0f32; 2 * d];
    let mut stats = Vec::with_capacity(config.epochs);

    for _ in 0..config.epochs {
        order.shuffle(&mut rng);
        let (mut loss_sum, mut count) = (0.0f64, 0u64);
        for &i in &order {
            let ex = &shared.examples[i];
            let done = shared.processed.fetch_add(1, Ordering::Relaxed);
            let lr = (config.initial_lr as f64 * (1.0 - done as f64 / shared.planned as f64))
                .max(0.0) as f32;

            hidden.iter_mut().for_each(|h| *h = 0.0);
            for &u in &ex.units {
                shared.input.add_row_into(u, &mut hidden);
            }
            let scale = 1.0 / ex.tokens as f32;
            hidden.iter_mut().for_each(|h| *h *= scale);

            shared.weights.read_row(0, &mut w[..d]);
            shared.weights.read_row(1, &mut w[d..]);
            grad.iter_mut().for_each(|g| *g = 0.0);
            let loss = softmax_step(&mut w, &hidden, ex.label, lr, &mut grad);
            shared.weights.write_row(0, &w[..d]);
            shared.weights.write_row(1, &w[d..]);

            if !config.freeze_embeddings {
                grad.iter_mut().for_each(|g| *g *= scale);
                for &u in &ex.units {
                    shared.input.add_to_row(u, &grad);
                }
            }
            loss_sum += loss as f64;
            count += 1;
        }
        stats.push((loss_sum, count));
    }
    stats
}
