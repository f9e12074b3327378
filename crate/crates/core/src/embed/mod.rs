//! Subword skip-gram embeddings.
//!
//! A word's vector is the sum of the input rows of its units: its own word
//! row (when it is in the vocabulary) and one hashed bucket row per character
//! n-gram. Out-of-vocabulary words are composed from their n-grams alone.

pub(crate) mod io;
mod matrix;
mod train;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::textproc::{VocabConfig, Vocabulary};

pub use self::io::{
    export_vectors, load_model, load_pretrained, load_vectors, read_model, read_vectors,
    save_model, write_model, write_vectors, Pretrained, PretrainedVectors, MODEL_MAGIC,
};
pub use self::matrix::Matrix;
pub(crate) use self::matrix::SharedMatrix;
pub use self::train::{
    keep_probability, logistic_step, negative_sampling_loss, train_embeddings, Training,
};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EmbeddingConfig {
    pub dim: usize,
    /// Maximum context offset; the effective window is drawn from `1..=window`.
    pub window: usize,
    pub negatives: usize,
    pub epochs: usize,
    /// Decays linearly to zero over all planned updates.
    pub initial_lr: f32,
    pub subsample_t: f64,
    pub seed: u64,
    pub workers: usize,
    pub vocab: VocabConfig,
}

impl Default for EmbeddingConfig {
    fn default() -> Self {
        EmbeddingConfig {
            dim: 300,
            window: 5,
            negatives: 5,
            epochs: 5,
            initial_lr: 0.05,
            subsample_t: 1e-4,
            seed: 0,
            workers: 1,
            vocab: VocabConfig::unlabeled(),
        }
    }
}

impl EmbeddingConfig {
    pub fn validate(&self) -> Result<()> {
        if self.dim == 0 {
            return Err(Error::Config("dimension must be at least 1".into()));
        }
        if self.window == 0 {
            return Err(Error::Config("window must be at least 1".into()));
        }
        if self.negatives == 0 {
            return Err(Error::Config("negatives must be at least 1".into()));
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

/// Trained input (word + bucket) and output (context) matrices.
#[derive(Clone, Debug, PartialEq)]
pub struct EmbeddingModel {
    vocab: Vocabulary,
    input: Matrix,
    output: Matrix,
}

impl EmbeddingModel {
    /// `input` must have `vocab.rows()` rows. `output` holds context vectors
    /// and may be empty for models that are only used for lookups.
    pub fn new(vocab: Vocabulary, input: Matrix, output: Matrix) -> Result<Self> {
        if input.rows() != vocab.rows() {
            return Err(Error::Format(format!(
                "input matrix has {} rows, vocabulary needs {}",
                input.rows(),
                vocab.rows()
            )));
        }
        if output.rows() != 0 && (output.rows() != vocab.len() || output.cols() != input.cols()) {
            return Err(Error::Format(format!(
                "output matrix is {}x{}, expected {}x{}",
                output.rows(),
                output.cols(),
                vocab.len(),
                input.cols()
            )));
        }
        Ok(EmbeddingModel {
            vocab,
            input,
            output,
        })
    }

    pub fn dim(&self) -> usize {
        self.input.cols()
    }

    pub fn vocab(&self) -> &Vocabulary {
        &self.vocab
    }

    pub fn input(&self) -> &Matrix {
        &self.input
    }

    pub fn input_mut(&mut self) -> &mut Matrix {
        &mut self.input
    }

    pub fn output(&self) -> &Matrix {
        &self.output
    }

    /// Input rows composing `word`; see [`Vocabulary::units`].
    pub fn units(&self, word: &str) -> Vec<usize> {
        self.vocab.units(word)
    }

    /// Sum of the word's unit rows. A word with no units at all (unknown and
    /// shorter than the smallest n-gram) gets a zero vector and a warning.
    pub fn word_vector(&self, word: &str) -> Vec<f32> {
        let units = self.units(word);
        if units.is_empty() {
            log::warn!("`{word}` has no vocabulary entry and no subwords; using a zero vector");
        }
        let mut v = vec![0.0; self.dim()];
        self.input.add_rows_into(&units, &mut v);
        v
    }

    /// Mean of the tokens' word vectors; zero for an empty token list.
    pub fn sentence_vector<S: AsRef<str>>(&self, tokens: &[S]) -> Vec<f32> {
        let mut acc = vec![0.0f32; self.dim()];
        if tokens.is_empty() {
            return acc;
        }
        for t in tokens {
            for (a, x) in acc.iter_mut().zip(self.word_vector(t.as_ref())) {
                *a += x;
            }
        }
        let n = tokens.len() as f32;
        acc.iter_mut().for_each(|a| *a /= n);
        acc
    }
}
