//! Clickbait detection and media corpus analytics.
//!
//! The pipeline runs in four stages:
//!
//! * [`textproc`] tokenizes text and maps words onto dense word rows plus
//!   hashed character n-gram buckets.
//! * [`embed`] trains subword skip-gram embeddings with negative sampling and
//!   composes word vectors as the sum of their unit rows.
//! * [`classify`] averages word vectors into a sentence vector and learns a
//!   two-class softmax on top; [`metrics`] cross-validates it.
//! * [`topics`], [`similar`] and [`analytics`] run corpus-level measurements
//!   over posts annotated by a trained classifier.

pub mod analytics;
pub mod classify;
pub mod corpus;
pub mod embed;
pub mod error;
pub mod metrics;
pub mod similar;
pub mod textproc;
pub mod topics;

pub use crate::classify::{ClassifierConfig, ClassifierModel, Prediction};
pub use crate::corpus::{Category, Label, LabeledHeadline, MediaGroup, Post, PostType};
pub use crate::embed::{EmbeddingConfig, EmbeddingModel, Matrix};
pub use crate::error::{Error, Result};
pub use crate::metrics::{ConfusionMatrix, MetricsReport};
pub use crate::textproc::{VocabConfig, Vocabulary};
