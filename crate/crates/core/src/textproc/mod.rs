//! Tokenization, character n-gram subwords and vocabulary construction.

mod subword;
mod vocab;

pub use self::subword::{hash_subword, subwords, SubwordSet};
pub use self::vocab::{build_vocab, VocabConfig, Vocabulary, WordCounts};

/// Lowercases `text` and splits it on every non-alphanumeric character.
/// Digits are kept; empty pieces are dropped.
pub fn tokenize(text: &str) -> Vec<String> {
    text.split(|c: char| !c.is_alphanumeric())
        .filter(|t| !t.is_empty())
        .map(str::to_lowercase)
        .collect()
}
