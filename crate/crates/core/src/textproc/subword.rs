use std::hash::Hasher;

use fnv::FnvHasher;

use crate::error::{Error, Result};

pub const BOW: char = '<';
pub const EOW: char = '>';

/// Character n-grams of a word together with the matrix rows they hash to.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SubwordSet {
    pub ngrams: Vec<String>,
    /// Row ids in `[|V|, |V| + B)`.
    pub bucket_ids: Vec<usize>,
}

/// Extracts all character n-grams of lengths `ngram_min..=ngram_max`.
///
/// With `use_boundaries` the word is wrapped as `<word>` first and the wrapped
/// word itself is appended as an extra unit, unless it already appeared as an
/// n-gram. Repeated n-grams are kept, one per position.
pub fn subwords(
    word: &str,
    ngram_min: usize,
    ngram_max: usize,
    use_boundaries: bool,
) -> Result<Vec<String>> {
    if ngram_min == 0 || ngram_min > ngram_max {
        return Err(Error::Config(format!(
            "n-gram range must satisfy 1 <= min <= max, got {ngram_min}..={ngram_max}"
        )));
    }
    let chars: Vec<char> = if use_boundaries {
        std::iter::once(BOW)
            .chain(word.chars())
            .chain(std::iter::once(EOW))
            .collect()
    } else {
        word.chars().collect()
    };

    let mut grams = Vec::new();
    for n in ngram_min..=ngram_max {
        if n > chars.len() {
            break;
        }
        grams.extend(chars.windows(n).map(|w| w.iter().collect::<String>()));
    }
    if use_boundaries && !(ngram_min..=ngram_max).contains(&chars.len()) {
        grams.push(chars.iter().collect());
    }
    Ok(grams)
}

/// 64-bit FNV-1a of the n-gram's UTF-8 bytes, reduced modulo `buckets`.
pub fn hash_subword(ngram: &str, buckets: usize) -> usize {
    assert!(buckets > 0, "bucket count must be positive");
    let mut hasher = FnvHasher::default();
    hasher.write(ngram.as_bytes());
    (hasher.finish() % buckets as u64) as usize
}
