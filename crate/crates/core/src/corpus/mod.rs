//! Ingestion of labeled headline sets and social-media post corpora.

mod article;
mod labeled;
mod posts;

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

pub use self::article::{extract_structure, ArticleStructure};
pub use self::labeled::{
    label_counts, load_labeled_headlines, read_labeled_headlines, write_labeled_headlines,
    LabelCounts, LabeledHeadline,
};
pub use self::posts::{
    category_counts, load_posts, read_posts, write_posts, Category, MediaGroup, Post, PostType,
    Reactions,
};

/// The two classes a headline can belong to.
///
/// The declaration order is the serialized label order of a classifier:
/// index 0 is `NonClickbait`, index 1 is `Clickbait`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Label {
    NonClickbait,
    Clickbait,
}

impl Label {
    pub const ALL: [Label; 2] = [Label::NonClickbait, Label::Clickbait];

    pub fn index(self) -> usize {
        match self {
            Label::NonClickbait => 0,
            Label::Clickbait => 1,
        }
    }

    pub fn from_index(index: usize) -> Option<Label> {
        Label::ALL.get(index).copied()
    }

    pub fn as_str(self) -> &'static str {
        match self {
            Label::NonClickbait => "non_clickbait",
            Label::Clickbait => "clickbait",
        }
    }

    pub fn is_clickbait(self) -> bool {
        self == Label::Clickbait
    }
}

impl fmt::Display for Label {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Label {
    type Err = String;

    /// Accepts `0`/`1` (1 = clickbait) or the literal class names.
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "1" | "clickbait" => Ok(Label::Clickbait),
            "0" | "non_clickbait" => Ok(Label::NonClickbait),
            other => Err(other.to_string()),
        }
    }
}
