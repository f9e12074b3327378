use std::collections::BTreeMap;
use std::fmt;
use std::fs::File;
use std::io::{BufRead, BufReader, Write};
use std::path::Path;

use chrono::{DateTime, Utc};
use serde::{Deserialize, Deserializer, Serialize};

use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum MediaGroup {
    Mainstream,
    Unreliable,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Category {
    Broadcast,
    Print,
    ClickbaitMedia,
    Conspiracy,
    JunkScience,
    Satire,
}

impl Category {
    pub const ALL: [Category; 6] = [
        Category::Broadcast,
        Category::Print,
        Category::ClickbaitMedia,
        Category::Conspiracy,
        Category::JunkScience,
        Category::Satire,
    ];

    pub fn group(self) -> MediaGroup {
        match self {
            Category::Broadcast | Category::Print => MediaGroup::Mainstream,
            _ => MediaGroup::Unreliable,
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            Category::Broadcast => "broadcast",
            Category::Print => "print",
            Category::ClickbaitMedia => "clickbait_media",
            Category::Conspiracy => "conspiracy",
            Category::JunkScience => "junk_science",
            Category::Satire => "satire",
        }
    }
}

impl fmt::Display for Category {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl MediaGroup {
    pub fn as_str(self) -> &'static str {
        match self {
            MediaGroup::Mainstream => "mainstream",
            MediaGroup::Unreliable => "unreliable",
        }
    }
}

impl fmt::Display for MediaGroup {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PostType {
    Link,
    Video,
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Reactions {
    pub like: u64,
    pub love: u64,
    pub haha: u64,
    pub wow: u64,
    pub sad: u64,
    pub angry: u64,
}

impl Reactions {
    pub fn total(&self) -> u64 {
        self.like + self.love + self.haha + self.wow + self.sad + self.angry
    }
}

/// A link or video post collected from a media page.
#[derive(Clone, Debug, PartialEq)]
pub struct Post {
    pub media_name: String,
    pub media_group: MediaGroup,
    pub category: Category,
    pub post_type: PostType,
    pub headline: String,
    /// Status text written alongside the post.
    pub message: Option<String>,
    /// Article body; only link posts carry one.
    pub body: Option<String>,
    pub link_url: Option<String>,
    pub timestamp: DateTime<Utc>,
    pub reactions: Reactions,
    pub shares: u64,
    pub comments: u64,
}

/// The flat on-disk record. Unknown keys are ignored.
#[derive(Debug, Serialize, Deserialize)]
struct PostRecord {
    media_name: String,
    media_group: MediaGroup,
    category: Category,
    post_type: PostType,
    headline: String,
    #[serde(default)]
    message: Option<String>,
    #[serde(default)]
    body: Option<String>,
    #[serde(default)]
    link_url: Option<String>,
    timestamp: DateTime<Utc>,
    #[serde(default, deserialize_with = "count")]
    like: u64,
    #[serde(default, deserialize_with = "count")]
    love: u64,
    #[serde(default, deserialize_with = "count")]
    haha: u64,
    #[serde(default, deserialize_with = "count")]
    wow: u64,
    #[serde(default, deserialize_with = "count")]
    sad: u64,
    #[serde(default, deserialize_with = "count")]
    angry: u64,
    #[serde(default, deserialize_with = "count")]
    shares: u64,
    #[serde(default, deserialize_with = "count")]
    comments: u64,
}

/// Null counts read as zero.
fn count<'de, D: Deserializer<'de>>(de: D) -> std::result::Result<u64, D::Error> {
    Ok(Option::<u64>::deserialize(de)?.unwrap_or(0))
}

impl Post {
    fn validate(&self) -> std::result::Result<(), String> {
        if self.post_type == PostType::Video && self.body.is_some() {
            return Err("video posts cannot carry an article body".into());
        }
        if self.category.group() != self.media_group {
            return Err(format!(
                "category `{}` is not a {} category",
                self.category, self.media_group
            ));
        }
        Ok(())
    }

    fn from_record(r: PostRecord) -> std::result::Result<Self, String> {
        let post = Post {
            media_name: r.media_name,
            media_group: r.media_group,
            category: r.category,
            post_type: r.post_type,
            headline: r.headline,
            message: r.message,
            body: r.body,
            link_url: r.link_url,
            timestamp: r.timestamp,
            reactions: Reactions {
                like: r.like,
                love: r.love,
                haha: r.haha,
                wow: r.wow,
                sad: r.sad,
                angry: r.angry,
            },
            shares: r.shares,
            comments: r.comments,
        };
        post.validate()?;
        Ok(post)
    }

    fn to_record(&self) -> PostRecord {
        PostRecord {
            media_name: self.media_name.clone(),
            media_group: self.media_group,
            category: self.category,
            post_type: self.post_type,
            headline: self.headline.clone(),
            message: self.message.clone(),
            body: self.body.clone(),
            link_url: self.link_url.clone(),
            timestamp: self.timestamp,
            like: self.reactions.like,
            love: self.reactions.love,
            haha: self.reactions.haha,
            wow: self.reactions.wow,
            sad: self.reactions.sad,
            angry: self.reactions.angry,
            shares: self.shares,
            comments: self.comments,
        }
    }
}

pub fn load_posts(path: impl AsRef<Path>) -> Result<Vec<Post>> {
    let path = path.as_ref();
    let file = File::open(path).map_err(|source| Error::Open {
        path: path.to_path_buf(),
        source,
    })?;
    read_posts(BufReader::new(file))
}

/// Reads line-delimited JSON post records. Blank lines are skipped.
pub fn read_posts(reader: impl BufRead) -> Result<Vec<Post>> {
    let mut posts = Vec::new();
    for (idx, line) in reader.lines().enumerate() {
        let lineno = idx + 1;
        let line = line?;
        if line.trim().is_empty() {
            continue;
        }
        let record: PostRecord =
            serde_json::from_str(&line).map_err(|e| Error::parse(lineno, e.to_string()))?;
        let post = Post::from_record(record).map_err(|msg| Error::parse(lineno, msg))?;
        posts.push(post);
    }
    Ok(posts)
}

pub fn write_posts<'a>(
    mut writer: impl Write,
    posts: impl IntoIterator<Item = &'a Post>,
) -> Result<()> {
    for post in posts {
        serde_json::to_writer(&mut writer, &post.to_record()).map_err(std::io::Error::from)?;
        writer.write_all(b"\n")?;
    }
    Ok(())
}

pub fn category_counts<'a>(posts: impl IntoIterator<Item = &'a Post>) -> BTreeMap<Category, usize> {
    let mut counts = BTreeMap::new();
    for post in posts {
        *counts.entry(post.category).or_insert(0) += 1;
    }
    counts
}
