//! Corpus measurements over classifier-annotated posts: clickbait rates,
//! clickbait status messages on non-clickbait links, engagement, link
//! reposts and the daily posting gap between media groups.

use std::collections::{BTreeMap, BTreeSet};

use chrono::NaiveDate;
use log::{info, warn};
use serde::Serialize;
use url::Url;

use crate::classify::ClassifierModel;
use crate::corpus::{Category, Label, MediaGroup, Post, PostType};
use crate::similar::{headline_body_similarity, Aggregation};

#[derive(Clone, Debug, PartialEq)]
pub struct AnnotatedPost {
    pub post: Post,
    /// `None` when the headline has no tokens; such posts stay out of rate tables.
    pub headline_label: Option<Label>,
    pub headline_p: Option<f64>,
    /// Present when the post carries a non-empty status message.
    pub status_label: Option<Label>,
    pub status_p: Option<f64>,
    /// Headline-body similarity (max over lede sentences) for link posts with a body.
    pub similarity: Option<f64>,
}

fn has_tokens(text: &str) -> bool {
    text.chars().any(char::is_alphanumeric)
}

/// Labels headlines and status messages with `model` and scores
/// headline-body similarity. Output order follows `posts`.
pub fn annotate_corpus(
    posts: &[Post],
    model: &ClassifierModel,
    workers: usize,
) -> Vec<AnnotatedPost> {
    let headlines: Vec<&str> = posts.iter().map(|p| p.headline.as_str()).collect();
    let heads = model.predict_batch(&headlines, workers);
    let (with_message, messages): (Vec<usize>, Vec<&str>) = posts
        .iter()
        .enumerate()
        .filter_map(|(i, p)| {
            p.message
                .as_deref()
                .filter(|m| !m.trim().is_empty())
                .map(|m| (i, m))
        })
        .unzip();
    let mut status = vec![None; posts.len()];
    for (i, p) in with_message
        .into_iter()
        .zip(model.predict_batch(&messages, workers))
    {
        status[i] = Some(p);
    }

    let mut empty = 0usize;
    let out: Vec<AnnotatedPost> = posts
        .iter()
        .zip(heads)
        .zip(status)
        .map(|((post, head), status)| {
            let labeled = has_tokens(&post.headline);
            if !labeled {
                empty += 1;
            }
            let similarity = match (&post.body, post.post_type) {
                (Some(body), PostType::Link) if labeled => {
                    headline_body_similarity(&post.headline, body, Aggregation::Max)
                        .ok()
                        .map(|s| s.value)
                }
                _ => None,
            };
            AnnotatedPost {
                post: post.clone(),
                headline_label: labeled.then_some(head.label),
                headline_p: labeled.then_some(head.p_clickbait()),
                status_label: status.map(|s| s.label),
                status_p: status.map(|s| s.p_clickbait()),
                similarity,
            }
        })
        .collect();
    if empty > 0 {
        warn!("{empty} posts have empty headlines and are excluded from rate tables");
    }
    info!("annotated {} posts", out.len());
    out
}

/// `100 * part / whole` rounded half-up to two decimals, computed on integers.
pub fn percent_half_up(part: u64, whole: u64) -> f64 {
    assert!(whole > 0, "percentage of an empty group");
    let (part, whole) = (part as u128, whole as u128);
    let hundredths = (20_000 * part + whole) / (2 * whole);
    hundredths as f64 / 100.0
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum GroupBy {
    Category,
    MediaGroup,
    Media,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct RateRow {
    pub key: String,
    /// The media's category for per-media rows.
    pub category: Option<Category>,
    pub clickbait_count: u64,
    pub non_clickbait_count: u64,
    pub percent: f64,
}

impl RateRow {
    pub fn new(
        key: impl Into<String>,
        category: Option<Category>,
        clickbait: u64,
        non_clickbait: u64,
    ) -> Self {
        RateRow {
            key: key.into(),
            category,
            clickbait_count: clickbait,
            non_clickbait_count: non_clickbait,
            percent: percent_half_up(clickbait, clickbait + non_clickbait),
        }
    }

    pub fn total(&self) -> u64 {
        self.clickbait_count + self.non_clickbait_count
    }
}

/// Headline clickbait counts per group, in key order. With `top_n` the rows
/// are instead ranked by percentage (ties by key) and truncated.
pub fn clickbait_rates<'a>(
    annotated: impl IntoIterator<Item = &'a AnnotatedPost>,
    group_by: GroupBy,
    top_n: Option<usize>,
) -> Vec<RateRow> {
    // Keyed on (category order, name) so category rows follow the enum order.
    type Key = (Option<Category>, String);
    let mut counts: BTreeMap<Key, (Option<Category>, [u64; 2])> = BTreeMap::new();
    for a in annotated {
        let Some(label) = a.headline_label else {
            continue;
        };
        let (sort, key, category) = match group_by {
            GroupBy::Category => (
                Some(a.post.category),
                a.post.category.as_str().to_string(),
                None,
            ),
            GroupBy::MediaGroup => (None, a.post.media_group.as_str().to_string(), None),
            GroupBy::Media => (None, a.post.media_name.clone(), Some(a.post.category)),
        };
        let entry = counts.entry((sort, key)).or_insert((category, [0, 0]));
        entry.1[label.index()] += 1;
    }
    let mut rows: Vec<RateRow> = counts
        .into_iter()
        .map(|((_, key), (category, [nc, cb]))| RateRow::new(key, category, cb, nc))
        .collect();
    if let Some(n) = top_n {
        rank(&mut rows);
        rows.truncate(n);
    }
    rows
}

fn rank(rows: &mut [RateRow]) {
    rows.sort_by(|a, b| {
        b.percent
            .total_cmp(&a.percent)
            .then_with(|| a.key.cmp(&b.key))
    });
}

/// The `n` media with the highest clickbait percentage, overall and within
/// each category.
pub fn top_proponents<'a>(
    annotated: impl IntoIterator<Item = &'a AnnotatedPost>,
    n: usize,
) -> Vec<(String, Vec<RateRow>)> {
    let all = clickbait_rates(annotated, GroupBy::Media, None);
    let mut overall = all.clone();
    rank(&mut overall);
    overall.truncate(n);
    let mut out = vec![("overall".to_string(), overall)];
    for category in Category::ALL {
        let mut rows: Vec<RateRow> = all
            .iter()
            .filter(|r| r.category == Some(category))
            .cloned()
            .collect();
        if rows.is_empty() {
            continue;
        }
        rank(&mut rows);
        rows.truncate(n);
        out.push((category.as_str().to_string(), rows));
    }
    out
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct StatusRow {
    pub category: Category,
    pub clickbait_status_count: u64,
    pub non_clickbait_link_count: u64,
    /// Non-clickbait link posts without a status message; not in the percentage.
    pub without_message_count: u64,
    /// `None` when no post in the category had a message.
    pub percent: Option<f64>,
}

/// Among link posts whose headline is non-clickbait and that carry a status
/// message, the share of messages labeled clickbait.
pub fn status_vs_headline<'a>(
    annotated: impl IntoIterator<Item = &'a AnnotatedPost>,
) -> Vec<StatusRow> {
    let mut counts: BTreeMap<Category, [u64; 3]> = BTreeMap::new();
    for a in annotated {
        if a.post.post_type != PostType::Link || a.headline_label != Some(Label::NonClickbait) {
            continue;
        }
        let c = counts.entry(a.post.category).or_default();
        match a.status_label {
            Some(Label::Clickbait) => c[0] += 1,
            Some(Label::NonClickbait) => c[1] += 1,
            None => c[2] += 1,
        }
    }
    counts
        .into_iter()
        .map(|(category, [cb, nc, none])| StatusRow {
            category,
            clickbait_status_count: cb,
            non_clickbait_link_count: nc,
            without_message_count: none,
            percent: (cb + nc > 0).then(|| percent_half_up(cb, cb + nc)),
        })
        .collect()
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize)]
pub struct Summary {
    pub mean: f64,
    pub median: f64,
}

impl Summary {
    fn of(values: &mut [f64]) -> Self {
        if values.is_empty() {
            return Summary::default();
        }
        values.sort_by(f64::total_cmp);
        let n = values.len();
        let median = if n % 2 == 1 {
            values[n / 2]
        } else {
            (values[n / 2 - 1] + values[n / 2]) / 2.0
        };
        Summary {
            mean: values.iter().sum::<f64>() / n as f64,
            median,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct EngagementCell {
    pub category: Category,
    pub label: Label,
    pub posts: u64,
    pub media: u64,
    pub reactions: Summary,
    pub shares: Summary,
    pub comments: Summary,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum EngagementMetric {
    Reactions,
    Shares,
    Comments,
}

/// Engagement per (category, headline label) cell. `by_post` summarizes
/// posts directly; `by_media` first averages within each media and then
/// summarizes those per-media averages.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct EngagementSummary {
    pub by_post: Vec<EngagementCell>,
    pub by_media: Vec<EngagementCell>,
}

impl EngagementSummary {
    /// Clickbait mean minus non-clickbait mean (per post) in one category;
    /// positive means clickbait posts draw more.
    pub fn clickbait_excess(&self, category: Category, metric: EngagementMetric) -> Option<f64> {
        let mean = |label| {
            self.by_post
                .iter()
                .find(|c| c.category == category && c.label == label)
                .map(|c| match metric {
                    EngagementMetric::Reactions => c.reactions.mean,
                    EngagementMetric::Shares => c.shares.mean,
                    EngagementMetric::Comments => c.comments.mean,
                })
        };
        Some(mean(Label::Clickbait)? - mean(Label::NonClickbait)?)
    }
}

pub fn engagement_summary<'a>(
    annotated: impl IntoIterator<Item = &'a AnnotatedPost>,
) -> EngagementSummary {
    type Cell = BTreeMap<String, Vec<[f64; 3]>>;
    let mut cells: BTreeMap<(Category, Label), Cell> = BTreeMap::new();
    for a in annotated {
        let Some(label) = a.headline_label else {
            continue;
        };
        let p = &a.post;
        cells
            .entry((p.category, label))
            .or_default()
            .entry(p.media_name.clone())
            .or_default()
            .push([
                p.reactions.total() as f64,
                p.shares as f64,
                p.comments as f64,
            ]);
    }
    let summarize = |category, label, media: u64, rows: Vec<[f64; 3]>| {
        let mut cols: [Vec<f64>; 3] = Default::default();
        for r in &rows {
            for (c, v) in cols.iter_mut().zip(r) {
                c.push(*v);
            }
        }
        let [mut r, mut s, mut c] = cols;
        EngagementCell {
            category,
            label,
            posts: 0,
            media,
            reactions: Summary::of(&mut r),
            shares: Summary::of(&mut s),
            comments: Summary::of(&mut c),
        }
    };
    let mut by_post = Vec::new();
    let mut by_media = Vec::new();
    for ((category, label), media) in cells {
        let n_media = media.len() as u64;
        let n_posts = media.values().map(|v| v.len() as u64).sum();
        let per_media: Vec<[f64; 3]> = media
            .values()
            .map(|rows| {
                let n = rows.len() as f64;
                let mut m = [0.0; 3];
                for r in rows {
                    for k in 0..3 {
                        m[k] += r[k];
                    }
                }
                m.map(|x| x / n)
            })
            .collect();
        let all: Vec<[f64; 3]> = media.into_values().flatten().collect();
        by_post.push(EngagementCell {
            posts: n_posts,
            ..summarize(category, label, n_media, all)
        });
        by_media.push(EngagementCell {
            posts: n_posts,
            ..summarize(category, label, n_media, per_media)
        });
    }
    EngagementSummary { by_post, by_media }
}

/// Lowercases scheme and host (via URL parsing), drops the fragment and any
/// `utm_*` query parameters. Unparseable links are only trimmed.
pub fn normalize_url(raw: &str) -> String {
    let raw = raw.trim();
    let Ok(mut url) = Url::parse(raw) else {
        return raw.to_string();
    };
    url.set_fragment(None);
    let kept: Option<String> = url.query().map(|q| {
        q.split('&')
            .filter(|pair| {
                let key = pair.split('=').next().unwrap_or("");
                !pair.is_empty() && !key.to_ascii_lowercase().starts_with("utm_")
            })
            .collect::<Vec<_>>()
            .join("&")
    });
    match kept {
        Some(q) if !q.is_empty() => url.set_query(Some(&q)),
        _ => url.set_query(None),
    }
    url.to_string()
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct RepostGroup {
    pub url: String,
    pub count: u64,
    /// Most frequent posting category; ties go to the earlier category.
    pub category: Category,
    /// Most frequent headline label; ties go to non-clickbait.
    pub label: Option<Label>,
    pub by_category: BTreeMap<Category, u64>,
}

/// Link posts grouped by normalized URL, keeping groups of at least
/// `min_count` posts, most reposted first.
pub fn repost_frequency<'a>(
    annotated: impl IntoIterator<Item = &'a AnnotatedPost>,
    min_count: u64,
) -> Vec<RepostGroup> {
    let mut groups: BTreeMap<String, (BTreeMap<Category, u64>, [u64; 2])> = BTreeMap::new();
    for a in annotated {
        if a.post.post_type != PostType::Link {
            continue;
        }
        let Some(link) = a.post.link_url.as_deref().filter(|u| !u.trim().is_empty()) else {
            continue;
        };
        let g = groups.entry(normalize_url(link)).or_default();
        *g.0.entry(a.post.category).or_default() += 1;
        if let Some(label) = a.headline_label {
            g.1[label.index()] += 1;
        }
    }
    let mut out: Vec<RepostGroup> = groups
        .into_iter()
        .filter_map(|(url, (by_category, labels))| {
            let count: u64 = by_category.values().sum();
            if count < min_count {
                return None;
            }
            let category = by_category
                .iter()
                .max_by(|a, b| a.1.cmp(b.1).then_with(|| b.0.cmp(a.0)))
                .map(|(c, _)| *c)?;
            let label = match labels {
                [0, 0] => None,
                [nc, cb] if cb > nc => Some(Label::Clickbait),
                _ => Some(Label::NonClickbait),
            };
            Some(RepostGroup {
                url,
                count,
                category,
                label,
                by_category,
            })
        })
        .collect();
    out.sort_by(|a, b| b.count.cmp(&a.count).then_with(|| a.url.cmp(&b.url)));
    out
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct DailyDelta {
    pub date: NaiveDate,
    pub mainstream_mean: f64,
    pub unreliable_mean: f64,
    pub delta: f64,
}

/// Per UTC day from the first to the last post: mean posts per mainstream
/// media minus mean posts per unreliable media. Each group's media set is
/// every media of that group seen anywhere in the corpus, so a media that
/// is silent on a day contributes zero to that day's mean.
pub fn posts_per_day_delta<'a>(posts: impl IntoIterator<Item = &'a Post>) -> Vec<DailyDelta> {
    let mut media: [BTreeSet<&str>; 2] = Default::default();
    let mut per_day: BTreeMap<NaiveDate, [u64; 2]> = BTreeMap::new();
    for p in posts {
        let g = match p.media_group {
            MediaGroup::Mainstream => 0,
            MediaGroup::Unreliable => 1,
        };
        media[g].insert(p.media_name.as_str());
        per_day.entry(p.timestamp.date_naive()).or_default()[g] += 1;
    }
    let (Some(first), Some(last)) = (
        per_day.keys().next().copied(),
        per_day.keys().next_back().copied(),
    ) else {
        return Vec::new();
    };
    let mean = |count: u64, g: usize| {
        if media[g].is_empty() {
            0.0
        } else {
            count as f64 / media[g].len() as f64
        }
    };
    first
        .iter_days()
        .take_while(|d| *d <= last)
        .map(|date| {
            let [m, u] = per_day.get(&date).copied().unwrap_or_default();
            let (mainstream_mean, unreliable_mean) = (mean(m, 0), mean(u, 1));
            DailyDelta {
                date,
                mainstream_mean,
                unreliable_mean,
                delta: mainstream_mean - unreliable_mean,
            }
        })
        .collect()
}
