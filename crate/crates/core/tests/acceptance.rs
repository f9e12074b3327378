//! Acceptance suite. Prints one PASS / FAIL / NOT RUN line per criterion and
//! exits non-zero if any criterion that ran failed.
//!
//! Criteria 1 and 2 need the public 32,000-headline labeled dataset as a
//! `label<TAB>headline` file named by `BAITSCOPE_HEADLINE_DATASET`; without it
//! they report NOT RUN, followed by a synthetic run of the same protocol.

use std::collections::{BTreeSet, HashSet};
use std::io::Write;
use std::time::{Duration, Instant};

use baitscope::analytics::{
    clickbait_rates, engagement_summary, posts_per_day_delta, repost_frequency, status_vs_headline,
    AnnotatedPost, GroupBy,
};
use baitscope::classify::{cross_entropy_loss, softmax_step, train_classifier, write_classifier};
use baitscope::corpus::{load_labeled_headlines, Reactions};
use baitscope::embed::{
    logistic_step, negative_sampling_loss, train_embeddings, write_model, EmbeddingModel,
    Pretrained,
};
use baitscope::metrics::{
    classification_metrics, cohens_kappa, cross_validate, roc_auc, MetricsReport,
};
use baitscope::similar::{
    bow_vector, cosine, density_estimate, headline_body_similarity, Aggregation,
};
use baitscope::textproc::{hash_subword, subwords, tokenize};
use baitscope::topics::{extract_biterms, top_words, BtmConfig, BtmSampler};
use baitscope::{
    Category, ClassifierConfig, ConfusionMatrix, EmbeddingConfig, Label, LabeledHeadline, Post,
    PostType, VocabConfig,
};
use chrono::{TimeZone, Utc};
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

enum Status {
    Pass,
    Fail,
    NotRun,
}

struct Outcome {
    status: Status,
    detail: String,
}

fn check(ok: bool, detail: impl Into<String>) -> Outcome {
    Outcome {
        status: if ok { Status::Pass } else { Status::Fail },
        detail: detail.into(),
    }
}

fn not_run(detail: impl Into<String>) -> Outcome {
    Outcome {
        status: Status::NotRun,
        detail: detail.into(),
    }
}

fn rel_error(a: &[f64], b: &[f64]) -> f64 {
    let diff: f64 = a
        .iter()
        .zip(b)
        .map(|(x, y)| (x - y).powi(2))
        .sum::<f64>()
        .sqrt();
    let scale: f64 =
        a.iter().map(|x| x * x).sum::<f64>().sqrt() + b.iter().map(|x| x * x).sum::<f64>().sqrt();
    if scale < 1e-12 {
        0.0
    } else {
        diff / scale
    }
}

// ---------------------------------------------------------------------------
// Criteria 1 and 2: cross-validated accuracy and the pretraining comparison.

const BAIT: &[&str] = &[
    "you",
    "won't",
    "believe",
    "what",
    "happened",
    "next",
    "this",
    "one",
    "trick",
    "will",
    "make",
    "cry",
    "reasons",
    "why",
    "photos",
    "that",
    "shock",
    "these",
    "things",
    "only",
    "people",
    "know",
    "amazing",
    "can't",
    "stop",
    "watching",
    "here's",
    "everything",
    "need",
    "totally",
    "guess",
    "actually",
];
const NEWS: &[&str] = &[
    "senate", "passes", "budget", "bill", "court", "rules", "on", "state", "election", "law",
    "police", "arrest", "suspect", "in", "robbery", "bank", "raises", "interest", "rates", "storm",
    "floods", "coastal", "towns", "council", "approves", "transit", "plan", "minister", "resigns",
    "after", "inquiry", "talks",
];
const SHARED: &[&str] = &[
    "new", "year", "man", "woman", "day", "city", "world", "first",
];

fn synthetic_headlines(n: usize, seed: u64) -> Vec<LabeledHeadline> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..n)
        .map(|i| {
            let (pool, label) = if i % 2 == 0 {
                (BAIT, Label::Clickbait)
            } else {
                (NEWS, Label::NonClickbait)
            };
            let len = rng.gen_range(5..11);
            let words: Vec<&str> = (0..len)
                .map(|_| {
                    // Mostly class words, with shared words and some from the other class.
                    let r: f64 = rng.gen();
                    if r < 0.2 {
                        SHARED[rng.gen_range(0..SHARED.len())]
                    } else if r < 0.3 {
                        let other = if label == Label::Clickbait {
                            NEWS
                        } else {
                            BAIT
                        };
                        other[rng.gen_range(0..other.len())]
                    } else {
                        pool[rng.gen_range(0..pool.len())]
                    }
                })
                .collect();
            LabeledHeadline::new(words.join(" "), label).unwrap()
        })
        .collect()
}

fn workers() -> usize {
    std::env::var("BAITSCOPE_WORKERS")
        .ok()
        .and_then(|w| w.parse().ok())
        .unwrap_or(4)
}

fn summarize(r: &MetricsReport) -> String {
    format!(
        "accuracy {:.4}, kappa {:.4}, roc-auc {:.4}, precision {:.4}, recall {:.4}, F {:.4}",
        r.accuracy, r.kappa, r.roc_auc, r.precision, r.recall, r.f_measure
    )
}

/// Runs criteria 1 and 2 on `data` with the given configurations.
fn cv_and_pretraining(
    data: &[LabeledHeadline],
    classifier: &ClassifierConfig,
    embedding: &EmbeddingConfig,
    time_limit: Option<Duration>,
) -> (Outcome, Outcome) {
    let start = Instant::now();
    let plain = match cross_validate(data, 10, 5, classifier, None) {
        Ok(r) => r,
        Err(e) => {
            return (
                check(false, format!("cross-validation failed: {e}")),
                not_run("criterion 1 failed"),
            )
        }
    };
    let elapsed = start.elapsed();
    let in_time = time_limit.is_none_or(|t| elapsed <= t);
    let first = check(
        plain.accuracy >= 0.95 && plain.kappa >= 0.90 && in_time,
        format!(
            "{} (need accuracy >= 0.95, kappa >= 0.90); {:.1}s",
            summarize(&plain),
            elapsed.as_secs_f64()
        ),
    );

    let corpus: Vec<Vec<String>> = data.iter().map(|h| tokenize(&h.text)).collect();
    let second = match train_embeddings(&corpus, embedding) {
        Ok(t) => {
            let pretrained = Pretrained::Model(t.model);
            match cross_validate(data, 10, 5, classifier, Some(&pretrained)) {
                Ok(r) => check(
                    r.accuracy >= plain.accuracy - 0.005,
                    format!(
                        "pretrained accuracy {:.4} vs {:.4} without (allowed drop 0.005)",
                        r.accuracy, plain.accuracy
                    ),
                ),
                Err(e) => check(false, format!("cross-validation failed: {e}")),
            }
        }
        Err(e) => check(false, format!("pretraining failed: {e}")),
    };
    (first, second)
}

fn criteria_1_2() -> Vec<(String, Outcome)> {
    let mut out = Vec::new();
    match std::env::var("BAITSCOPE_HEADLINE_DATASET") {
        Ok(path) => {
            let data = match load_labeled_headlines(&path) {
                Ok(d) => d,
                Err(e) => {
                    out.push(("1".into(), check(false, format!("cannot load {path}: {e}"))));
                    out.push(("2".into(), not_run("dataset did not load")));
                    return out;
                }
            };
            let classifier = ClassifierConfig {
                seed: 1,
                workers: workers(),
                ..ClassifierConfig::default()
            };
            let embedding = EmbeddingConfig {
                seed: 1,
                workers: workers(),
                ..EmbeddingConfig::default()
            };
            let (a, b) = cv_and_pretraining(
                &data,
                &classifier,
                &embedding,
                Some(Duration::from_secs(3600)),
            );
            out.push(("1".into(), a));
            out.push(("2".into(), b));
        }
        Err(_) => {
            let why = "labeled headline dataset not available; set BAITSCOPE_HEADLINE_DATASET to a label<TAB>headline file";
            out.push(("1".into(), not_run(why)));
            out.push(("2".into(), not_run(why)));
        }
    }

    // The same protocol on synthetic headlines, as a check that the pipeline
    // itself reaches the thresholds on a learnable task.
    let data = synthetic_headlines(2_000, 11);
    let vocab = VocabConfig {
        buckets: 20_000,
        ..VocabConfig::default()
    };
    let classifier = ClassifierConfig {
        dim: 32,
        vocab: vocab.clone(),
        seed: 1,
        ..ClassifierConfig::default()
    };
    let embedding = EmbeddingConfig {
        dim: 32,
        epochs: 3,
        seed: 1,
        vocab: VocabConfig {
            min_count: 5,
            ..vocab
        },
        ..EmbeddingConfig::default()
    };
    let (a, b) = cv_and_pretraining(&data, &classifier, &embedding, None);
    out.push(("1 (synthetic)".into(), a));
    out.push(("2 (synthetic)".into(), b));
    out
}

// ---------------------------------------------------------------------------
// Criterion 3: a word vector is the sum of its unit rows.

fn explicit_sum(model: &EmbeddingModel, word: &str) -> Vec<f32> {
    let vocab = model.vocab();
    let cfg = vocab.config();
    let mut rows = Vec::new();
    if let Some(i) = vocab.index(word) {
        rows.push(i);
    }
    for ngram in subwords(word, cfg.ngram_min, cfg.ngram_max, cfg.use_boundaries).unwrap() {
        rows.push(vocab.len() + hash_subword(&ngram, cfg.buckets));
    }
    let mut sum = vec![0f32; model.dim()];
    for r in rows {
        for (s, v) in sum.iter_mut().zip(model.input().row(r)) {
            *s += *v;
        }
    }
    sum
}

fn criterion_3() -> Outcome {
    let data = synthetic_headlines(1_500, 3);
    let corpus: Vec<Vec<String>> = data.iter().map(|h| tokenize(&h.text)).collect();
    let config = EmbeddingConfig {
        dim: 24,
        epochs: 2,
        seed: 5,
        vocab: VocabConfig {
            min_count: 1,
            buckets: 50_000,
            ..VocabConfig::default()
        },
        ..EmbeddingConfig::default()
    };
    let model = train_embeddings(&corpus, &config).unwrap().model;
    let mut rng = ChaCha8Rng::seed_from_u64(17);
    let mut words: Vec<String> = Vec::new();
    for i in 0..1_000 {
        if i % 2 == 0 {
            let v = model.vocab().words();
            words.push(v[rng.gen_range(0..v.len())].clone());
        } else {
            let len = rng.gen_range(1..13);
            words.push(
                (0..len)
                    .map(|_| rng.gen_range(b'a'..=b'z') as char)
                    .collect(),
            );
        }
    }
    let mismatched = words
        .iter()
        .filter(|w| {
            let a = model.word_vector(w);
            let b = explicit_sum(&model, w);
            a.iter().zip(&b).any(|(x, y)| x.to_bits() != y.to_bits())
        })
        .count();
    check(
        mismatched == 0,
        format!("{mismatched} of 1000 words differ bitwise from the explicit row sum"),
    )
}

// ---------------------------------------------------------------------------
// Criterion 4: analytic gradients against central finite differences.

const H: f64 = 1e-6;

fn fd<Fun: Fn(&[f64]) -> f64>(f: Fun, x: &[f64]) -> Vec<f64> {
    (0..x.len())
        .map(|i| {
            let mut p = x.to_vec();
            let mut m = x.to_vec();
            p[i] += H;
            m[i] -= H;
            (f(&p) - f(&m)) / (2.0 * H)
        })
        .collect()
}

fn criterion_4() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(23);
    let mut worst_ns: f64 = 0.0;
    let mut worst_ce: f64 = 0.0;
    for _ in 0..100 {
        let d = rng.gen_range(2..12);
        let k = rng.gen_range(1..6);
        let vec = |rng: &mut ChaCha8Rng, n: usize| -> Vec<f64> {
            (0..n).map(|_| rng.gen_range(-1.0..1.0)).collect()
        };
        let hidden = vec(&mut rng, d);
        let pos = vec(&mut rng, d);
        let negs: Vec<Vec<f64>> = (0..k).map(|_| vec(&mut rng, d)).collect();

        // Analytic: accumulate lr = 1 logistic steps on copies of the rows.
        let mut grad_h = vec![0.0; d];
        let mut rows: Vec<Vec<f64>> = std::iter::once(pos.clone())
            .chain(negs.iter().cloned())
            .collect();
        for (j, row) in rows.iter_mut().enumerate() {
            logistic_step(&hidden, row, j == 0, 1.0, &mut grad_h);
        }
        let analytic_h: Vec<f64> = grad_h.iter().map(|g| -g).collect();
        let loss = |h: &[f64], p: &[f64], n: &[Vec<f64>]| {
            let refs: Vec<&[f64]> = n.iter().map(Vec::as_slice).collect();
            negative_sampling_loss(h, p, &refs)
        };
        worst_ns = worst_ns.max(rel_error(
            &analytic_h,
            &fd(|h| loss(h, &pos, &negs), &hidden),
        ));
        let analytic_pos: Vec<f64> = pos
            .iter()
            .zip(&rows[0])
            .map(|(old, new)| old - new)
            .collect();
        worst_ns = worst_ns.max(rel_error(
            &analytic_pos,
            &fd(|p| loss(&hidden, p, &negs), &pos),
        ));
        let j = rng.gen_range(0..k);
        let analytic_neg: Vec<f64> = negs[j]
            .iter()
            .zip(&rows[j + 1])
            .map(|(old, new)| old - new)
            .collect();
        let numeric_neg = fd(
            |u| {
                let mut n = negs.clone();
                n[j] = u.to_vec();
                loss(&hidden, &pos, &n)
            },
            &negs[j],
        );
        worst_ns = worst_ns.max(rel_error(&analytic_neg, &numeric_neg));

        let weights = vec(&mut rng, 2 * d);
        let hidden = vec(&mut rng, d);
        let label = rng.gen_range(0..2);
        let mut w = weights.clone();
        let mut gh = vec![0.0; d];
        softmax_step(&mut w, &hidden, label, 1.0, &mut gh);
        let analytic_h: Vec<f64> = gh.iter().map(|g| -g).collect();
        let analytic_w: Vec<f64> = weights.iter().zip(&w).map(|(old, new)| old - new).collect();
        worst_ce = worst_ce.max(rel_error(
            &analytic_h,
            &fd(|h| cross_entropy_loss(&weights, h, label), &hidden),
        ));
        worst_ce = worst_ce.max(rel_error(
            &analytic_w,
            &fd(|w| cross_entropy_loss(w, &hidden, label), &weights),
        ));
    }
    check(
        worst_ns < 1e-4 && worst_ce < 1e-4,
        format!("worst relative error: negative sampling {worst_ns:.3e}, cross-entropy {worst_ce:.3e} (limit 1e-4)"),
    )
}

// ---------------------------------------------------------------------------
// Criterion 5: metrics against brute-force references.

fn brute_auc(scores: &[f64], labels: &[Label]) -> f64 {
    let mut wins = 0.0;
    let mut pairs = 0.0;
    for (i, li) in labels.iter().enumerate() {
        for (j, lj) in labels.iter().enumerate() {
            if *li == Label::Clickbait && *lj == Label::NonClickbait {
                pairs += 1.0;
                if scores[i] > scores[j] {
                    wins += 1.0;
                } else if scores[i] == scores[j] {
                    wins += 0.5;
                }
            }
        }
    }
    wins / pairs
}

fn criterion_5() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(29);
    let mut worst: f64 = 0.0;
    for _ in 0..1_000 {
        let n = rng.gen_range(2..80);
        let mut labels: Vec<Label> = (0..n).map(|_| Label::ALL[rng.gen_range(0..2)]).collect();
        labels[0] = Label::Clickbait;
        labels[1] = Label::NonClickbait;
        let predicted: Vec<Label> = (0..n).map(|_| Label::ALL[rng.gen_range(0..2)]).collect();
        let levels = rng.gen_range(2..12);
        let scores: Vec<f64> = (0..n)
            .map(|_| rng.gen_range(0..levels) as f64 / levels as f64)
            .collect();

        // Reference: item-level tallies, ratios and agreement computed directly.
        let (mut tp, mut fp, mut fn_, mut tn) = (0u64, 0u64, 0u64, 0u64);
        for (t, p) in labels.iter().zip(&predicted) {
            match (t, p) {
                (Label::Clickbait, Label::Clickbait) => tp += 1,
                (Label::NonClickbait, Label::Clickbait) => fp += 1,
                (Label::Clickbait, Label::NonClickbait) => fn_ += 1,
                (Label::NonClickbait, Label::NonClickbait) => tn += 1,
            }
        }
        let nf = n as f64;
        let div = |a: u64, b: u64| if b == 0 { 0.0 } else { a as f64 / b as f64 };
        let precision = div(tp, tp + fp);
        let recall = div(tp, tp + fn_);
        let f = if precision + recall > 0.0 {
            2.0 * precision * recall / (precision + recall)
        } else {
            0.0
        };
        let mut chance = 0.0;
        for class in Label::ALL {
            let t = labels.iter().filter(|l| **l == class).count() as f64 / nf;
            let p = predicted.iter().filter(|l| **l == class).count() as f64 / nf;
            chance += t * p;
        }
        let observed = (tp + tn) as f64 / nf;
        let kappa = if chance >= 1.0 {
            0.0
        } else {
            (observed - chance) / (1.0 - chance)
        };

        let cm = ConfusionMatrix::from_pairs(&labels, &predicted);
        let m = classification_metrics(&cm).unwrap();
        let k = cohens_kappa(&cm).unwrap();
        let auc = roc_auc(&scores, &labels).unwrap();
        for (a, b) in [
            (m.precision, precision),
            (m.recall, recall),
            (m.f_measure, f),
            (m.accuracy, observed),
            (k.value, kappa),
            (auc, brute_auc(&scores, &labels)),
        ] {
            worst = worst.max((a - b).abs());
        }
    }
    let kappa = cohens_kappa(&ConfusionMatrix::new(45, 5, 10, 40))
        .unwrap()
        .value;
    let auc = roc_auc(
        &[0.8, 0.4, 0.6, 0.2],
        &[
            Label::Clickbait,
            Label::Clickbait,
            Label::NonClickbait,
            Label::NonClickbait,
        ],
    )
    .unwrap();
    check(
        worst <= 1e-12 && kappa == 0.70 && auc == 0.75,
        format!("max deviation {worst:.1e} over 1000 instances (limit 1e-12); kappa example {kappa}, AUC example {auc}"),
    )
}

// ---------------------------------------------------------------------------
// Criterion 6: planted topics.

fn criterion_6() -> Outcome {
    let start = Instant::now();
    let planted: [Vec<String>; 2] = [
        (0..10).map(|i| format!("alpha{i}")).collect(),
        (0..10).map(|i| format!("beta{i}")).collect(),
    ];
    let mut rng = ChaCha8Rng::seed_from_u64(31);
    let docs: Vec<Vec<String>> = (0..500)
        .map(|i| {
            let topic = &planted[i % 2];
            let len = rng.gen_range(4..9);
            (0..len)
                .map(|_| topic[rng.gen_range(0..10)].clone())
                .collect()
        })
        .collect();
    let corpus = extract_biterms(&docs, &HashSet::new());
    let config = BtmConfig {
        seed: 3,
        ..BtmConfig::with_topics(2)
    };
    let mut sampler = BtmSampler::new(&corpus, &config).unwrap();
    let mut invariant_failures = 0;
    for _ in 0..config.iterations {
        sampler.sweep();
        let total: u64 = sampler.n_z().iter().sum();
        let rows_ok = sampler
            .n_wz()
            .iter()
            .zip(sampler.n_z())
            .all(|(row, &nz)| row.iter().sum::<u64>() == 2 * nz);
        if total != corpus.biterms.len() as u64 || !rows_ok {
            invariant_failures += 1;
        }
    }
    let model = sampler.into_model();
    let summary = top_words(&model, 10).unwrap();
    let fitted: Vec<BTreeSet<&str>> = summary
        .topics
        .iter()
        .map(|t| t.iter().map(|(w, _)| w.as_str()).collect())
        .collect();
    let overlap = |z: usize, p: usize| {
        planted[p]
            .iter()
            .filter(|w| fitted[z].contains(w.as_str()))
            .count()
    };
    // Best one-to-one matching of fitted to planted topics.
    let (a, b) = if overlap(0, 0) + overlap(1, 1) >= overlap(0, 1) + overlap(1, 0) {
        (overlap(0, 0), overlap(1, 1))
    } else {
        (overlap(1, 0), overlap(0, 1))
    };
    let elapsed = start.elapsed();
    check(
        a >= 8 && b >= 8 && invariant_failures == 0 && elapsed < Duration::from_secs(60),
        format!(
            "recovered {a}/10 and {b}/10 planted words; invariants broken in {invariant_failures} of {} sweeps; {:.2}s",
            config.iterations,
            elapsed.as_secs_f64()
        ),
    )
}

// ---------------------------------------------------------------------------
// Criterion 7: published count pairs through the rate tables.

fn template(
    category: Category,
    post_type: PostType,
    label: Label,
    status: Option<Label>,
) -> AnnotatedPost {
    AnnotatedPost {
        post: Post {
            media_name: format!("{category} media"),
            media_group: category.group(),
            category,
            post_type,
            headline: "headline".into(),
            message: status.map(|_| "status".into()),
            body: None,
            link_url: None,
            timestamp: Utc.with_ymd_and_hms(2016, 6, 1, 0, 0, 0).unwrap(),
            reactions: Reactions::default(),
            shares: 0,
            comments: 0,
        },
        headline_label: Some(label),
        headline_p: Some(label.index() as f64),
        status_label: status,
        status_p: status.map(|l| l.index() as f64),
        similarity: None,
    }
}

fn criterion_7() -> Outcome {
    let table_rates: [(Category, u64, u64, &str); 6] = [
        (Category::Broadcast, 169_752, 187_200, "47.56"),
        (Category::Print, 128_022, 402_820, "24.12"),
        (Category::ClickbaitMedia, 172_271, 203_662, "45.82"),
        (Category::Conspiracy, 90_389, 224_574, "28.70"),
        (Category::JunkScience, 23_637, 28_935, "44.96"),
        (Category::Satire, 21_798, 19_399, "52.91"),
    ];
    let templates: Vec<(AnnotatedPost, AnnotatedPost)> = table_rates
        .iter()
        .map(|(c, _, _, _)| {
            (
                template(*c, PostType::Link, Label::Clickbait, None),
                template(*c, PostType::Link, Label::NonClickbait, None),
            )
        })
        .collect();
    // Streams each template the published number of times instead of
    // materializing 1.67M posts.
    let stream = || {
        table_rates
            .iter()
            .zip(&templates)
            .flat_map(|((_, cb, nc, _), (t_cb, t_nc))| {
                std::iter::repeat_n(t_cb, *cb as usize)
                    .chain(std::iter::repeat_n(t_nc, *nc as usize))
            })
    };
    let rows = clickbait_rates(stream(), GroupBy::Category, None);
    let mut failures = Vec::new();
    for (row, (c, cb, nc, pct)) in rows.iter().zip(&table_rates) {
        let shown = format!("{:.2}", row.percent);
        if row.key != c.as_str()
            || row.clickbait_count != *cb
            || row.non_clickbait_count != *nc
            || shown != *pct
        {
            failures.push(format!("{c}: {shown} != {pct}"));
        }
    }
    let groups = clickbait_rates(stream(), GroupBy::MediaGroup, None);
    let mainstream = format!("{:.2}", groups[0].percent);
    if mainstream != "33.54" || groups[0].total() != 887_794 {
        failures.push(format!("mainstream {mainstream} != 33.54"));
    }

    let status_pairs: [(Category, u64, u64, &str); 2] = [
        (Category::Broadcast, 84_192, 176_177, "32.34"),
        (Category::Conspiracy, 46_851, 190_477, "19.74"),
    ];
    let status_templates: Vec<(AnnotatedPost, AnnotatedPost)> = status_pairs
        .iter()
        .map(|(c, _, _, _)| {
            (
                template(
                    *c,
                    PostType::Link,
                    Label::NonClickbait,
                    Some(Label::Clickbait),
                ),
                template(
                    *c,
                    PostType::Link,
                    Label::NonClickbait,
                    Some(Label::NonClickbait),
                ),
            )
        })
        .collect();
    let status = status_vs_headline(status_pairs.iter().zip(&status_templates).flat_map(
        |((_, cs, nl, _), (t_cs, t_nl))| {
            std::iter::repeat_n(t_cs, *cs as usize).chain(std::iter::repeat_n(t_nl, *nl as usize))
        },
    ));
    for (row, (c, _, _, pct)) in status.iter().zip(&status_pairs) {
        let shown = row.percent.map(|p| format!("{p:.2}")).unwrap_or_default();
        if shown != *pct {
            failures.push(format!("status {c}: {shown} != {pct}"));
        }
    }
    check(
        failures.is_empty() && rows.len() == 6 && status.len() == 2,
        if failures.is_empty() {
            "6 category rates, the mainstream aggregate and 2 status rates reproduce to 2 decimals"
                .to_string()
        } else {
            failures.join("; ")
        },
    )
}

// ---------------------------------------------------------------------------
// Criterion 8: similarity and density.

fn criterion_8() -> Outcome {
    let head = bow_vector(&["trump", "wins", "state"]);
    let sent = bow_vector(&["trump", "wins", "the", "state", "primary"]);
    let example = format!("{:.4}", cosine(&head, &sent));

    let words = [
        "trump", "wins", "state", "the", "vote", "city", "plan", "bank", "storm", "court", "new",
        "day",
    ];
    let mut rng = ChaCha8Rng::seed_from_u64(37);
    let mut violations = 0;
    for _ in 0..1_000 {
        let phrase = |rng: &mut ChaCha8Rng, lo: usize, hi: usize| -> String {
            let n = rng.gen_range(lo..hi);
            (0..n)
                .map(|_| *words.choose(rng).unwrap())
                .collect::<Vec<_>>()
                .join(" ")
        };
        let headline = phrase(&mut rng, 1, 7);
        let count = rng.gen_range(1..6);
        let sentences: Vec<String> = (0..count).map(|_| phrase(&mut rng, 1, 9)).collect();
        let body = format!("{}.\n\nLater paragraph.", sentences.join(". "));
        let max = headline_body_similarity(&headline, &body, Aggregation::Max)
            .unwrap()
            .value;
        let mean = headline_body_similarity(&headline, &body, Aggregation::Mean)
            .unwrap()
            .value;
        if max < mean {
            violations += 1;
        }
    }

    let mut mass_range = (f64::INFINITY, f64::NEG_INFINITY);
    for _ in 0..20 {
        let n = rng.gen_range(2..200);
        let values: Vec<f64> = (0..n).map(|_| rng.gen::<f64>().powi(2)).collect();
        let mass = density_estimate(&values, 512).unwrap().mass();
        mass_range = (mass_range.0.min(mass), mass_range.1.max(mass));
    }
    check(
        example == "0.7746" && violations == 0 && mass_range.0 >= 0.99 && mass_range.1 <= 1.0,
        format!(
            "cosine example {example}; max < mean in {violations} of 1000 fixtures; KDE mass in [{:.5}, {:.5}]",
            mass_range.0, mass_range.1
        ),
    )
}

// ---------------------------------------------------------------------------
// Criterion 10: reruns with the same seed at one worker.

fn pipeline_outputs(seed: u64) -> Vec<Vec<u8>> {
    let data = synthetic_headlines(400, seed);
    let corpus: Vec<Vec<String>> = data.iter().map(|h| tokenize(&h.text)).collect();
    let vocab = VocabConfig {
        min_count: 1,
        buckets: 5_000,
        ..VocabConfig::default()
    };
    let embedding = EmbeddingConfig {
        dim: 16,
        epochs: 2,
        seed,
        workers: 1,
        vocab: vocab.clone(),
        ..EmbeddingConfig::default()
    };
    let classifier = ClassifierConfig {
        dim: 16,
        vocab,
        epochs: 3,
        seed,
        workers: 1,
        ..ClassifierConfig::default()
    };
    let mut out = Vec::new();

    let emb = train_embeddings(&corpus, &embedding).unwrap().model;
    let mut bytes = Vec::new();
    write_model(&mut bytes, &emb).unwrap();
    out.push(bytes);

    let pretrained = Pretrained::Model(emb);
    let clf = train_classifier(&data, Some(&pretrained), &classifier).unwrap();
    let mut bytes = Vec::new();
    write_classifier(&mut bytes, &clf).unwrap();
    out.push(bytes);

    let report = cross_validate(&data, 4, 2, &classifier, None).unwrap();
    out.push(serde_json::to_vec(&report).unwrap());

    let biterms = extract_biterms(&corpus, &baitscope::topics::default_stopwords());
    let btm = baitscope::topics::fit_btm(
        &biterms,
        &BtmConfig {
            iterations: 50,
            seed,
            ..BtmConfig::with_topics(3)
        },
    )
    .unwrap();
    out.push(top_words(&btm, 5).unwrap().to_grid().into_bytes());

    let posts: Vec<Post> = data
        .iter()
        .enumerate()
        .map(|(i, h)| Post {
            media_name: format!("media{}", i % 7),
            media_group: Category::ALL[i % 6].group(),
            category: Category::ALL[i % 6],
            post_type: PostType::Link,
            headline: h.text.clone(),
            message: (i % 2 == 0).then(|| data[(i + 1) % data.len()].text.clone()),
            body: Some(format!("{}. More here.", data[(i + 3) % data.len()].text)),
            link_url: Some(format!("https://site.example/{}?utm_source=x{i}", i % 13)),
            timestamp: Utc
                .with_ymd_and_hms(2016, 6, 1 + (i % 5) as u32, 0, 0, 0)
                .unwrap(),
            reactions: Reactions {
                like: i as u64,
                ..Reactions::default()
            },
            shares: (i % 11) as u64,
            comments: (i % 3) as u64,
        })
        .collect();
    let annotated = baitscope::analytics::annotate_corpus(&posts, &clf, 1);
    let sims: Vec<f64> = annotated.iter().filter_map(|a| a.similarity).collect();
    out.push(
        serde_json::to_vec(&(
            clickbait_rates(&annotated, GroupBy::Media, Some(5)),
            status_vs_headline(&annotated),
            engagement_summary(&annotated),
            repost_frequency(&annotated, 2),
            posts_per_day_delta(&posts),
            density_estimate(&sims, 128).ok(),
        ))
        .unwrap(),
    );
    out
}

fn criterion_10() -> Outcome {
    let names = [
        "embedding model",
        "classifier model",
        "cv report",
        "topic grid",
        "analytics tables",
    ];
    let first = pipeline_outputs(41);
    let second = pipeline_outputs(41);
    let differing: Vec<&str> = names
        .iter()
        .zip(first.iter().zip(&second))
        .filter(|(_, (a, b))| a != b)
        .map(|(n, _)| *n)
        .collect();
    check(
        differing.is_empty(),
        if differing.is_empty() {
            format!("{} artifacts byte-identical across reruns", names.len())
        } else {
            format!("differ: {}", differing.join(", "))
        },
    )
}

fn main() {
    // `cargo test -- --list` and similar harness queries have nothing to list.
    if std::env::args().any(|a| a == "--list") {
        return;
    }
    let mut stdout = std::io::stdout().lock();
    let mut failed = 0;
    let mut emit = |id: &str, o: Outcome| {
        let tag = match o.status {
            Status::Pass => "PASS",
            Status::Fail => {
                failed += 1;
                "FAIL"
            }
            Status::NotRun => "NOT RUN",
        };
        writeln!(stdout, "criterion {id:<14} {tag:<8} {}", o.detail).unwrap();
        stdout.flush().unwrap();
    };
    for (id, o) in criteria_1_2() {
        emit(&id, o);
    }
    emit("3", criterion_3());
    emit("4", criterion_4());
    emit("5", criterion_5());
    emit("6", criterion_6());
    emit("7", criterion_7());
    emit("8", criterion_8());
    emit(
        "9",
        not_run("measurements on the private 1.67M-post corpus are not reproducible; its pipelines are covered by criteria 7 and 8"),
    );
    emit("10", criterion_10());
    if failed > 0 {
        eprintln!("{failed} acceptance criteria failed");
        std::process::exit(1);
    }
}
