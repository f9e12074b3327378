use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::fs::{self, File};
use std::io::{self, BufRead, BufReader, BufWriter, Write};
use std::path::{Path, PathBuf};

use baitscope::analytics::{
    annotate_corpus, clickbait_rates, engagement_summary, posts_per_day_delta, repost_frequency,
    status_vs_headline, top_proponents, AnnotatedPost, EngagementCell, GroupBy, RateRow,
};
use baitscope::classify::{load_classifier, save_classifier, train_classifier};
use baitscope::corpus::{load_labeled_headlines, load_posts, Post};
use baitscope::embed::{
    export_vectors, load_model, load_pretrained, save_model, train_embeddings, Pretrained,
};
use baitscope::metrics::cross_validate;
use baitscope::similar::{density_estimate, headline_body_similarity, Aggregation};
use baitscope::textproc::tokenize;
use baitscope::topics::{default_stopwords, extract_biterms, fit_btm, top_words, BtmConfig};
use baitscope::{
    Category, ClassifierConfig, ClassifierModel, EmbeddingConfig, Error, Label, PostType,
};
use log::{info, warn};
use serde_json::json;

use crate::cli::*;
use crate::manifest::write_manifest;

/// Exit status 2 for bad arguments or configuration, 1 for everything else.
#[derive(Debug)]
pub enum Failure {
    Usage(String),
    Runtime(String),
}

impl Failure {
    pub fn code(&self) -> i32 {
        match self {
            Failure::Usage(_) => 2,
            Failure::Runtime(_) => 1,
        }
    }

    pub fn message(&self) -> &str {
        match self {
            Failure::Usage(m) | Failure::Runtime(m) => m,
        }
    }
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        match e {
            Error::Config(_) => Failure::Usage(e.to_string()),
            _ => Failure::Runtime(e.to_string()),
        }
    }
}

impl From<io::Error> for Failure {
    fn from(e: io::Error) -> Self {
        Failure::Runtime(e.to_string())
    }
}

type Outcome = Result<(), Failure>;

fn io_at(path: &Path) -> impl Fn(io::Error) -> Failure + '_ {
    move |e| Failure::Runtime(format!("{}: {e}", path.display()))
}

fn resolve_seed(seed: Option<u64>) -> u64 {
    seed.unwrap_or_else(|| {
        let s = rand::random::<u64>();
        warn!("no --seed given; using generated seed {s}");
        s
    })
}

fn read_lines(path: &Path) -> Result<Vec<String>, Failure> {
    let file = File::open(path).map_err(io_at(path))?;
    BufReader::new(file)
        .lines()
        .map(|l| l.map(|s| s.trim_end_matches('\r').to_string()))
        .collect::<io::Result<_>>()
        .map_err(io_at(path))
}

fn create(path: &Path) -> Result<BufWriter<File>, Failure> {
    Ok(BufWriter::new(File::create(path).map_err(io_at(path))?))
}

fn ensure_dir(dir: &Path) -> Outcome {
    fs::create_dir_all(dir).map_err(io_at(dir))
}

fn manifest(
    out: &Path,
    command: &str,
    seed: Option<u64>,
    config: serde_json::Value,
    inputs: &[PathBuf],
    outputs: &[PathBuf],
) -> Outcome {
    let path = write_manifest(out, command, seed, config, inputs, outputs).map_err(io_at(out))?;
    info!("wrote {}", path.display());
    Ok(())
}

pub fn run(cli: Cli) -> Outcome {
    match cli.command {
        Command::Embed(EmbedCommand::Train(a)) => embed_train(a),
        Command::Embed(EmbedCommand::Export(a)) => embed_export(a),
        Command::Classify(ClassifyCommand::Train(a)) => classify_train(a),
        Command::Classify(ClassifyCommand::Predict(a)) => classify_predict(a),
        Command::Eval(EvalCommand::Cv(a)) => eval_cv(a),
        Command::Topics(TopicsCommand::Fit(a)) => topics_fit(a),
        Command::Similarity(a) => similarity(a),
        Command::Analyze(AnalyzeCommand::Rates(a)) => analyze_rates(a),
        Command::Analyze(AnalyzeCommand::Status(a)) => analyze_status(a),
        Command::Analyze(AnalyzeCommand::Engagement(a)) => analyze_engagement(a),
        Command::Analyze(AnalyzeCommand::Reposts(a)) => analyze_reposts(a),
        Command::Analyze(AnalyzeCommand::Timeline(a)) => analyze_timeline(a),
    }
}

fn embed_train(a: EmbedTrainArgs) -> Outcome {
    let config = EmbeddingConfig {
        dim: a.dim,
        window: a.window,
        negatives: a.negatives,
        epochs: a.epochs,
        initial_lr: a.lr,
        subsample_t: a.subsample,
        seed: resolve_seed(a.run.seed),
        workers: a.run.workers,
        vocab: a.vocab.config(5),
    };
    config.validate()?;
    let mut corpus = Vec::new();
    for path in &a.corpus {
        if a.labeled {
            corpus.extend(
                load_labeled_headlines(path)?
                    .iter()
                    .map(|h| tokenize(&h.text)),
            );
        } else {
            corpus.extend(read_lines(path)?.iter().map(|l| tokenize(l)));
        }
    }
    info!("training embeddings on {} documents", corpus.len());
    let training = train_embeddings(&corpus, &config)?;
    save_model(&a.out, &training.model)?;
    let config_json = json!({
        "embedding": config,
        "labeled": a.labeled,
        "epoch_loss": training.epoch_loss,
    });
    manifest(
        &a.out,
        "embed train",
        Some(config.seed),
        config_json,
        &a.corpus,
        std::slice::from_ref(&a.out),
    )
}

fn embed_export(a: EmbedExportArgs) -> Outcome {
    let model = load_model(&a.model)?;
    export_vectors(&model, &a.out)?;
    manifest(
        &a.out,
        "embed export",
        None,
        json!({}),
        &[a.model],
        std::slice::from_ref(&a.out),
    )
}

fn classifier_config(
    a: &ClassifierArgs,
) -> Result<(ClassifierConfig, Option<Pretrained>), Failure> {
    let config = ClassifierConfig {
        dim: a.dim,
        vocab: a.vocab.config(1),
        epochs: a.epochs,
        initial_lr: a.lr,
        seed: resolve_seed(a.run.seed),
        workers: a.run.workers,
        freeze_embeddings: a.freeze,
    };
    config.validate()?;
    let pretrained = a.pretrained.as_ref().map(load_pretrained).transpose()?;
    Ok((config, pretrained))
}

fn with_pretrained(mut inputs: Vec<PathBuf>, a: &ClassifierArgs) -> Vec<PathBuf> {
    inputs.extend(a.pretrained.iter().cloned());
    inputs
}

fn classify_train(a: ClassifyTrainArgs) -> Outcome {
    let (config, pretrained) = classifier_config(&a.model)?;
    let data = load_labeled_headlines(&a.data)?;
    let model = train_classifier(&data, pretrained.as_ref(), &config)?;
    save_classifier(&a.out, &model)?;
    let inputs = with_pretrained(vec![a.data.clone()], &a.model);
    let config_json = json!({ "classifier": config, "dim": model.dim() });
    manifest(
        &a.out,
        "classify train",
        Some(config.seed),
        config_json,
        &inputs,
        std::slice::from_ref(&a.out),
    )
}

fn classify_predict(a: ClassifyPredictArgs) -> Outcome {
    if a.workers == 0 {
        return Err(Failure::Usage("workers must be at least 1".into()));
    }
    let model = load_classifier(&a.model)?;
    let lines = read_lines(&a.input)?;
    let predictions = model.predict_batch(&lines, a.workers);
    let mut w = create(&a.out)?;
    for p in predictions {
        writeln!(w, "{}\t{}", p.label, p.p_clickbait()).map_err(io_at(&a.out))?;
    }
    w.flush().map_err(io_at(&a.out))?;
    drop(w);
    manifest(
        &a.out,
        "classify predict",
        None,
        json!({}),
        &[a.model, a.input],
        std::slice::from_ref(&a.out),
    )
}

fn eval_cv(a: EvalCvArgs) -> Outcome {
    if a.k < 2 {
        return Err(Failure::Usage(format!(
            "--k {} is invalid: k must be at least 2 (k >= 2)",
            a.k
        )));
    }
    let (config, pretrained) = classifier_config(&a.model)?;
    let data = load_labeled_headlines(&a.data)?;
    let report = cross_validate(&data, a.k, a.repeats, &config, pretrained.as_ref())?;
    let m = report.micro();
    info!(
        "accuracy {:.4}  kappa {:.4}  roc-auc {:.4}",
        m.accuracy, m.kappa, m.roc_auc
    );
    let mut text =
        serde_json::to_string_pretty(&report).map_err(|e| Failure::Runtime(e.to_string()))?;
    text.push('\n');
    fs::write(&a.out, text).map_err(io_at(&a.out))?;
    let inputs = with_pretrained(vec![a.data.clone()], &a.model);
    let config_json = json!({ "classifier": config, "k": a.k, "repeats": a.repeats });
    manifest(
        &a.out,
        "eval cv",
        Some(config.seed),
        config_json,
        &inputs,
        std::slice::from_ref(&a.out),
    )
}

fn topics_fit(a: TopicsFitArgs) -> Outcome {
    let mut docs = Vec::new();
    for path in &a.docs {
        docs.extend(read_lines(path)?.iter().map(|l| tokenize(l)));
    }
    let stopwords = if a.keep_stopwords {
        Default::default()
    } else {
        default_stopwords()
    };
    let corpus = extract_biterms(&docs, &stopwords);
    let config = BtmConfig {
        alpha: a.alpha.unwrap_or(50.0 / a.k.max(1) as f64),
        beta: a.beta,
        iterations: a.iterations,
        seed: resolve_seed(a.seed),
        ..BtmConfig::with_topics(a.k)
    };
    info!(
        "{} documents, {} biterms, {} words",
        docs.len(),
        corpus.biterms.len(),
        corpus.vocab.len()
    );
    let model = fit_btm(&corpus, &config)?;
    let summary = top_words(&model, a.top)?;
    let mut w = create(&a.out)?;
    w.write_all(summary.to_grid().as_bytes())
        .map_err(io_at(&a.out))?;
    w.flush().map_err(io_at(&a.out))?;
    drop(w);
    let config_json = json!({
        "btm": config,
        "top": a.top,
        "stopwords": !a.keep_stopwords,
        "theta": model.theta(),
    });
    manifest(
        &a.out,
        "topics fit",
        Some(config.seed),
        config_json,
        &a.docs,
        std::slice::from_ref(&a.out),
    )
}

fn load_annotated(
    posts: &Path,
    model: &Path,
    workers: usize,
) -> Result<(Vec<AnnotatedPost>, ClassifierModel), Failure> {
    if workers == 0 {
        return Err(Failure::Usage("workers must be at least 1".into()));
    }
    let model = load_classifier(model)?;
    let posts = load_posts(posts)?;
    Ok((annotate_corpus(&posts, &model, workers), model))
}

fn similarity(a: SimilarityArgs) -> Outcome {
    if a.grid < 2 {
        return Err(Failure::Usage("--grid must be at least 2".into()));
    }
    let (annotated, _) = load_annotated(&a.posts, &a.model, a.workers)?;
    let mode: Aggregation = a.mode.into();
    let mut groups: BTreeMap<(Category, Label), Vec<f64>> = BTreeMap::new();
    for p in &annotated {
        let (Some(label), Some(body)) = (p.headline_label, p.post.body.as_deref()) else {
            continue;
        };
        if p.post.post_type != PostType::Link {
            continue;
        }
        match headline_body_similarity(&p.post.headline, body, mode) {
            Ok(s) if !s.empty_headline => groups
                .entry((p.post.category, label))
                .or_default()
                .push(s.value),
            Ok(_) => {}
            Err(e) => warn!("skipping post by {}: {e}", p.post.media_name),
        }
    }
    ensure_dir(&a.out)?;
    let values_path = a.out.join("similarity_values.tsv");
    let curves_path = a.out.join("similarity_density.tsv");
    let mut values = create(&values_path)?;
    let mut curves = create(&curves_path)?;
    let mut text = String::from("category\tlabel\tsimilarity\n");
    let mut grid = String::from("category\tlabel\tx\tdensity\tbandwidth\n");
    for ((category, label), vs) in &groups {
        for v in vs {
            let _ = writeln!(text, "{category}\t{label}\t{v}");
        }
        match density_estimate(vs, a.grid) {
            Ok(curve) => {
                for (x, d) in curve.grid.iter().zip(&curve.density) {
                    let _ = writeln!(grid, "{category}\t{label}\t{x}\t{d}\t{}", curve.bandwidth);
                }
            }
            Err(e) => warn!("no density for {category}/{label}: {e}"),
        }
    }
    values
        .write_all(text.as_bytes())
        .map_err(io_at(&values_path))?;
    curves
        .write_all(grid.as_bytes())
        .map_err(io_at(&curves_path))?;
    values.flush().map_err(io_at(&values_path))?;
    curves.flush().map_err(io_at(&curves_path))?;
    drop((values, curves));
    let config = json!({ "mode": mode, "grid": a.grid, "workers": a.workers });
    manifest(
        &a.out,
        "similarity",
        None,
        config,
        &[a.posts, a.model],
        &[values_path, curves_path],
    )
}

fn write_table(path: &Path, text: &str) -> Outcome {
    fs::write(path, text).map_err(io_at(path))
}

fn rate_table(rows: &[RateRow]) -> String {
    let mut out = String::from("group\tcategory\tclickbait\tnon_clickbait\tpercent\n");
    for r in rows {
        let category = r.category.map(|c| c.as_str()).unwrap_or("");
        let _ = writeln!(
            out,
            "{}\t{category}\t{}\t{}\t{:.2}",
            r.key, r.clickbait_count, r.non_clickbait_count, r.percent
        );
    }
    out
}

fn analyze_rates(a: RatesArgs) -> Outcome {
    let p = &a.posts;
    let (annotated, _) = load_annotated(&p.posts, &p.model, p.workers)?;
    ensure_dir(&p.out)?;
    let group_by: GroupBy = a.group_by.into();
    let rows = clickbait_rates(&annotated, group_by, a.top);
    let rates_path = p.out.join("rates.tsv");
    write_table(&rates_path, &rate_table(&rows))?;
    let mut outputs = vec![rates_path];
    if let (GroupBy::Media, Some(n)) = (group_by, a.top) {
        let mut text = String::from("scope\tmedia\tclickbait\tnon_clickbait\tpercent\n");
        for (scope, rows) in top_proponents(&annotated, n) {
            for r in rows {
                let _ = writeln!(
                    text,
                    "{scope}\t{}\t{}\t{}\t{:.2}",
                    r.key, r.clickbait_count, r.non_clickbait_count, r.percent
                );
            }
        }
        let path = p.out.join("top_proponents.tsv");
        write_table(&path, &text)?;
        outputs.push(path);
    }
    let config = json!({ "group_by": group_by, "top": a.top, "workers": p.workers });
    manifest(
        &p.out,
        "analyze rates",
        None,
        config,
        &[p.posts.clone(), p.model.clone()],
        &outputs,
    )
}

fn analyze_status(a: PostsArgs) -> Outcome {
    let (annotated, _) = load_annotated(&a.posts, &a.model, a.workers)?;
    ensure_dir(&a.out)?;
    let mut text =
        String::from("category\tclickbait_status\tnon_clickbait_link\twithout_message\tpercent\n");
    for r in status_vs_headline(&annotated) {
        let pct = r
            .percent
            .map(|p| format!("{p:.2}"))
            .unwrap_or_else(|| "NA".into());
        let _ = writeln!(
            text,
            "{}\t{}\t{}\t{}\t{pct}",
            r.category,
            r.clickbait_status_count,
            r.non_clickbait_link_count,
            r.without_message_count
        );
    }
    let path = a.out.join("status.tsv");
    write_table(&path, &text)?;
    manifest(
        &a.out,
        "analyze status",
        None,
        json!({ "workers": a.workers }),
        &[a.posts, a.model],
        &[path],
    )
}

fn engagement_table(cells: &[EngagementCell]) -> String {
    let mut out = String::from(
        "category\tlabel\tposts\tmedia\treactions_mean\treactions_median\tshares_mean\tshares_median\tcomments_mean\tcomments_median\n",
    );
    for c in cells {
        let _ = writeln!(
            out,
            "{}\t{}\t{}\t{}\t{}\t{}\t{}\t{}\t{}\t{}",
            c.category,
            c.label,
            c.posts,
            c.media,
            c.reactions.mean,
            c.reactions.median,
            c.shares.mean,
            c.shares.median,
            c.comments.mean,
            c.comments.median
        );
    }
    out
}

fn analyze_engagement(a: PostsArgs) -> Outcome {
    let (annotated, _) = load_annotated(&a.posts, &a.model, a.workers)?;
    ensure_dir(&a.out)?;
    let summary = engagement_summary(&annotated);
    let by_post = a.out.join("engagement_by_post.tsv");
    let by_media = a.out.join("engagement_by_media.tsv");
    write_table(&by_post, &engagement_table(&summary.by_post))?;
    write_table(&by_media, &engagement_table(&summary.by_media))?;
    manifest(
        &a.out,
        "analyze engagement",
        None,
        json!({ "workers": a.workers }),
        &[a.posts, a.model],
        &[by_post, by_media],
    )
}

fn analyze_reposts(a: RepostsArgs) -> Outcome {
    let p = &a.posts;
    let (annotated, _) = load_annotated(&p.posts, &p.model, p.workers)?;
    ensure_dir(&p.out)?;
    let mut text = String::from("url\tcount\tcategory\tlabel\n");
    for g in repost_frequency(&annotated, a.min_count) {
        let label = g.label.map(|l| l.as_str()).unwrap_or("NA");
        let _ = writeln!(text, "{}\t{}\t{}\t{label}", g.url, g.count, g.category);
    }
    let path = p.out.join("reposts.tsv");
    write_table(&path, &text)?;
    let config = json!({ "min_count": a.min_count, "workers": p.workers });
    manifest(
        &p.out,
        "analyze reposts",
        None,
        config,
        &[p.posts.clone(), p.model.clone()],
        &[path],
    )
}

fn analyze_timeline(a: TimelineArgs) -> Outcome {
    let posts: Vec<Post> = load_posts(&a.posts)?;
    ensure_dir(&a.out)?;
    let mut text = String::from("date\tmainstream_mean\tunreliable_mean\tdelta\n");
    for d in posts_per_day_delta(&posts) {
        let _ = writeln!(
            text,
            "{}\t{}\t{}\t{}",
            d.date, d.mainstream_mean, d.unreliable_mean, d.delta
        );
    }
    let path = a.out.join("timeline.tsv");
    write_table(&path, &text)?;
    manifest(
        &a.out,
        "analyze timeline",
        None,
        json!({}),
        &[a.posts],
        &[path],
    )
}
