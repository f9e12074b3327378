use std::path::PathBuf;

use baitscope::analytics::GroupBy;
use baitscope::similar::Aggregation;
use baitscope::VocabConfig;
use clap::{Args, Parser, Subcommand, ValueEnum};

#[derive(Debug, Parser)]
#[command(
    name = "baitscope",
    version,
    about = "Clickbait detection and media corpus analytics"
)]
pub struct Cli {
    /// More log output (-v info, -vv debug).
    #[arg(short, long, global = true, action = clap::ArgAction::Count)]
    pub verbose: u8,

    /// Only errors.
    #[arg(short, long, global = true)]
    pub quiet: bool,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Train or export subword skip-gram embeddings.
    #[command(subcommand)]
    Embed(EmbedCommand),
    /// Train a headline classifier or run it on new text.
    #[command(subcommand)]
    Classify(ClassifyCommand),
    /// Evaluate the classifier.
    #[command(subcommand)]
    Eval(EvalCommand),
    /// Fit biterm topic models.
    #[command(subcommand)]
    Topics(TopicsCommand),
    /// Headline-body similarity values and density curves per category and class.
    Similarity(SimilarityArgs),
    /// Corpus measurements over classifier-annotated posts.
    #[command(subcommand)]
    Analyze(AnalyzeCommand),
}

#[derive(Debug, Args, Clone)]
pub struct RunArgs {
    /// RNG seed; a random one is drawn and logged when omitted.
    #[arg(long)]
    pub seed: Option<u64>,

    #[arg(long, default_value_t = 1)]
    pub workers: usize,
}

#[derive(Debug, Args, Clone)]
pub struct VocabArgs {
    /// Minimum word frequency [default: 5 for embeddings, 1 for classifiers]
    #[arg(long)]
    pub min_count: Option<u64>,

    /// Number of hashed n-gram buckets.
    #[arg(long, default_value_t = 2_000_000)]
    pub buckets: usize,

    #[arg(long, default_value_t = 3)]
    pub minn: usize,

    #[arg(long, default_value_t = 6)]
    pub maxn: usize,

    /// Do not wrap words in `<` and `>` before extracting n-grams.
    #[arg(long)]
    pub no_boundaries: bool,
}

impl VocabArgs {
    pub fn config(&self, default_min_count: u64) -> VocabConfig {
        VocabConfig {
            min_count: self.min_count.unwrap_or(default_min_count),
            buckets: self.buckets,
            ngram_min: self.minn,
            ngram_max: self.maxn,
            use_boundaries: !self.no_boundaries,
        }
    }
}

#[derive(Debug, Subcommand)]
pub enum EmbedCommand {
    /// Train embeddings on unlabeled text, one document per line.
    Train(EmbedTrainArgs),
    /// Write the word vectors of a model as text.
    Export(EmbedExportArgs),
}

#[derive(Debug, Args)]
pub struct EmbedTrainArgs {
    /// Text files, one document per line. Repeatable.
    #[arg(long, required = true)]
    pub corpus: Vec<PathBuf>,

    /// Read the corpus files as labeled `label<TAB>headline` data and use only the text.
    #[arg(long)]
    pub labeled: bool,

    #[arg(long)]
    pub out: PathBuf,

    #[arg(long, default_value_t = 300)]
    pub dim: usize,

    #[arg(long, default_value_t = 5)]
    pub window: usize,

    #[arg(long, default_value_t = 5)]
    pub negatives: usize,

    #[arg(long, default_value_t = 5)]
    pub epochs: usize,

    #[arg(long, default_value_t = 0.05)]
    pub lr: f32,

    /// Subsampling threshold.
    #[arg(long, default_value_t = 1e-4)]
    pub subsample: f64,

    #[command(flatten)]
    pub vocab: VocabArgs,

    #[command(flatten)]
    pub run: RunArgs,
}

#[derive(Debug, Args)]
pub struct EmbedExportArgs {
    #[arg(long)]
    pub model: PathBuf,

    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Debug, Args, Clone)]
pub struct ClassifierArgs {
    #[arg(long, default_value_t = 300)]
    pub dim: usize,

    #[arg(long, default_value_t = 5)]
    pub epochs: usize,

    #[arg(long, default_value_t = 0.1)]
    pub lr: f32,

    /// Keep embedding rows fixed.
    #[arg(long)]
    pub freeze: bool,

    /// Embedding model or text vectors to initialize from.
    #[arg(long)]
    pub pretrained: Option<PathBuf>,

    #[command(flatten)]
    pub vocab: VocabArgs,

    #[command(flatten)]
    pub run: RunArgs,
}

#[derive(Debug, Subcommand)]
pub enum ClassifyCommand {
    /// Train on `label<TAB>headline` lines.
    Train(ClassifyTrainArgs),
    /// Label each input line; writes `label<TAB>p_clickbait`.
    Predict(ClassifyPredictArgs),
}

#[derive(Debug, Args)]
pub struct ClassifyTrainArgs {
    #[arg(long)]
    pub data: PathBuf,

    #[arg(long)]
    pub out: PathBuf,

    #[command(flatten)]
    pub model: ClassifierArgs,
}

#[derive(Debug, Args)]
pub struct ClassifyPredictArgs {
    #[arg(long)]
    pub model: PathBuf,

    /// One text per line.
    #[arg(long)]
    pub input: PathBuf,

    #[arg(long)]
    pub out: PathBuf,

    #[arg(long, default_value_t = 1)]
    pub workers: usize,
}

#[derive(Debug, Subcommand)]
pub enum EvalCommand {
    /// Repeated k-fold cross-validation; writes a JSON report.
    Cv(EvalCvArgs),
}

#[derive(Debug, Args)]
pub struct EvalCvArgs {
    #[arg(long)]
    pub data: PathBuf,

    #[arg(long, default_value_t = 10)]
    pub k: usize,

    #[arg(long, default_value_t = 5)]
    pub repeats: usize,

    #[arg(long)]
    pub out: PathBuf,

    #[command(flatten)]
    pub model: ClassifierArgs,
}

#[derive(Debug, Subcommand)]
pub enum TopicsCommand {
    /// Fit one model over all documents (one per line) of the given files.
    Fit(TopicsFitArgs),
}

#[derive(Debug, Args)]
pub struct TopicsFitArgs {
    /// Repeatable.
    #[arg(long, required = true)]
    pub docs: Vec<PathBuf>,

    /// Number of topics.
    #[arg(long, default_value_t = 5)]
    pub k: usize,

    /// Dirichlet prior on topics [default: 50 / k]
    #[arg(long)]
    pub alpha: Option<f64>,

    #[arg(long, default_value_t = 0.01)]
    pub beta: f64,

    #[arg(long, default_value_t = 1000)]
    pub iterations: usize,

    /// Words listed per topic.
    #[arg(long, default_value_t = 10)]
    pub top: usize,

    /// Keep stopwords.
    #[arg(long)]
    pub keep_stopwords: bool,

    #[arg(long)]
    pub out: PathBuf,

    #[arg(long)]
    pub seed: Option<u64>,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum Mode {
    Max,
    Mean,
}

impl From<Mode> for Aggregation {
    fn from(m: Mode) -> Self {
        match m {
            Mode::Max => Aggregation::Max,
            Mode::Mean => Aggregation::Mean,
        }
    }
}

#[derive(Debug, Args)]
pub struct SimilarityArgs {
    #[arg(long)]
    pub posts: PathBuf,

    /// Trained classifier.
    #[arg(long)]
    pub model: PathBuf,

    #[arg(long, value_enum, default_value_t = Mode::Max)]
    pub mode: Mode,

    /// Density grid points.
    #[arg(long, default_value_t = 512)]
    pub grid: usize,

    /// Output directory.
    #[arg(long)]
    pub out: PathBuf,

    #[arg(long, default_value_t = 1)]
    pub workers: usize,
}

#[derive(Debug, Args, Clone)]
pub struct PostsArgs {
    /// Posts as JSON lines.
    #[arg(long)]
    pub posts: PathBuf,

    /// Trained classifier.
    #[arg(long)]
    pub model: PathBuf,

    /// Output directory.
    #[arg(long)]
    pub out: PathBuf,

    #[arg(long, default_value_t = 1)]
    pub workers: usize,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum GroupKey {
    Category,
    MediaGroup,
    Media,
}

impl From<GroupKey> for GroupBy {
    fn from(g: GroupKey) -> Self {
        match g {
            GroupKey::Category => GroupBy::Category,
            GroupKey::MediaGroup => GroupBy::MediaGroup,
            GroupKey::Media => GroupBy::Media,
        }
    }
}

#[derive(Debug, Subcommand)]
pub enum AnalyzeCommand {
    /// Clickbait headline rates per group.
    Rates(RatesArgs),
    /// Clickbait status messages on non-clickbait links.
    Status(PostsArgs),
    /// Reactions, shares and comments per category and class.
    Engagement(PostsArgs),
    /// Links posted repeatedly.
    Reposts(RepostsArgs),
    /// Daily posts-per-media gap between mainstream and unreliable media.
    Timeline(TimelineArgs),
}

#[derive(Debug, Args)]
pub struct RatesArgs {
    #[command(flatten)]
    pub posts: PostsArgs,

    #[arg(long, value_enum, default_value_t = GroupKey::Category)]
    pub group_by: GroupKey,

    /// Keep the N groups with the highest percentage. With `--group-by media`
    /// also writes per-category rankings.
    #[arg(long)]
    pub top: Option<usize>,
}

#[derive(Debug, Args)]
pub struct RepostsArgs {
    #[command(flatten)]
    pub posts: PostsArgs,

    #[arg(long, default_value_t = 20)]
    pub min_count: u64,
}

#[derive(Debug, Args)]
pub struct TimelineArgs {
    #[arg(long)]
    pub posts: PathBuf,

    /// Output directory.
    #[arg(long)]
    pub out: PathBuf,
}
