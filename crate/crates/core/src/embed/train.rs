use std::sync::atomic::{AtomicU64, Ordering};

use num_traits::Float;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, WeightedAliasIndex};

use super::{EmbeddingConfig, EmbeddingModel, Matrix, SharedMatrix};
use crate::error::{Error, Result};
use crate::textproc::{Vocabulary, WordCounts};

/// Exponent applied to unigram counts for the noise distribution.
const NOISE_POWER: f64 = 0.75;
/// Redraws allowed when a negative sample hits the positive target.
const NEGATIVE_RETRIES: usize = 8;

/// A trained model and its mean per-pair loss for each epoch.
#[derive(Debug)]
pub struct Training {
    pub model: EmbeddingModel,
    pub epoch_loss: Vec<f64>,
}

fn log_sigmoid<F: Float>(x: F) -> F {
    // ln σ(x) = -ln(1 + e^-x), evaluated without overflow.
    if x >= F::zero() {
        -(-x).exp().ln_1p()
    } else {
        x - x.exp().ln_1p()
    }
}

fn sigmoid<F: Float>(x: F) -> F {
    if x >= F::zero() {
        F::one() / (F::one() + (-x).exp())
    } else {
        let e = x.exp();
        e / (F::one() + e)
    }
}

fn dot<F: Float>(a: &[F], b: &[F]) -> F {
    a.iter().zip(b).fold(F::zero(), |acc, (&x, &y)| acc + x * y)
}

/// Negative-sampling loss of one (center, context) pair:
/// `-ln σ(u_pos·h) - Σ ln σ(-u_neg·h)`.
pub fn negative_sampling_loss<F: Float>(hidden: &[F], positive: &[F], negatives: &[&[F]]) -> F {
    let mut loss = -log_sigmoid(dot(positive, hidden));
    for neg in negatives {
        loss = loss - log_sigmoid(-dot(neg, hidden));
    }
    loss
}

/// One binary logistic term of the negative-sampling objective.
///
/// Adds `lr * (label - σ(u·h)) * u` to `grad_hidden` using the output row
/// before its update, then moves the output row by `lr * (label - σ) * h`.
/// With `lr = 1` these are exactly the negated gradients of the returned loss.
pub fn logistic_step<F: Float>(
    hidden: &[F],
    output: &mut [F],
    label: bool,
    lr: F,
    grad_hidden: &mut [F],
) -> F {
    let score = dot(output, hidden);
    let target = if label { F::one() } else { F::zero() };
    let g = lr * (target - sigmoid(score));
    for (gh, &u) in grad_hidden.iter_mut().zip(output.iter()) {
        *gh = *gh + g * u;
    }
    for (u, &h) in output.iter_mut().zip(hidden) {
        *u = *u + g * h;
    }
    if label {
        -log_sigmoid(score)
    } else {
        -log_sigmoid(-score)
    }
}

/// Probability of keeping one occurrence of a word with relative frequency
/// `freq` under subsampling threshold `t`. Words at or below the threshold are
/// always kept.
pub fn keep_probability(freq: f64, t: f64) -> f64 {
    if t <= 0.0 || freq <= 0.0 {
        return 1.0;
    }
    let r = t / freq;
    (r.sqrt() + r).min(1.0)
}

struct Shared<'a> {
    input: SharedMatrix<'a>,
    output: SharedMatrix<'a>,
    units: &'a [Vec<usize>],
    keep: &'a [f64],
    noise: &'a WeightedAliasIndex<f64>,
    processed: &'a AtomicU64,
    planned: u64,
    config: &'a EmbeddingConfig,
}

#[derive(Clone, Default)]
struct EpochStat {
    loss: f64,
    pairs: u64,
}

/// Trains subword skip-gram embeddings with negative sampling.
///
/// The vocabulary is built from `corpus` with `config.vocab`. Input rows start
/// uniform in `[-1/d, 1/d]`, output rows at zero. Lines are dealt round-robin
/// to `config.workers` threads that update the shared matrices without locks;
/// the result is bit-for-bit reproducible only with a single worker.
pub fn train_embeddings<S: AsRef<str>>(
    corpus: &[Vec<S>],
    config: &EmbeddingConfig,
) -> Result<Training> {
    config.validate()?;
    let counts: WordCounts = corpus.iter().flatten().collect();
    if counts.is_empty() {
        return Err(Error::EmptyCorpus("no tokens to train on".into()));
    }
    let vocab = Vocabulary::from_counts(counts, config.vocab.clone())?;
    if vocab.is_empty() {
        return Err(Error::EmptyCorpus(format!(
            "no word occurs at least {} times",
            config.vocab.min_count
        )));
    }

    let lines: Vec<Vec<usize>> = corpus
        .iter()
        .map(|line| {
            line.iter()
                .filter_map(|w| vocab.index(w.as_ref()))
                .collect()
        })
        .collect();
    let units: Vec<Vec<usize>> = vocab.words().iter().map(|w| vocab.units(w)).collect();
    let total = vocab.total_count() as f64;
    let keep: Vec<f64> = vocab
        .counts()
        .iter()
        .map(|&c| keep_probability(c as f64 / total, config.subsample_t))
        .collect();
    let noise = WeightedAliasIndex::new(
        vocab
            .counts()
            .iter()
            .map(|&c| (c as f64).powf(NOISE_POWER))
            .collect(),
    )
    .map_err(|e| Error::Invalid(format!("noise distribution: {e}")))?;

    let dim = config.dim;
    let mut init_rng = ChaCha8Rng::seed_from_u64(config.seed);
    let mut input = Matrix::uniform(vocab.rows(), dim, 1.0 / dim as f32, &mut init_rng);
    let mut output = Matrix::zeros(vocab.len(), dim);

    let tokens: u64 = lines.iter().map(|l| l.len() as u64).sum();
    let processed = AtomicU64::new(0);
    let shared = Shared {
        input: input.shared(),
        output: output.shared(),
        units: &units,
        keep: &keep,
        noise: &noise,
        processed: &processed,
        planned: (tokens * config.epochs as u64).max(1),
        config,
    };

    let per_worker: Vec<Vec<EpochStat>> = if config.workers == 1 {
        vec![run_worker(&shared, &lines, 0)]
    } else {
        let shared = &shared;
        let lines = &lines;
        std::thread::scope(|scope| {
            let handles: Vec<_> = (0..config.workers)
                .map(|w| scope.spawn(move || run_worker(shared, lines, w)))
                .collect();
            handles
                .into_iter()
                .map(|h| h.join().expect("worker panicked"))
                .collect()
        })
    };

    let mut epoch_loss = Vec::with_capacity(config.epochs);
    for epoch in 0..config.epochs {
        let (loss, pairs) = per_worker
            .iter()
            .map(|w| &w[epoch])
            .fold((0.0, 0u64), |(l, p), s| (l + s.loss, p + s.pairs));
        let mean = if pairs == 0 { 0.0 } else { loss / pairs as f64 };
        if !mean.is_finite() {
            return Err(Error::Divergence { epoch });
        }
        log::info!("epoch {epoch}: mean pair loss {mean:.5} over {pairs} pairs");
        epoch_loss.push(mean);
    }
    if !input.is_finite() || !output.is_finite() {
        return Err(Error::Divergence {
            epoch: config.epochs.saturating_sub(1),
        });
    }

    Ok(Training {
        model: EmbeddingModel::new(vocab, input, output)?,
        epoch_loss,
    })
}

fn run_worker(shared: &Shared<'_>, lines: &[Vec<usize>], worker: usize) -> Vec<EpochStat> {
    let config = shared.config;
    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
    rng.set_stream(worker as u64 + 1);

    let dim = config.dim;
    let mut hidden = vec![0.0f32; dim];
    let mut grad = vec![0.0f32; dim];
    let mut out_row = vec![0.0f32; dim];
    let mut kept = Vec::new();
    let mut stats = vec![EpochStat::default(); config.epochs];

    for stat in stats.iter_mut() {
        for line in lines.iter().skip(worker).step_by(config.workers) {
            let done = shared
                .processed
                .fetch_add(line.len() as u64, Ordering::Relaxed);
            let progress = done as f64 / shared.planned as f64;
            let lr = (config.initial_lr as f64 * (1.0 - progress)).max(0.0) as f32;

            kept.clear();
            kept.extend(line.iter().copied().filter(|&w| {
                let p = shared.keep[w];
                p >= 1.0 || rng.gen::<f64>() < p
            }));

            for pos in 0..kept.len() {
                let span = rng.gen_range(1..=config.window);
                let lo = pos.saturating_sub(span);
                let hi = (pos + span).min(kept.len() - 1);
                let center = &shared.units[kept[pos]];
                for (c, &context) in kept.iter().enumerate().take(hi + 1).skip(lo) {
                    if c == pos {
                        continue;
                    }
                    hidden.iter_mut().for_each(|h| *h = 0.0);
                    for &u in center {
                        shared.input.add_row_into(u, &mut hidden);
                    }
                    grad.iter_mut().for_each(|g| *g = 0.0);

                    let mut loss =
                        update_output(shared, context, true, lr, &hidden, &mut out_row, &mut grad);
                    for _ in 0..config.negatives {
                        if let Some(neg) = draw_negative(shared.noise, context, &mut rng) {
                            loss += update_output(
                                shared,
                                neg,
                                false,
                                lr,
                                &hidden,
                                &mut out_row,
                                &mut grad,
                            );
                        }
                    }
                    for &u in center {
                        shared.input.add_to_row(u, &grad);
                    }
                    stat.loss += loss as f64;
                    stat.pairs += 1;
                }
            }
        }
    }
    stats
}

fn update_output(
    shared: &Shared<'_>,
    row: usize,
    label: bool,
    lr: f32,
    hidden: &[f32],
    buf: &mut [f32],
    grad: &mut [f32],
) -> f32 {
    shared.output.read_row(row, buf);
    let loss = logistic_step(hidden, buf, label, lr, grad);
    shared.output.write_row(row, buf);
    loss
}

fn draw_negative<R: Rng>(
    noise: &WeightedAliasIndex<f64>,
    target: usize,
    rng: &mut R,
) -> Option<usize> {
    (0..NEGATIVE_RETRIES)
        .map(|_| noise.sample(rng))
        .find(|&n| n != target)
}
