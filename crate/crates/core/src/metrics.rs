//! Evaluation: confusion-matrix ratios, Cohen's κ, ROC-AUC and repeated
//! k-fold cross-validation. Clickbait is the positive class throughout.

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::classify::{train_classifier, ClassifierConfig};
use crate::corpus::{label_counts, Label, LabeledHeadline};
use crate::embed::Pretrained;
use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize)]
pub struct ConfusionMatrix {
    pub tp: u64,
    pub fp: u64,
    #[serde(rename = "fn")]
    pub fn_: u64,
    pub tn: u64,
}

impl ConfusionMatrix {
    pub fn new(tp: u64, fp: u64, fn_: u64, tn: u64) -> Self {
        ConfusionMatrix { tp, fp, fn_, tn }
    }

    pub fn from_pairs(truth: &[Label], predicted: &[Label]) -> Self {
        assert_eq!(truth.len(), predicted.len());
        let mut cm = ConfusionMatrix::default();
        for (&t, &p) in truth.iter().zip(predicted) {
            cm.record(t, p);
        }
        cm
    }

    pub fn record(&mut self, truth: Label, predicted: Label) {
        match (truth.is_clickbait(), predicted.is_clickbait()) {
            (true, true) => self.tp += 1,
            (false, true) => self.fp += 1,
            (true, false) => self.fn_ += 1,
            (false, false) => self.tn += 1,
        }
    }

    pub fn total(&self) -> u64 {
        self.tp + self.fp + self.fn_ + self.tn
    }
}

impl std::ops::AddAssign for ConfusionMatrix {
    fn add_assign(&mut self, o: Self) {
        self.tp += o.tp;
        self.fp += o.fp;
        self.fn_ += o.fn_;
        self.tn += o.tn;
    }
}

/// Precision, recall, F1 and accuracy. A ratio with a zero denominator is
/// reported as 0 and flagged.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct ClassificationMetrics {
    pub precision: f64,
    pub recall: f64,
    pub f_measure: f64,
    pub accuracy: f64,
    pub precision_undefined: bool,
    pub recall_undefined: bool,
    pub f_measure_undefined: bool,
}

fn ratio(num: u64, den: u64) -> (f64, bool) {
    if den == 0 {
        (0.0, true)
    } else {
        (num as f64 / den as f64, false)
    }
}

fn require_total(cm: &ConfusionMatrix) -> Result<f64> {
    match cm.total() {
        0 => Err(Error::Invalid("confusion matrix is empty".into())),
        n => Ok(n as f64),
    }
}

pub fn classification_metrics(cm: &ConfusionMatrix) -> Result<ClassificationMetrics> {
    let total = require_total(cm)?;
    let (precision, precision_undefined) = ratio(cm.tp, cm.tp + cm.fp);
    let (recall, recall_undefined) = ratio(cm.tp, cm.tp + cm.fn_);
    let (f_measure, f_measure_undefined) = if precision + recall > 0.0 {
        (2.0 * precision * recall / (precision + recall), false)
    } else {
        (0.0, true)
    };
    Ok(ClassificationMetrics {
        precision,
        recall,
        f_measure,
        accuracy: (cm.tp + cm.tn) as f64 / total,
        precision_undefined,
        recall_undefined,
        f_measure_undefined,
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct Kappa {
    pub value: f64,
    pub observed: f64,
    pub expected: f64,
    /// Set when chance agreement is 1 and κ is reported as 0.
    pub undefined: bool,
}

pub fn cohens_kappa(cm: &ConfusionMatrix) -> Result<Kappa> {
    let total = require_total(cm)?;
    let observed = (cm.tp + cm.tn) as f64 / total;
    let chance = ((cm.tp + cm.fn_) as f64 * (cm.tp + cm.fp) as f64
        + (cm.tn + cm.fp) as f64 * (cm.tn + cm.fn_) as f64)
        / (total * total);
    if chance >= 1.0 {
        return Ok(Kappa {
            value: 0.0,
            observed,
            expected: chance,
            undefined: true,
        });
    }
    Ok(Kappa {
        value: (observed - chance) / (1.0 - chance),
        observed,
        expected: chance,
        undefined: false,
    })
}

/// Area under the ROC curve as the Mann-Whitney statistic: the fraction of
/// (clickbait, non-clickbait) pairs where the clickbait item scores higher,
/// ties counting one half. Computed from average ranks in O(n log n).
pub fn roc_auc(scores: &[f64], labels: &[Label]) -> Result<f64> {
    if scores.len() != labels.len() {
        return Err(Error::Invalid(format!(
            "{} scores for {} labels",
            scores.len(),
            labels.len()
        )));
    }
    if scores.iter().any(|s| s.is_nan()) {
        return Err(Error::Invalid("scores contain NaN".into()));
    }
    let positives = labels.iter().filter(|l| l.is_clickbait()).count();
    let negatives = labels.len() - positives;
    if positives == 0 || negatives == 0 {
        return Err(Error::Invalid("ROC-AUC needs both classes".into()));
    }

    let mut order: Vec<usize> = (0..scores.len()).collect();
    order.sort_by(|&a, &b| scores[a].total_cmp(&scores[b]));
    // Twice the rank sum of positives keeps tied average ranks integral.
    let mut twice_rank_sum: u128 = 0;
    let mut i = 0;
    while i < order.len() {
        let mut j = i;
        while j + 1 < order.len() && scores[order[j + 1]] == scores[order[i]] {
            j += 1;
        }
        // Ranks i+1..=j+1 share the average (i + j + 2) / 2.
        let twice_avg = (i + j + 2) as u128;
        let pos_in_tie = order[i..=j]
            .iter()
            .filter(|&&k| labels[k].is_clickbait())
            .count() as u128;
        twice_rank_sum += twice_avg * pos_in_tie;
        i = j + 1;
    }
    let p = positives as u128;
    let twice_u = twice_rank_sum - p * (p + 1);
    Ok(twice_u as f64 / (2.0 * positives as f64 * negatives as f64))
}

/// Shuffles `0..n` with `seed` and cuts it into `k` folds whose sizes differ
/// by at most one (the first `n % k` folds are larger).
pub fn kfold_split(n: usize, k: usize, seed: u64) -> Result<Vec<Vec<usize>>> {
    if k < 2 {
        return Err(Error::Config(format!(
            "k must be at least 2 (k >= 2), got {k}"
        )));
    }
    if n < k {
        return Err(Error::Config(format!(
            "cannot split {n} items into {k} folds"
        )));
    }
    let mut perm: Vec<usize> = (0..n).collect();
    perm.shuffle(&mut ChaCha8Rng::seed_from_u64(seed));
    let (base, extra) = (n / k, n % k);
    let mut folds = Vec::with_capacity(k);
    let mut start = 0;
    for f in 0..k {
        let len = base + usize::from(f < extra);
        folds.push(perm[start..start + len].to_vec());
        start += len;
    }
    Ok(folds)
}

/// The six reported measures.
#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize)]
pub struct MetricSet {
    pub precision: f64,
    pub recall: f64,
    pub f_measure: f64,
    pub accuracy: f64,
    pub kappa: f64,
    pub roc_auc: f64,
}

impl MetricSet {
    fn from_predictions(cm: &ConfusionMatrix, scores: &[f64], labels: &[Label]) -> Result<Self> {
        let m = classification_metrics(cm)?;
        Ok(MetricSet {
            precision: m.precision,
            recall: m.recall,
            f_measure: m.f_measure,
            accuracy: m.accuracy,
            kappa: cohens_kappa(cm)?.value,
            roc_auc: roc_auc(scores, labels).unwrap_or(f64::NAN),
        })
    }

    fn mean(sets: &[MetricSet]) -> MetricSet {
        let n = sets.len() as f64;
        let avg = |f: fn(&MetricSet) -> f64| {
            let defined: Vec<f64> = sets.iter().map(f).filter(|v| !v.is_nan()).collect();
            if defined.is_empty() {
                f64::NAN
            } else {
                defined.iter().sum::<f64>() / defined.len() as f64
            }
        };
        debug_assert!(n > 0.0);
        MetricSet {
            precision: avg(|m| m.precision),
            recall: avg(|m| m.recall),
            f_measure: avg(|m| m.f_measure),
            accuracy: avg(|m| m.accuracy),
            kappa: avg(|m| m.kappa),
            roc_auc: avg(|m| m.roc_auc),
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct RepeatReport {
    pub seed: u64,
    pub confusion: ConfusionMatrix,
    /// Ratios of the summed fold confusion counts; AUC over all held-out scores.
    pub micro: MetricSet,
    /// Mean of per-fold metrics.
    pub macro_average: MetricSet,
}

/// Cross-validation summary. The headline numbers are micro-averaged within
/// each repeat, then averaged over repeats.
#[derive(Clone, Debug, Serialize)]
pub struct MetricsReport {
    pub precision: f64,
    pub recall: f64,
    pub f_measure: f64,
    pub accuracy: f64,
    pub kappa: f64,
    pub roc_auc: f64,
    pub folds: usize,
    pub repeats: usize,
    pub examples: usize,
    pub macro_average: MetricSet,
    pub per_repeat: Vec<RepeatReport>,
}

impl MetricsReport {
    pub fn micro(&self) -> MetricSet {
        MetricSet {
            precision: self.precision,
            recall: self.recall,
            f_measure: self.f_measure,
            accuracy: self.accuracy,
            kappa: self.kappa,
            roc_auc: self.roc_auc,
        }
    }
}

/// Repeated k-fold cross-validation of the classifier. Repeat `r` shuffles
/// with seed `config.seed + r` and trains every fold with that seed.
pub fn cross_validate(
    data: &[LabeledHeadline],
    k: usize,
    repeats: usize,
    config: &ClassifierConfig,
    pretrained: Option<&Pretrained>,
) -> Result<MetricsReport> {
    if repeats == 0 {
        return Err(Error::Config("repeats must be at least 1".into()));
    }
    config.validate()?;
    let mut per_repeat = Vec::with_capacity(repeats);
    for r in 0..repeats {
        let seed = config.seed.wrapping_add(r as u64);
        let folds = kfold_split(data.len(), k, seed)?;
        let fold_config = ClassifierConfig {
            seed,
            ..config.clone()
        };
        let mut pooled = ConfusionMatrix::default();
        let mut pooled_scores = Vec::with_capacity(data.len());
        let mut pooled_labels = Vec::with_capacity(data.len());
        let mut fold_sets = Vec::with_capacity(k);

        for (f, held_out) in folds.iter().enumerate() {
            let mut in_test = vec![false; data.len()];
            held_out.iter().for_each(|&i| in_test[i] = true);
            let train: Vec<LabeledHeadline> = data
                .iter()
                .zip(&in_test)
                .filter(|(_, &t)| !t)
                .map(|(h, _)| h.clone())
                .collect();
            if !label_counts(&train).has_both() {
                return Err(Error::Fold {
                    fold: f,
                    message: "training split contains a single class".into(),
                });
            }
            let model = train_classifier(&train, pretrained, &fold_config)?;
            let texts: Vec<&str> = held_out.iter().map(|&i| data[i].text.as_str()).collect();
            let predictions = model.predict_batch(&texts, config.workers);
            let mut cm = ConfusionMatrix::default();
            let mut scores = Vec::with_capacity(held_out.len());
            let mut labels = Vec::with_capacity(held_out.len());
            for (&i, p) in held_out.iter().zip(&predictions) {
                cm.record(data[i].label, p.label);
                scores.push(p.p_clickbait());
                labels.push(data[i].label);
            }
            let set = MetricSet::from_predictions(&cm, &scores, &labels)?;
            log::info!(
                "repeat {r} fold {f}: accuracy {:.4}, kappa {:.4}",
                set.accuracy,
                set.kappa
            );
            fold_sets.push(set);
            pooled += cm;
            pooled_scores.extend(scores);
            pooled_labels.extend(labels);
        }
        per_repeat.push(RepeatReport {
            seed,
            confusion: pooled,
            micro: MetricSet::from_predictions(&pooled, &pooled_scores, &pooled_labels)?,
            macro_average: MetricSet::mean(&fold_sets),
        });
    }

    let micro = MetricSet::mean(&per_repeat.iter().map(|r| r.micro).collect::<Vec<_>>());
    let macro_average = MetricSet::mean(
        &per_repeat
            .iter()
            .map(|r| r.macro_average)
            .collect::<Vec<_>>(),
    );
    Ok(MetricsReport {
        precision: micro.precision,
        recall: micro.recall,
        f_measure: micro.f_measure,
        accuracy: micro.accuracy,
        kappa: micro.kappa,
        roc_auc: micro.roc_auc,
        folds: k,
        repeats,
        examples: data.len(),
        macro_average,
        per_repeat,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::textproc::VocabConfig;
    use rand::Rng;

    const CB: Label = Label::Clickbait;
    const NC: Label = Label::NonClickbait;

    fn brute_auc(scores: &[f64], labels: &[Label]) -> f64 {
        let mut wins = 0.0;
        let mut pairs = 0.0;
        for (i, &si) in scores.iter().enumerate() {
            for (j, &sj) in scores.iter().enumerate() {
                if labels[i] == CB && labels[j] == NC {
                    pairs += 1.0;
                    if si > sj {
                        wins += 1.0;
                    } else if si == sj {
                        wins += 0.5;
                    }
                }
            }
        }
        wins / pairs
    }

    #[test]
    fn worked_confusion_example() {
        let cm = ConfusionMatrix::new(45, 10, 5, 40);
        let m = classification_metrics(&cm).unwrap();
        assert!((m.precision - 45.0 / 55.0).abs() < 1e-12);
        assert!((m.precision - 0.8182).abs() < 5e-5);
        assert!((m.recall - 0.9).abs() < 1e-12);
        assert!((m.f_measure - 0.8571).abs() < 5e-5);
        assert!((m.accuracy - 0.85).abs() < 1e-12);
    }

    #[test]
    fn perfect_and_degenerate() {
        let m = classification_metrics(&ConfusionMatrix::new(50, 0, 0, 50)).unwrap();
        assert_eq!([m.precision, m.recall, m.f_measure, m.accuracy], [1.0; 4]);
        let m = classification_metrics(&ConfusionMatrix::new(0, 0, 10, 90)).unwrap();
        assert_eq!(m.precision, 0.0);
        assert!(m.precision_undefined && m.f_measure_undefined);
        assert!(!m.recall_undefined);
        assert!(classification_metrics(&ConfusionMatrix::default()).is_err());
    }

    #[test]
    fn kappa_examples() {
        let k = cohens_kappa(&ConfusionMatrix::new(45, 10, 5, 40)).unwrap();
        assert!((k.observed - 0.85).abs() < 1e-12);
        assert!((k.expected - 0.50).abs() < 1e-12);
        assert!((k.value - 0.70).abs() < 1e-12);
        assert_eq!(
            cohens_kappa(&ConfusionMatrix::new(30, 0, 0, 70))
                .unwrap()
                .value,
            1.0
        );
        assert_eq!(
            cohens_kappa(&ConfusionMatrix::new(25, 25, 25, 25))
                .unwrap()
                .value,
            0.0
        );
        let k = cohens_kappa(&ConfusionMatrix::new(0, 0, 0, 10)).unwrap();
        assert!(k.undefined);
        assert_eq!(k.value, 0.0);
    }

    #[test]
    fn auc_examples() {
        assert_eq!(
            roc_auc(&[0.9, 0.8, 0.7, 0.1], &[CB, CB, NC, NC]).unwrap(),
            1.0
        );
        assert_eq!(roc_auc(&[0.3; 4], &[CB, NC, CB, NC]).unwrap(), 0.5);
        assert_eq!(
            roc_auc(&[0.8, 0.4, 0.6, 0.2], &[CB, CB, NC, NC]).unwrap(),
            0.75
        );
        assert!(roc_auc(&[0.1, 0.2], &[CB, CB]).is_err());
        assert!(roc_auc(&[0.1], &[CB, NC]).is_err());
    }

    #[test]
    fn auc_invariant_under_monotone_maps() {
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        for _ in 0..100 {
            let n = rng.gen_range(2..40);
            let scores: Vec<f64> = (0..n)
                .map(|_| (rng.gen_range(0..20) as f64) / 20.0)
                .collect();
            let mut labels: Vec<Label> = (0..n).map(|_| if rng.gen() { CB } else { NC }).collect();
            labels[0] = CB;
            labels[1] = NC;
            let base = roc_auc(&scores, &labels).unwrap();
            let exp: Vec<f64> = scores.iter().map(|s| s.exp()).collect();
            let affine: Vec<f64> = scores.iter().map(|s| 3.0 * s - 7.0).collect();
            assert_eq!(roc_auc(&exp, &labels).unwrap(), base);
            assert_eq!(roc_auc(&affine, &labels).unwrap(), base);
            assert!((base - brute_auc(&scores, &labels)).abs() < 1e-12);
        }
    }

    #[test]
    fn kappa_bounds() {
        let mut rng = ChaCha8Rng::seed_from_u64(8);
        for _ in 0..1000 {
            let cm = ConfusionMatrix::new(
                rng.gen_range(0..20),
                rng.gen_range(0..20),
                rng.gen_range(0..20),
                rng.gen_range(1..20),
            );
            let k = cohens_kappa(&cm).unwrap();
            assert!((-1.0..=1.0).contains(&k.value));
            assert_eq!(k.value == 1.0, cm.fp == 0 && cm.fn_ == 0 && !k.undefined);
        }
    }

    #[test]
    fn folds() {
        let f = kfold_split(32_000, 10, 1).unwrap();
        assert!(f.iter().all(|fold| fold.len() == 3_200));
        let sizes: Vec<usize> = kfold_split(10, 3, 1)
            .unwrap()
            .iter()
            .map(Vec::len)
            .collect();
        assert_eq!(sizes, [4, 3, 3]);
        assert_eq!(
            kfold_split(100, 5, 9).unwrap(),
            kfold_split(100, 5, 9).unwrap()
        );
        assert_ne!(
            kfold_split(100, 5, 9).unwrap(),
            kfold_split(100, 5, 10).unwrap()
        );
        assert!(kfold_split(10, 1, 0).is_err());
        assert!(kfold_split(2, 3, 0).is_err());
    }

    proptest::proptest! {
        #[test]
        fn folds_partition(n in 2usize..300, k in 2usize..12, seed in 0u64..1000) {
            proptest::prop_assume!(n >= k);
            let folds = kfold_split(n, k, seed).unwrap();
            let mut seen = vec![false; n];
            for fold in &folds {
                for &i in fold {
                    proptest::prop_assert!(!seen[i]);
                    seen[i] = true;
                }
            }
            proptest::prop_assert!(seen.iter().all(|&s| s));
            let max = folds.iter().map(Vec::len).max().unwrap();
            let min = folds.iter().map(Vec::len).min().unwrap();
            proptest::prop_assert!(max - min <= 1);
        }
    }

    fn toy_set() -> Vec<LabeledHeadline> {
        let mut data = Vec::new();
        for _ in 0..50 {
            data.push(LabeledHeadline::new("wow amazing", CB).unwrap());
            data.push(LabeledHeadline::new("senate passes bill", NC).unwrap());
        }
        data
    }

    fn toy_config() -> ClassifierConfig {
        ClassifierConfig {
            dim: 16,
            vocab: VocabConfig {
                buckets: 5000,
                ..Default::default()
            },
            seed: 1,
            ..Default::default()
        }
    }

    #[test]
    fn cross_validate_separable() {
        let report = cross_validate(&toy_set(), 5, 1, &toy_config(), None).unwrap();
        assert_eq!(report.accuracy, 1.0);
        assert_eq!(report.kappa, 1.0);
        assert_eq!(report.roc_auc, 1.0);
        assert_eq!(report.macro_average.accuracy, 1.0);
        assert_eq!(report.per_repeat[0].confusion.total(), 100);
    }

    #[test]
    fn cross_validate_names_single_class_fold() {
        // Leave-one-out over a single clickbait: its fold trains on one class.
        let mut data: Vec<_> = (0..20)
            .map(|_| LabeledHeadline::new("plain news", NC).unwrap())
            .collect();
        data.push(LabeledHeadline::new("wow", CB).unwrap());
        let err = cross_validate(&data, 21, 1, &toy_config(), None).unwrap_err();
        assert!(matches!(err, Error::Fold { .. }), "{err}");
    }
}
