//! Stratified k-fold cross validation, classification metrics, α-grid
//! comparison reports, and the three-way consensus labeler.

use std::fmt;
use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::Path;

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::corpus::{Corpus, Label};
use crate::entropy::{combine_lists, sweep_alphas, KeywordList, KeywordStats, Polarity};
use crate::error::{Error, Result};
use crate::svm::{
    train_hinge, train_perceptron, LinearModel, TrainConfig, TrainerKind, TrainingSet, Vectorizer,
};

pub const DEFAULT_K: usize = 10;

/// A stratified assignment of labeled documents to folds: classes are
/// shuffled independently, then dealt round-robin so fold sizes differ by at
/// most one both overall and within each class.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FoldPlan {
    k: usize,
    seed: u64,
    assignments: Vec<usize>,
}

impl FoldPlan {
    pub fn k(&self) -> usize {
        self.k
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    /// Fold index for each document index.
    pub fn assignments(&self) -> &[usize] {
        &self.assignments
    }

    /// Document indices held out by `fold`.
    pub fn test_indices(&self, fold: usize) -> Vec<usize> {
        self.assignments
            .iter()
            .enumerate()
            .filter(|(_, &f)| f == fold)
            .map(|(i, _)| i)
            .collect()
    }

    /// Document indices trained on when `fold` is held out.
    pub fn train_indices(&self, fold: usize) -> Vec<usize> {
        self.assignments
            .iter()
            .enumerate()
            .filter(|(_, &f)| f != fold)
            .map(|(i, _)| i)
            .collect()
    }
}

/// Builds a stratified fold plan over ±1 labels: a seeded shuffle within
/// each class, then round-robin assignment with a fold cursor that carries
/// across classes.
pub fn make_folds(labels: &[i8], k: usize, seed: u64) -> Result<FoldPlan> {
    if k < 2 {
        return Err(Error::InvalidFolds {
            message: format!("k must be at least 2, got {k}"),
        });
    }
    let mut positive = Vec::new();
    let mut negative = Vec::new();
    for (i, &y) in labels.iter().enumerate() {
        match y {
            1 => positive.push(i),
            -1 => negative.push(i),
            other => {
                return Err(Error::InvalidLabel {
                    value: other as i64,
                })
            }
        }
    }
    for (name, class) in [("positive", &positive), ("negative", &negative)] {
        if class.len() < k {
            return Err(Error::InvalidFolds {
                message: format!(
                    "{name} class has {} members, need at least k = {k}",
                    class.len()
                ),
            });
        }
    }

    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut assignments = vec![0usize; labels.len()];
    let mut cursor = 0usize;
    for class in [&mut positive, &mut negative] {
        class.shuffle(&mut rng);
        // The cursor continues across classes, so the second class starts
        // filling exactly where the first left off; that keeps overall fold
        // sizes within one of each other, not just per-class counts.
        for &i in class.iter() {
            assignments[i] = cursor % k;
            cursor += 1;
        }
    }
    Ok(FoldPlan {
        k,
        seed,
        assignments,
    })
}

/// Confusion-matrix counts and derived scores; +1 is the positive class.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Metrics {
    pub tp: usize,
    pub fp: usize,
    pub tn: usize,
    #[serde(rename = "fn")]
    pub fn_: usize,
    pub precision: f64,
    pub recall: f64,
    pub f1: f64,
    pub accuracy: f64,
}

/// Fills the confusion matrix and derives precision, recall, F1, and
/// accuracy, with zero-denominator scores defined as 0.
pub fn compute_metrics(predicted: &[i8], gold: &[i8]) -> Result<Metrics> {
    if predicted.len() != gold.len() {
        return Err(Error::LengthMismatch {
            left: predicted.len(),
            right: gold.len(),
        });
    }
    if predicted.is_empty() {
        return Err(Error::EmptyInput {
            what: "prediction list",
        });
    }
    let (mut tp, mut fp, mut tn, mut fn_) = (0usize, 0usize, 0usize, 0usize);
    for (&p, &g) in predicted.iter().zip(gold) {
        for y in [p, g] {
            if y != 1 && y != -1 {
                return Err(Error::InvalidLabel { value: y as i64 });
            }
        }
        match (p, g) {
            (1, 1) => tp += 1,
            (1, -1) => fp += 1,
            (-1, -1) => tn += 1,
            _ => fn_ += 1,
        }
    }
    let ratio = |num: usize, den: usize| {
        if den > 0 {
            num as f64 / den as f64
        } else {
            0.0
        }
    };
    let precision = ratio(tp, tp + fp);
    let recall = ratio(tp, tp + fn_);
    let f1 = if precision + recall > 0.0 {
        2.0 * precision * recall / (precision + recall)
    } else {
        0.0
    };
    let accuracy = ratio(tp + tn, tp + fp + tn + fn_);
    Ok(Metrics {
        tp,
        fp,
        tn,
        fn_,
        precision,
        recall,
        f1,
        accuracy,
    })
}

/// Cross-validation results for one keyword list.
#[derive(Debug, Clone, PartialEq)]
pub struct EvalReport {
    pub keyword_list_name: String,
    pub polarity: Polarity,
    /// Display form of the selecting coefficient(s), e.g. "2.75" or
    /// "2.75/3.75" for a combined list.
    pub alpha: String,
    pub per_fold: Vec<Metrics>,
    pub accuracy_mean: f64,
    /// Sample standard deviation (n − 1) across folds.
    pub accuracy_std: f64,
    pub f1_mean: f64,
    pub f1_std: f64,
}

fn mean(values: impl Iterator<Item = f64> + Clone) -> f64 {
    let n = values.clone().count();
    values.sum::<f64>() / n as f64
}

fn sample_std(values: impl Iterator<Item = f64> + Clone) -> f64 {
    let n = values.clone().count();
    if n < 2 {
        return 0.0;
    }
    let m = mean(values.clone());
    let ss: f64 = values.map(|x| (x - m) * (x - m)).sum();
    (ss / (n - 1) as f64).sqrt()
}

/// Stable display names for a keyword list: `(list_name, alpha_column)`.
fn list_label(list: &KeywordList) -> (String, String) {
    let a = list.config.alpha();
    let ap = list.config.alpha_prime();
    match list.polarity {
        Polarity::Positive => (format!("positive_a{a:.2}"), format!("{a:.2}")),
        Polarity::Negative => (format!("negative_a{ap:.2}"), format!("{ap:.2}")),
        Polarity::Combined => (
            format!("combined_a{a:.2}_a{ap:.2}"),
            format!("{a:.2}/{ap:.2}"),
        ),
    }
}

fn train_with(data: &TrainingSet, config: TrainConfig) -> Result<LinearModel> {
    match config.trainer {
        TrainerKind::HingeSgd => train_hinge(data, config),
        TrainerKind::Perceptron => train_perceptron(data, config),
    }
}

/// Runs stratified k-fold cross validation of the configured trainer over
/// keyword-count features. Gold Positive documents are the +1 class;
/// unlabeled documents are ignored. Every fold trains only on documents
/// outside its held-out set.
pub fn cross_validate(
    corpus: &Corpus,
    vocabulary: &KeywordList,
    train_config: TrainConfig,
    k: usize,
    seed: u64,
) -> Result<EvalReport> {
    let data = TrainingSet::from_corpus(corpus, vocabulary, Label::Positive)?;
    cross_validate_set(&data, train_config, k, seed)
}

/// [`cross_validate`] over an already-vectorized training set.
pub fn cross_validate_set(
    data: &TrainingSet,
    train_config: TrainConfig,
    k: usize,
    seed: u64,
) -> Result<EvalReport> {
    if data.vocabulary().is_empty() {
        return Err(Error::EmptyVocabulary);
    }
    if data.is_empty() {
        return Err(Error::EmptyTrainingSet);
    }
    let plan = make_folds(data.labels(), k, seed)?;
    let mut per_fold = Vec::with_capacity(k);
    for fold in 0..k {
        let train_idx = plan.train_indices(fold);
        let test_idx = plan.test_indices(fold);
        for i in &train_idx {
            assert!(
                plan.assignments()[*i] != fold,
                "fold bookkeeping error: training on held-out document"
            );
        }
        let model = train_with(&data.subset(&train_idx), train_config)?;
        let mut predicted = Vec::with_capacity(test_idx.len());
        let mut gold = Vec::with_capacity(test_idx.len());
        for &i in &test_idx {
            predicted.push(model.classify(&data.vectors()[i])?);
            gold.push(data.labels()[i]);
        }
        per_fold.push(compute_metrics(&predicted, &gold)?);
    }

    let (name, alpha) = list_label(data.vocabulary());
    let accuracies = per_fold.iter().map(|m| m.accuracy);
    let f1s = per_fold.iter().map(|m| m.f1);
    Ok(EvalReport {
        keyword_list_name: name,
        polarity: data.vocabulary().polarity,
        alpha,
        accuracy_mean: mean(accuracies.clone()),
        accuracy_std: sample_std(accuracies),
        f1_mean: mean(f1s.clone()),
        f1_std: sample_std(f1s.clone()),
        per_fold,
    })
}

/// Everything the α-grid comparison produces: the sorted reports plus the
/// winning lists (for training final detectors).
#[derive(Debug, Clone)]
pub struct GridOutcome {
    /// All evaluated reports, sorted by f1_mean descending.
    pub reports: Vec<EvalReport>,
    pub best_positive: KeywordList,
    pub best_negative: KeywordList,
    /// Union of the two winners.
    pub combined: KeywordList,
}

/// Cross-validates every keyword list on the α grid (skipping any grid
/// value that selects no words), picks the best positive and best negative
/// list by f1_mean (ties go to the lower α), and evaluates their combined
/// list as well.
#[allow(clippy::too_many_arguments)]
pub fn run_grid(
    corpus: &Corpus,
    stats: &[KeywordStats],
    alpha_min: f64,
    alpha_max: f64,
    step: f64,
    train_config: TrainConfig,
    k: usize,
    seed: u64,
) -> Result<GridOutcome> {
    let sweep = sweep_alphas(stats, alpha_min, alpha_max, step)?;
    let mut reports = Vec::new();
    let mut best_positive: Option<(f64, KeywordList)> = None;
    let mut best_negative: Option<(f64, KeywordList)> = None;

    for (entries, best) in [
        (&sweep.positive, &mut best_positive),
        (&sweep.negative, &mut best_negative),
    ] {
        for entry in entries {
            if entry.list.is_empty() {
                continue;
            }
            let report = cross_validate(corpus, &entry.list, train_config, k, seed)?;
            // Entries arrive in ascending α order, so a strict comparison
            // leaves the lower α in place on ties.
            let better = match best {
                Some((f1, _)) => report.f1_mean > *f1,
                None => true,
            };
            if better {
                *best = Some((report.f1_mean, entry.list.clone()));
            }
            reports.push(report);
        }
    }

    let (_, best_positive) = best_positive.ok_or(Error::EmptyVocabulary)?;
    let (_, best_negative) = best_negative.ok_or(Error::EmptyVocabulary)?;
    let combined = combine_lists(&best_positive, &best_negative)?;
    reports.push(cross_validate(corpus, &combined, train_config, k, seed)?);

    reports.sort_by(|a, b| b.f1_mean.partial_cmp(&a.f1_mean).expect("f1 is finite"));
    Ok(GridOutcome {
        reports,
        best_positive,
        best_negative,
        combined,
    })
}

/// The report list alone, for callers that do not need the winning lists.
#[allow(clippy::too_many_arguments)]
pub fn grid_report(
    corpus: &Corpus,
    stats: &[KeywordStats],
    alpha_min: f64,
    alpha_max: f64,
    step: f64,
    train_config: TrainConfig,
    k: usize,
    seed: u64,
) -> Result<Vec<EvalReport>> {
    run_grid(
        corpus,
        stats,
        alpha_min,
        alpha_max,
        step,
        train_config,
        k,
        seed,
    )
    .map(|outcome| outcome.reports)
}

/// Three-way category assigned by the two detectors together.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum ConsensusLabel {
    Positive,
    Neutral,
    Negative,
}

impl fmt::Display for ConsensusLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            ConsensusLabel::Positive => "positive",
            ConsensusLabel::Neutral => "neutral",
            ConsensusLabel::Negative => "negative",
        };
        f.write_str(s)
    }
}

/// Combines the positive detector's vote (+1 = "is positive") with the
/// negative detector's (+1 = "is negative"). Agreement on one polarity wins;
/// both firing is a conflict and both silent is indifference, so each maps
/// to Neutral.
pub fn consensus_label(pos_pred: i8, neg_pred: i8) -> ConsensusLabel {
    match (pos_pred > 0, neg_pred > 0) {
        (true, false) => ConsensusLabel::Positive,
        (false, true) => ConsensusLabel::Negative,
        _ => ConsensusLabel::Neutral,
    }
}

/// One consensus-labeled document.
#[derive(Debug, Clone, PartialEq)]
pub struct Prediction {
    pub id: String,
    pub pos_decision: f64,
    pub neg_decision: f64,
    pub label: ConsensusLabel,
}

/// Per-category tallies from a labeling pass.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize)]
pub struct ConsensusSummary {
    pub positive: usize,
    pub neutral: usize,
    pub negative: usize,
}

impl ConsensusSummary {
    pub fn total(&self) -> usize {
        self.positive + self.neutral + self.negative
    }
}

/// Runs both detectors over every unlabeled document (each against its own
/// vocabulary) and applies the consensus rule. Documents that already carry
/// gold labels are left alone.
pub fn label_corpus(
    corpus: &Corpus,
    pos_model: &LinearModel,
    neg_model: &LinearModel,
) -> Result<(Vec<Prediction>, ConsensusSummary)> {
    let pos_vectorizer = Vectorizer::from_words(pos_model.vocabulary());
    let neg_vectorizer = Vectorizer::from_words(neg_model.vocabulary());
    let mut predictions = Vec::new();
    let mut summary = ConsensusSummary::default();
    for doc in corpus.documents() {
        if doc.label != Label::Unlabeled {
            continue;
        }
        let pos_decision = pos_model.decision(&pos_vectorizer.vectorize(doc)?)?;
        let neg_decision = neg_model.decision(&neg_vectorizer.vectorize(doc)?)?;
        let pos_pred: i8 = if pos_decision >= 0.0 { 1 } else { -1 };
        let neg_pred: i8 = if neg_decision >= 0.0 { 1 } else { -1 };
        let label = consensus_label(pos_pred, neg_pred);
        match label {
            ConsensusLabel::Positive => summary.positive += 1,
            ConsensusLabel::Neutral => summary.neutral += 1,
            ConsensusLabel::Negative => summary.negative += 1,
        }
        predictions.push(Prediction {
            id: doc.id.clone(),
            pos_decision,
            neg_decision,
            label,
        });
    }
    Ok((predictions, summary))
}

const REPORT_HEADER: &str =
    "list_name\talpha\tpolarity\tacc_mean\tacc_std\tf1_mean\tf1_std\tper_fold";

/// Writes reports as TSV: one row per list, per-fold metrics as a JSON array
/// in the last cell.
pub fn write_reports_tsv(reports: &[EvalReport], path: impl AsRef<Path>) -> Result<()> {
    let path = path.as_ref();
    let file = File::create(path).map_err(|e| Error::io(path, e))?;
    let mut writer = BufWriter::new(file);
    writeln!(writer, "{REPORT_HEADER}").map_err(|e| Error::io(path, e))?;
    for r in reports {
        let per_fold = serde_json::to_string(&r.per_fold).expect("metrics serialize");
        writeln!(
            writer,
            "{}\t{}\t{}\t{:.6}\t{:.6}\t{:.6}\t{:.6}\t{}",
            r.keyword_list_name,
            r.alpha,
            r.polarity,
            r.accuracy_mean,
            r.accuracy_std,
            r.f1_mean,
            r.f1_std,
            per_fold
        )
        .map_err(|e| Error::io(path, e))?;
    }
    writer.flush().map_err(|e| Error::io(path, e))
}

/// Writes an aligned text table of mean±std precision, recall, F1, and
/// accuracy per list (precision/recall recomputed from the per-fold
/// metrics).
pub fn write_reports_text(reports: &[EvalReport], path: impl AsRef<Path>) -> Result<()> {
    let path = path.as_ref();
    let file = File::create(path).map_err(|e| Error::io(path, e))?;
    let mut writer = BufWriter::new(file);
    writeln!(
        writer,
        "{:<28} {:>11} {:>11} {:>11} {:>11}",
        "List", "Precision", "Recall", "F1", "Accuracy"
    )
    .map_err(|e| Error::io(path, e))?;
    for r in reports {
        let cell = |values: Vec<f64>| {
            format!(
                "{:.2}±{:.2}",
                mean(values.iter().copied()),
                sample_std(values.iter().copied())
            )
        };
        writeln!(
            writer,
            "{:<28} {:>11} {:>11} {:>11} {:>11}",
            r.keyword_list_name,
            cell(r.per_fold.iter().map(|m| m.precision).collect()),
            cell(r.per_fold.iter().map(|m| m.recall).collect()),
            cell(r.per_fold.iter().map(|m| m.f1).collect()),
            cell(r.per_fold.iter().map(|m| m.accuracy).collect()),
        )
        .map_err(|e| Error::io(path, e))?;
    }
    writer.flush().map_err(|e| Error::io(path, e))
}
