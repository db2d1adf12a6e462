//! Keyword-count vectorization and linear classifiers.
//!
//! Documents become sparse vectors of raw keyword counts. The primary
//! trainer minimizes the soft-margin hinge objective
//! `0.5·||w||² + C·Σ max(0, 1 − y·(w·x + b))` by epoch-based subgradient
//! descent; a mistake-driven perceptron is kept as a reference trainer.
//! The decision rule is `f(x) = w·x + b`, classifying +1 exactly when
//! `f(x) ≥ 0`.

use std::collections::HashMap;
use std::fmt;
use std::fs::File;
use std::io::{BufRead, BufReader, BufWriter, Write};
use std::path::Path;
use std::str::FromStr;

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::corpus::{Corpus, Document, Label};
use crate::entropy::KeywordList;
use crate::error::{Error, Result};

pub const DEFAULT_C: f64 = 3.0;
pub const DEFAULT_EPOCHS: usize = 50;
pub const DEFAULT_LEARNING_RATE: f64 = 1.0;
pub const DEFAULT_TOLERANCE: f64 = 1e-6;

/// Sparse nonnegative count vector over a fixed keyword vocabulary.
#[derive(Debug, Clone, PartialEq)]
pub struct FeatureVector {
    indices: Vec<usize>,
    values: Vec<f64>,
    dimension: usize,
}

impl FeatureVector {
    /// Builds a sparse vector; indices must be strictly increasing and below
    /// `dimension`, values finite and ≥ 1.
    pub fn new(indices: Vec<usize>, values: Vec<f64>, dimension: usize) -> Result<FeatureVector> {
        if indices.len() != values.len() {
            return Err(Error::LengthMismatch {
                left: indices.len(),
                right: values.len(),
            });
        }
        for pair in indices.windows(2) {
            if pair[0] >= pair[1] {
                return Err(Error::InvalidConfig {
                    message: "feature indices must be strictly increasing".to_string(),
                });
            }
        }
        if let Some(&last) = indices.last() {
            if last >= dimension {
                return Err(Error::DimensionMismatch {
                    expected: dimension,
                    found: last + 1,
                });
            }
        }
        for &v in &values {
            if !v.is_finite() {
                return Err(Error::NonFinite {
                    what: "feature value",
                });
            }
            if v < 1.0 {
                return Err(Error::InvalidConfig {
                    message: format!("feature values must be at least 1, got {v}"),
                });
            }
        }
        Ok(FeatureVector {
            indices,
            values,
            dimension,
        })
    }

    pub fn zero(dimension: usize) -> FeatureVector {
        FeatureVector {
            indices: Vec::new(),
            values: Vec::new(),
            dimension,
        }
    }

    pub fn dimension(&self) -> usize {
        self.dimension
    }

    pub fn nnz(&self) -> usize {
        self.indices.len()
    }

    pub fn iter(&self) -> impl Iterator<Item = (usize, f64)> + '_ {
        self.indices
            .iter()
            .copied()
            .zip(self.values.iter().copied())
    }

    /// Dot product against a dense weight vector of matching dimension.
    fn dot_dense(&self, weights: &[f64]) -> f64 {
        self.iter().map(|(j, v)| weights[j] * v).sum()
    }

    /// Sparse-sparse dot product by index merge.
    pub fn dot(&self, other: &FeatureVector) -> f64 {
        let mut sum = 0.0;
        let (mut a, mut b) = (0, 0);
        while a < self.indices.len() && b < other.indices.len() {
            match self.indices[a].cmp(&other.indices[b]) {
                std::cmp::Ordering::Less => a += 1,
                std::cmp::Ordering::Greater => b += 1,
                std::cmp::Ordering::Equal => {
                    sum += self.values[a] * other.values[b];
                    a += 1;
                    b += 1;
                }
            }
        }
        sum
    }
}

/// Counts keyword occurrences in documents against a fixed keyword list.
#[derive(Debug, Clone)]
pub struct Vectorizer {
    index: HashMap<String, usize>,
    dimension: usize,
}

impl Vectorizer {
    pub fn new(vocabulary: &KeywordList) -> Vectorizer {
        Vectorizer::from_words(vocabulary.words())
    }

    /// Builds a vectorizer over a bare word list, e.g. a trained model's
    /// vocabulary.
    pub fn from_words(words: &[String]) -> Vectorizer {
        let index = words
            .iter()
            .enumerate()
            .map(|(j, w)| (w.clone(), j))
            .collect();
        Vectorizer {
            index,
            dimension: words.len(),
        }
    }

    pub fn dimension(&self) -> usize {
        self.dimension
    }

    /// Counts each vocabulary word among the document's tokens;
    /// out-of-vocabulary tokens are ignored and all-zero vectors are fine.
    pub fn vectorize(&self, doc: &Document) -> Result<FeatureVector> {
        let mut counts: HashMap<usize, f64> = HashMap::new();
        for token in doc.tokens()? {
            if let Some(&j) = self.index.get(token.as_str()) {
                *counts.entry(j).or_insert(0.0) += 1.0;
            }
        }
        let mut indices: Vec<usize> = counts.keys().copied().collect();
        indices.sort_unstable();
        let values = indices.iter().map(|j| counts[j]).collect();
        FeatureVector::new(indices, values, self.dimension)
    }
}

/// One-off convenience around [`Vectorizer`].
pub fn vectorize(doc: &Document, vocabulary: &KeywordList) -> Result<FeatureVector> {
    Vectorizer::new(vocabulary).vectorize(doc)
}

/// Feature vectors with ±1 labels over a shared keyword vocabulary.
#[derive(Debug, Clone)]
pub struct TrainingSet {
    vectors: Vec<FeatureVector>,
    labels: Vec<i8>,
    vocabulary: KeywordList,
}

impl TrainingSet {
    pub fn new(
        vectors: Vec<FeatureVector>,
        labels: Vec<i8>,
        vocabulary: KeywordList,
    ) -> Result<TrainingSet> {
        if vectors.len() != labels.len() {
            return Err(Error::LengthMismatch {
                left: vectors.len(),
                right: labels.len(),
            });
        }
        for &y in &labels {
            if y != 1 && y != -1 {
                return Err(Error::InvalidLabel { value: y as i64 });
            }
        }
        for x in &vectors {
            if x.dimension() != vocabulary.len() {
                return Err(Error::DimensionMismatch {
                    expected: vocabulary.len(),
                    found: x.dimension(),
                });
            }
        }
        Ok(TrainingSet {
            vectors,
            labels,
            vocabulary,
        })
    }

    /// Vectorizes the labeled documents of a corpus. Documents whose gold
    /// label equals `target` become +1, the opposite class becomes −1, and
    /// unlabeled documents are skipped.
    pub fn from_corpus(
        corpus: &Corpus,
        vocabulary: &KeywordList,
        target: Label,
    ) -> Result<TrainingSet> {
        if target == Label::Unlabeled {
            return Err(Error::InvalidConfig {
                message: "training target must be positive or negative".to_string(),
            });
        }
        let vectorizer = Vectorizer::new(vocabulary);
        let mut vectors = Vec::new();
        let mut labels = Vec::new();
        for doc in corpus.documents() {
            if doc.label == Label::Unlabeled {
                continue;
            }
            vectors.push(vectorizer.vectorize(doc)?);
            labels.push(if doc.label == target { 1 } else { -1 });
        }
        TrainingSet::new(vectors, labels, vocabulary.clone())
    }

    pub fn len(&self) -> usize {
        self.vectors.len()
    }

    pub fn is_empty(&self) -> bool {
        self.vectors.is_empty()
    }

    pub fn vectors(&self) -> &[FeatureVector] {
        &self.vectors
    }

    pub fn labels(&self) -> &[i8] {
        &self.labels
    }

    pub fn vocabulary(&self) -> &KeywordList {
        &self.vocabulary
    }

    /// The rows at `indices`, as a new training set over the same
    /// vocabulary.
    pub fn subset(&self, indices: &[usize]) -> TrainingSet {
        TrainingSet {
            vectors: indices.iter().map(|&i| self.vectors[i].clone()).collect(),
            labels: indices.iter().map(|&i| self.labels[i]).collect(),
            vocabulary: self.vocabulary.clone(),
        }
    }

    fn check_trainable(&self) -> Result<()> {
        if self.is_empty() {
            return Err(Error::EmptyTrainingSet);
        }
        if self.vocabulary.is_empty() {
            return Err(Error::EmptyVocabulary);
        }
        let has_pos = self.labels.contains(&1);
        let has_neg = self.labels.contains(&-1);
        if !has_pos || !has_neg {
            return Err(Error::SingleClassTrainingSet);
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TrainerKind {
    HingeSgd,
    Perceptron,
}

impl fmt::Display for TrainerKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            TrainerKind::HingeSgd => "hinge_sgd",
            TrainerKind::Perceptron => "perceptron",
        };
        f.write_str(s)
    }
}

impl FromStr for TrainerKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<TrainerKind> {
        match s {
            "hinge_sgd" => Ok(TrainerKind::HingeSgd),
            "perceptron" => Ok(TrainerKind::Perceptron),
            other => Err(Error::InvalidConfig {
                message: format!("unknown trainer {other:?} (expected hinge_sgd or perceptron)"),
            }),
        }
    }
}

/// Training hyperparameters.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TrainConfig {
    pub trainer: TrainerKind,
    /// Soft-margin penalty for the hinge trainer.
    pub c: f64,
    pub epochs: usize,
    /// Perceptron step size.
    pub learning_rate: f64,
    /// Seed for the per-epoch shuffle.
    pub seed: u64,
    /// Early stop once the best objective improves by less than this
    /// between epochs; 0 disables early stopping.
    pub tolerance: f64,
}

impl Default for TrainConfig {
    fn default() -> TrainConfig {
        TrainConfig {
            trainer: TrainerKind::HingeSgd,
            c: DEFAULT_C,
            epochs: DEFAULT_EPOCHS,
            learning_rate: DEFAULT_LEARNING_RATE,
            seed: 0,
            tolerance: DEFAULT_TOLERANCE,
        }
    }
}

impl TrainConfig {
    pub fn validate(&self) -> Result<()> {
        if !self.c.is_finite() || self.c <= 0.0 {
            return Err(Error::InvalidConfig {
                message: format!("c must be finite and positive, got {}", self.c),
            });
        }
        if self.epochs == 0 {
            return Err(Error::InvalidConfig {
                message: "epochs must be at least 1".to_string(),
            });
        }
        if !self.learning_rate.is_finite() || self.learning_rate <= 0.0 {
            return Err(Error::InvalidConfig {
                message: format!(
                    "learning_rate must be finite and positive, got {}",
                    self.learning_rate
                ),
            });
        }
        if !self.tolerance.is_finite() || self.tolerance < 0.0 {
            return Err(Error::InvalidConfig {
                message: format!(
                    "tolerance must be finite and nonnegative, got {}",
                    self.tolerance
                ),
            });
        }
        Ok(())
    }
}

/// A trained linear classifier: finite weights (one per vocabulary word)
/// plus an intercept.
#[derive(Debug, Clone, PartialEq)]
pub struct LinearModel {
    weights: Vec<f64>,
    bias: f64,
    vocabulary: Vec<String>,
    config: TrainConfig,
}

impl LinearModel {
    pub fn new(
        weights: Vec<f64>,
        bias: f64,
        vocabulary: Vec<String>,
        config: TrainConfig,
    ) -> Result<LinearModel> {
        if weights.len() != vocabulary.len() {
            return Err(Error::DimensionMismatch {
                expected: vocabulary.len(),
                found: weights.len(),
            });
        }
        if !bias.is_finite() || weights.iter().any(|w| !w.is_finite()) {
            return Err(Error::NonFinite {
                what: "model weights",
            });
        }
        Ok(LinearModel {
            weights,
            bias,
            vocabulary,
            config,
        })
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn bias(&self) -> f64 {
        self.bias
    }

    pub fn vocabulary(&self) -> &[String] {
        &self.vocabulary
    }

    pub fn config(&self) -> &TrainConfig {
        &self.config
    }

    pub fn dimension(&self) -> usize {
        self.weights.len()
    }

    /// The raw score `w·x + b`.
    pub fn decision(&self, x: &FeatureVector) -> Result<f64> {
        if x.dimension() != self.weights.len() {
            return Err(Error::DimensionMismatch {
                expected: self.weights.len(),
                found: x.dimension(),
            });
        }
        Ok(x.dot_dense(&self.weights) + self.bias)
    }

    /// +1 exactly when the decision score is ≥ 0 (the boundary maps to +1),
    /// else −1.
    pub fn classify(&self, x: &FeatureVector) -> Result<i8> {
        Ok(if self.decision(x)? >= 0.0 { 1 } else { -1 })
    }
}

/// The soft-margin objective `0.5·||w||² + C·Σ max(0, 1 − y·(w·x + b))`.
pub fn hinge_objective(model: &LinearModel, data: &TrainingSet) -> Result<f64> {
    let mut hinge_sum = 0.0;
    for (x, &y) in data.vectors().iter().zip(data.labels()) {
        let margin = f64::from(y) * model.decision(x)?;
        hinge_sum += (1.0 - margin).max(0.0);
    }
    let norm_sq: f64 = model.weights().iter().map(|w| w * w).sum();
    Ok(0.5 * norm_sq + model.config().c * hinge_sum)
}

/// Trains by hinge subgradient descent with step `1/(λ·t)`, `λ = 1/(C·n)`,
/// `t` counting samples across epochs. Samples are visited in a fresh
/// seeded-shuffle order each epoch; each end-of-epoch iterate is evaluated
/// with its weights' exact minimizing intercept, and the iterate with the
/// lowest objective is returned.
pub fn train_hinge(data: &TrainingSet, config: TrainConfig) -> Result<LinearModel> {
    train_hinge_with_trace(data, config).map(|(model, _)| model)
}

/// The intercept minimizing `Σ max(0, 1 − y_i(s_i + b))` for fixed scores
/// `s_i = w·x_i`. The sum is convex and piecewise linear in `b`, so the
/// minimum sits on a breakpoint `b_i = y_i − s_i`; a sweep over the sorted
/// breakpoints finds it exactly. Requires both classes present (otherwise
/// the sum has no interior minimum).
fn optimal_bias(scores: &[f64], labels: &[i8]) -> f64 {
    let mut breakpoints: Vec<(f64, i8)> = scores
        .iter()
        .zip(labels)
        .map(|(s, &y)| (f64::from(y) - s, y))
        .collect();
    breakpoints.sort_by(|a, b| a.0.total_cmp(&b.0));

    // A positive sample is violated for b below its breakpoint, a negative
    // one for b above it, so at b = breakpoints[k].0 the sum is
    //   Σ_{j>k, y=+1} (b_j − b)  +  Σ_{j<k, y=−1} (b − b_j).
    // Samples tied with b contribute zero on either side. Running prefix
    // and suffix totals evaluate every candidate in one pass; ties keep
    // the first (smallest) minimizer.
    let mut pos_count_above = 0usize;
    let mut pos_sum_above = 0.0;
    for &(b, y) in &breakpoints {
        if y == 1 {
            pos_count_above += 1;
            pos_sum_above += b;
        }
    }
    let mut neg_count_below = 0usize;
    let mut neg_sum_below = 0.0;
    let mut best_b = f64::NAN;
    let mut best_sum = f64::INFINITY;
    for &(b, y) in &breakpoints {
        if y == 1 {
            pos_count_above -= 1;
            pos_sum_above -= b;
        }
        let sum = (pos_sum_above - pos_count_above as f64 * b)
            + (neg_count_below as f64 * b - neg_sum_below);
        if sum < best_sum {
            best_sum = sum;
            best_b = b;
        }
        if y == -1 {
            neg_count_below += 1;
            neg_sum_below += b;
        }
    }
    best_b
}

/// Like [`train_hinge`], also returning the best objective value after each
/// epoch (a non-increasing sequence by construction).
pub fn train_hinge_with_trace(
    data: &TrainingSet,
    config: TrainConfig,
) -> Result<(LinearModel, Vec<f64>)> {
    config.validate()?;
    data.check_trainable()?;

    let n = data.len();
    let dimension = data.vocabulary().len();
    let lambda = 1.0 / (config.c * n as f64);
    let mut weights = vec![0.0; dimension];
    let mut bias = 0.0;
    let mut order: Vec<usize> = (0..n).collect();
    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);

    let snapshot = |w: &[f64], b: f64| {
        LinearModel::new(w.to_vec(), b, data.vocabulary().words().to_vec(), config)
    };

    let mut best: Option<(f64, Vec<f64>, f64)> = None;
    let mut trace = Vec::with_capacity(config.epochs);
    let mut t = 0u64;
    for _ in 0..config.epochs {
        order.shuffle(&mut rng);
        for &i in &order {
            t += 1;
            let x = &data.vectors()[i];
            let y = f64::from(data.labels()[i]);
            let eta = 1.0 / (lambda * t as f64);
            let margin = y * (x.dot_dense(&weights) + bias);
            // Subgradient step on 0.5·||w||²·(1/(C·n)) + hinge_i, scaled so
            // the epoch sum follows the full objective.
            let shrink = 1.0 - 1.0 / t as f64;
            for w in &mut weights {
                *w *= shrink;
            }
            if margin < 1.0 {
                for (j, v) in x.iter() {
                    weights[j] += eta * y * v;
                }
                // The intercept is not regularized: no shrink, and its
                // subgradient step is capped at the ±1 label scale — the
                // uncapped early steps of size C·n fling it far outside
                // the data range.
                bias += eta.min(1.0) * y;
            }
        }
        // The end-of-epoch candidate pairs the current weights with their
        // exact minimizing intercept rather than the in-flight one; the
        // refit does not feed back into the descent state.
        let scores: Vec<f64> = data
            .vectors()
            .iter()
            .map(|x| x.dot_dense(&weights))
            .collect();
        let candidate_bias = optimal_bias(&scores, data.labels());
        let candidate = snapshot(&weights, candidate_bias)?;
        let objective = hinge_objective(&candidate, data)?;
        let improved = match &best {
            Some((best_obj, _, _)) => objective < *best_obj,
            None => true,
        };
        if improved {
            best = Some((objective, weights.clone(), candidate_bias));
        }
        let (best_obj, _, _) = best.as_ref().expect("best set after first epoch");
        let previous = trace.last().copied();
        trace.push(*best_obj);
        if let Some(prev) = previous {
            if prev - best_obj < config.tolerance && config.tolerance > 0.0 {
                break;
            }
        }
    }

    let (_, best_weights, best_bias) = best.expect("at least one epoch ran");
    Ok((snapshot(&best_weights, best_bias)?, trace))
}

/// Trains the mistake-driven perceptron from a zero model: on each
/// misclassified sample, `w ← w + learning_rate·y·x` and
/// `b ← b + learning_rate·y`. Stops after a mistake-free epoch or when
/// epochs are exhausted.
pub fn train_perceptron(data: &TrainingSet, config: TrainConfig) -> Result<LinearModel> {
    config.validate()?;
    data.check_trainable()?;
    let zero = LinearModel::new(
        vec![0.0; data.vocabulary().len()],
        0.0,
        data.vocabulary().words().to_vec(),
        config,
    )?;
    train_perceptron_from(&zero, data, config)
}

/// Perceptron training warm-started from an existing model; an initial
/// model that already separates the data is returned unchanged.
pub fn train_perceptron_from(
    initial: &LinearModel,
    data: &TrainingSet,
    config: TrainConfig,
) -> Result<LinearModel> {
    config.validate()?;
    data.check_trainable()?;
    if initial.dimension() != data.vocabulary().len() {
        return Err(Error::DimensionMismatch {
            expected: data.vocabulary().len(),
            found: initial.dimension(),
        });
    }

    let mut weights = initial.weights().to_vec();
    let mut bias = initial.bias();
    let mut order: Vec<usize> = (0..data.len()).collect();
    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);

    for _ in 0..config.epochs {
        order.shuffle(&mut rng);
        let mut mistakes = 0usize;
        for &i in &order {
            let x = &data.vectors()[i];
            let y = data.labels()[i];
            let predicted: i8 = if x.dot_dense(&weights) + bias >= 0.0 {
                1
            } else {
                -1
            };
            if predicted != y {
                mistakes += 1;
                let step = config.learning_rate * f64::from(y);
                for (j, v) in x.iter() {
                    weights[j] += step * v;
                }
                bias += step;
            }
        }
        if mistakes == 0 {
            break;
        }
    }
    LinearModel::new(weights, bias, data.vocabulary().words().to_vec(), config)
}

/// Dual-form score `Σ αᵢ·yᵢ·(xᵢ·x) + b`; a verification utility, not a
/// training path.
pub fn dual_decision(
    alphas: &[f64],
    labels: &[i8],
    support_vectors: &[FeatureVector],
    b: f64,
    x: &FeatureVector,
) -> Result<f64> {
    if alphas.len() != labels.len() {
        return Err(Error::LengthMismatch {
            left: alphas.len(),
            right: labels.len(),
        });
    }
    if alphas.len() != support_vectors.len() {
        return Err(Error::LengthMismatch {
            left: alphas.len(),
            right: support_vectors.len(),
        });
    }
    let mut score = b;
    for ((&alpha, &y), sv) in alphas.iter().zip(labels).zip(support_vectors) {
        score += alpha * f64::from(y) * sv.dot(x);
    }
    Ok(score)
}

const MODEL_MAGIC: &str = "ENTROKEY-MODEL v1";

/// Writes the versioned text model format: magic line, hyperparameters,
/// bias, then one `word<TAB>weight` line per feature with 17 significant
/// digits.
pub fn save_model(model: &LinearModel, path: impl AsRef<Path>) -> Result<()> {
    let path = path.as_ref();
    let file = File::create(path).map_err(|e| Error::io(path, e))?;
    let mut writer = BufWriter::new(file);
    let config = model.config();
    writeln!(writer, "{MODEL_MAGIC}").map_err(|e| Error::io(path, e))?;
    writeln!(
        writer,
        "trainer={} c={} epochs={} seed={}",
        config.trainer, config.c, config.epochs, config.seed
    )
    .map_err(|e| Error::io(path, e))?;
    writeln!(writer, "{}", model.bias()).map_err(|e| Error::io(path, e))?;
    for (word, weight) in model.vocabulary().iter().zip(model.weights()) {
        writeln!(writer, "{word}\t{weight:.16e}").map_err(|e| Error::io(path, e))?;
    }
    writer.flush().map_err(|e| Error::io(path, e))
}

/// Reads a model written by [`save_model`]. Decision scores round-trip
/// exactly.
pub fn load_model(path: impl AsRef<Path>) -> Result<LinearModel> {
    let path = path.as_ref();
    let file = File::open(path).map_err(|e| Error::io(path, e))?;
    let mut lines = BufReader::new(file).lines();
    let mut next_line = || -> Result<Option<String>> {
        match lines.next() {
            Some(line) => line.map(Some).map_err(|e| Error::io(path, e)),
            None => Ok(None),
        }
    };

    let magic = next_line()?.unwrap_or_default();
    if magic.trim_end() != MODEL_MAGIC {
        return Err(Error::ModelFormat {
            message: format!("unrecognized model file (expected {MODEL_MAGIC:?} header)"),
        });
    }

    let header = next_line()?.ok_or_else(|| Error::ModelFormat {
        message: "missing hyperparameter line".to_string(),
    })?;
    let mut config = TrainConfig::default();
    for pair in header.split_whitespace() {
        let (key, value) = pair.split_once('=').ok_or_else(|| Error::ModelFormat {
            message: format!("bad hyperparameter pair {pair:?}"),
        })?;
        let bad = |e: String| Error::ModelFormat {
            message: format!("bad {key} value {value:?}: {e}"),
        };
        match key {
            "trainer" => config.trainer = value.parse().map_err(|e: Error| bad(e.to_string()))?,
            "c" => {
                config.c = value
                    .parse()
                    .map_err(|e: std::num::ParseFloatError| bad(e.to_string()))?
            }
            "epochs" => {
                config.epochs = value
                    .parse()
                    .map_err(|e: std::num::ParseIntError| bad(e.to_string()))?
            }
            "seed" => {
                config.seed = value
                    .parse()
                    .map_err(|e: std::num::ParseIntError| bad(e.to_string()))?
            }
            other => {
                return Err(Error::ModelFormat {
                    message: format!("unknown hyperparameter {other:?}"),
                })
            }
        }
    }

    let bias_line = next_line()?.ok_or_else(|| Error::ModelFormat {
        message: "missing bias line".to_string(),
    })?;
    let bias: f64 = bias_line.trim().parse().map_err(|e| Error::ModelFormat {
        message: format!("bad bias {bias_line:?}: {e}"),
    })?;

    let mut vocabulary = Vec::new();
    let mut weights = Vec::new();
    while let Some(line) = next_line()? {
        if line.is_empty() {
            continue;
        }
        let (word, weight) = line.split_once('\t').ok_or_else(|| Error::ModelIntegrity {
            message: format!("feature line without weight: {line:?}"),
        })?;
        let weight: f64 = weight.parse().map_err(|e| Error::ModelIntegrity {
            message: format!("bad weight for {word:?}: {e}"),
        })?;
        vocabulary.push(word.to_string());
        weights.push(weight);
    }
    let mut seen = std::collections::HashSet::new();
    for word in &vocabulary {
        if !seen.insert(word.as_str()) {
            return Err(Error::ModelIntegrity {
                message: format!("duplicate feature word {word:?}"),
            });
        }
    }
    LinearModel::new(weights, bias, vocabulary, config)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::entropy::{ExtractionConfig, Polarity};
    use proptest::prelude::*;
    use tempfile::tempdir;

    fn vocab(words: &[&str]) -> KeywordList {
        KeywordList::from_parts(
            Polarity::Combined,
            words.iter().map(|w| w.to_string()).collect(),
            words.len(),
            ExtractionConfig::default(),
        )
        .unwrap()
    }

    fn fv(pairs: &[(usize, f64)], dimension: usize) -> FeatureVector {
        let indices = pairs.iter().map(|(j, _)| *j).collect();
        let values = pairs.iter().map(|(_, v)| *v).collect();
        FeatureVector::new(indices, values, dimension).unwrap()
    }

    fn tokenized_doc(tokens: &[&str]) -> Document {
        let mut doc = Document::new("d", "文", Label::Unlabeled);
        doc.tokens = Some(tokens.iter().map(|t| t.to_string()).collect());
        doc
    }

    /// Two separable point sets in 2D count space: +1 where the first count
    /// dominates, −1 where the second does.
    fn separable_set() -> TrainingSet {
        let dim = 2;
        TrainingSet::new(
            vec![
                fv(&[(0, 3.0), (1, 1.0)], dim),
                fv(&[(0, 4.0), (1, 2.0)], dim),
                fv(&[(0, 1.0), (1, 3.0)], dim),
                fv(&[(0, 2.0), (1, 4.0)], dim),
            ],
            vec![1, 1, -1, -1],
            vocab(&["好", "差"]),
        )
        .unwrap()
    }

    #[test]
    fn vectorize_counts_vocabulary_words() {
        let x = vectorize(&tokenized_doc(&["好", "好", "差"]), &vocab(&["好", "差"])).unwrap();
        assert_eq!(x, fv(&[(0, 2.0), (1, 1.0)], 2));
    }

    #[test]
    fn vectorize_ignores_out_of_vocabulary_tokens() {
        let x = vectorize(&tokenized_doc(&["服务", "一般"]), &vocab(&["好", "差"])).unwrap();
        assert_eq!(x.nnz(), 0);
        assert_eq!(x.dimension(), 2);
    }

    #[test]
    fn vectorize_allows_empty_vocabulary() {
        let x = vectorize(&tokenized_doc(&["好"]), &vocab(&[])).unwrap();
        assert_eq!(x.dimension(), 0);
    }

    #[test]
    fn feature_vector_validates_shape() {
        assert!(matches!(
            FeatureVector::new(vec![1, 0], vec![1.0, 1.0], 2),
            Err(Error::InvalidConfig { .. })
        ));
        assert!(matches!(
            FeatureVector::new(vec![2], vec![1.0], 2),
            Err(Error::DimensionMismatch { .. })
        ));
        assert!(matches!(
            FeatureVector::new(vec![0], vec![0.5], 2),
            Err(Error::InvalidConfig { .. })
        ));
    }

    #[test]
    fn decision_examples() {
        let zero = LinearModel::new(
            vec![0.0, 0.0],
            0.0,
            vec!["a".into(), "b".into()],
            TrainConfig::default(),
        )
        .unwrap();
        assert_eq!(zero.decision(&fv(&[(0, 7.0)], 2)).unwrap(), 0.0);

        let model = LinearModel::new(
            vec![1.0, -2.0],
            0.5,
            vec!["a".into(), "b".into()],
            TrainConfig::default(),
        )
        .unwrap();
        let x = fv(&[(0, 3.0), (1, 1.0)], 2);
        assert_eq!(model.decision(&x).unwrap(), 1.5);
    }

    #[test]
    fn classify_maps_boundary_to_positive() {
        let zero =
            LinearModel::new(vec![0.0], 0.0, vec!["a".into()], TrainConfig::default()).unwrap();
        assert_eq!(zero.classify(&fv(&[(0, 1.0)], 1)).unwrap(), 1);

        let model =
            LinearModel::new(vec![0.0], -0.1, vec!["a".into()], TrainConfig::default()).unwrap();
        assert_eq!(model.classify(&fv(&[(0, 1.0)], 1)).unwrap(), -1);

        let model =
            LinearModel::new(vec![5.0], 0.0, vec!["a".into()], TrainConfig::default()).unwrap();
        assert_eq!(model.classify(&fv(&[(0, 1.0)], 1)).unwrap(), 1);
    }

    #[test]
    fn dimension_mismatch_rejected() {
        let model =
            LinearModel::new(vec![1.0], 0.0, vec!["a".into()], TrainConfig::default()).unwrap();
        assert!(matches!(
            model.decision(&fv(&[(0, 1.0)], 2)),
            Err(Error::DimensionMismatch { .. })
        ));
    }

    #[test]
    fn perceptron_converges_on_opposed_points() {
        let data = TrainingSet::new(
            vec![fv(&[(0, 1.0)], 1), fv(&[], 1)],
            vec![1, -1],
            vocab(&["好"]),
        )
        .unwrap();
        // A 1D set: x=1 labeled +1, x=0 labeled −1 (bias must go negative).
        let config = TrainConfig {
            trainer: TrainerKind::Perceptron,
            ..TrainConfig::default()
        };
        let model = train_perceptron(&data, config).unwrap();
        assert_eq!(model.classify(&data.vectors()[0]).unwrap(), 1);
        assert_eq!(model.classify(&data.vectors()[1]).unwrap(), -1);
    }

    #[test]
    fn perceptron_leaves_separating_model_unchanged() {
        let data = separable_set();
        let separating = LinearModel::new(
            vec![1.0, -1.0],
            0.0,
            vec!["好".into(), "差".into()],
            TrainConfig::default(),
        )
        .unwrap();
        let trained = train_perceptron_from(&separating, &data, TrainConfig::default()).unwrap();
        assert_eq!(trained.weights(), separating.weights());
        assert_eq!(trained.bias(), separating.bias());
    }

    #[test]
    fn perceptron_terminates_on_conflicting_labels() {
        let data = TrainingSet::new(
            vec![fv(&[(0, 1.0)], 1), fv(&[(0, 1.0)], 1)],
            vec![1, -1],
            vocab(&["好"]),
        )
        .unwrap();
        let config = TrainConfig {
            epochs: 7,
            ..TrainConfig::default()
        };
        let model = train_perceptron(&data, config).unwrap();
        assert!(model.weights().iter().all(|w| w.is_finite()));
    }

    #[test]
    fn hinge_reaches_full_accuracy_on_separable_set() {
        let data = separable_set();
        let model = train_hinge(&data, TrainConfig::default()).unwrap();
        for (x, &y) in data.vectors().iter().zip(data.labels()) {
            assert_eq!(model.classify(x).unwrap(), y);
        }
    }

    #[test]
    fn hinge_term_vanishes_for_large_c() {
        let data = separable_set();
        let config = TrainConfig {
            c: 1000.0,
            epochs: 200,
            tolerance: 0.0,
            ..TrainConfig::default()
        };
        let model = train_hinge(&data, config).unwrap();
        let mut hinge_sum = 0.0;
        for (x, &y) in data.vectors().iter().zip(data.labels()) {
            let margin = f64::from(y) * model.decision(x).unwrap();
            hinge_sum += (1.0 - margin).max(0.0);
        }
        assert!(hinge_sum < 1e-3, "hinge term {hinge_sum}");
    }

    #[test]
    fn duplicated_data_keeps_sign_pattern() {
        let data = separable_set();
        let mut doubled_vectors = data.vectors().to_vec();
        doubled_vectors.extend_from_slice(data.vectors());
        let mut doubled_labels = data.labels().to_vec();
        doubled_labels.extend_from_slice(data.labels());
        let doubled =
            TrainingSet::new(doubled_vectors, doubled_labels, data.vocabulary().clone()).unwrap();

        let base = train_hinge(&data, TrainConfig::default()).unwrap();
        let again = train_hinge(&doubled, TrainConfig::default()).unwrap();
        // Probe away from the diagonal, where both optima are decisive.
        for a in 1..=5 {
            for b in (1..=5).filter(|&b| b != a) {
                let probe = fv(&[(0, a as f64), (1, b as f64)], 2);
                assert_eq!(
                    base.classify(&probe).unwrap(),
                    again.classify(&probe).unwrap(),
                    "probe ({a}, {b})"
                );
            }
        }
    }

    #[test]
    fn hinge_trace_is_non_increasing() {
        let data = separable_set();
        let config = TrainConfig {
            tolerance: 0.0,
            ..TrainConfig::default()
        };
        let (_, trace) = train_hinge_with_trace(&data, config).unwrap();
        assert_eq!(trace.len(), config.epochs);
        for pair in trace.windows(2) {
            assert!(pair[1] <= pair[0] + 1e-9 * (1.0 + pair[0].abs()));
        }
    }

    #[test]
    fn trainers_reject_degenerate_sets() {
        let empty = TrainingSet::new(vec![], vec![], vocab(&["好"])).unwrap();
        assert!(matches!(
            train_hinge(&empty, TrainConfig::default()),
            Err(Error::EmptyTrainingSet)
        ));

        let single_class =
            TrainingSet::new(vec![fv(&[(0, 1.0)], 1)], vec![1], vocab(&["好"])).unwrap();
        assert!(matches!(
            train_perceptron(&single_class, TrainConfig::default()),
            Err(Error::SingleClassTrainingSet)
        ));

        let no_vocab = TrainingSet::new(
            vec![FeatureVector::zero(0), FeatureVector::zero(0)],
            vec![1, -1],
            vocab(&[]),
        )
        .unwrap();
        assert!(matches!(
            train_hinge(&no_vocab, TrainConfig::default()),
            Err(Error::EmptyVocabulary)
        ));
    }

    #[test]
    fn dual_decision_examples() {
        let x = fv(&[(0, 2.0)], 1);
        assert_eq!(dual_decision(&[], &[], &[], 0.0, &x).unwrap(), 0.0);
        assert_eq!(
            dual_decision(&[1.0], &[1], std::slice::from_ref(&x), 0.0, &x).unwrap(),
            4.0
        );
        assert!(matches!(
            dual_decision(&[1.0], &[1, -1], std::slice::from_ref(&x), 0.0, &x),
            Err(Error::LengthMismatch { .. })
        ));
    }

    #[test]
    fn primal_model_matches_dual_expansion() {
        let data = separable_set();
        let model = train_hinge(&data, TrainConfig::default()).unwrap();
        // Expand w over unit vectors: each coordinate j contributes a
        // support vector e_j with α = |w_j| and label sign(w_j).
        let mut alphas = Vec::new();
        let mut labels = Vec::new();
        let mut supports = Vec::new();
        for (j, &w) in model.weights().iter().enumerate() {
            if w != 0.0 {
                alphas.push(w.abs());
                labels.push(if w >= 0.0 { 1 } else { -1 });
                supports.push(fv(&[(j, 1.0)], model.dimension()));
            }
        }
        for a in 1..=4 {
            for b in 1..=4 {
                let probe = fv(&[(0, a as f64), (1, b as f64)], 2);
                let primal = model.decision(&probe).unwrap();
                let dual =
                    dual_decision(&alphas, &labels, &supports, model.bias(), &probe).unwrap();
                assert!((primal - dual).abs() <= 1e-9, "{primal} vs {dual}");
            }
        }
    }

    #[test]
    fn model_file_round_trips() {
        let dir = tempdir().unwrap();
        let path = dir.path().join("model.txt");
        let data = separable_set();
        let model = train_hinge(&data, TrainConfig::default()).unwrap();
        save_model(&model, &path).unwrap();
        let reloaded = load_model(&path).unwrap();
        assert_eq!(reloaded.vocabulary(), model.vocabulary());
        assert_eq!(reloaded.config().c, model.config().c);

        use rand::Rng;
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for _ in 0..100 {
            let probe = fv(
                &[
                    (0, rng.random_range(1..20) as f64),
                    (1, rng.random_range(1..20) as f64),
                ],
                2,
            );
            assert_eq!(
                model.decision(&probe).unwrap(),
                reloaded.decision(&probe).unwrap()
            );
        }
    }

    #[test]
    fn model_file_rejects_corruption() {
        let dir = tempdir().unwrap();
        let path = dir.path().join("model.txt");
        std::fs::write(&path, "NOT-A-MODEL\n").unwrap();
        assert!(matches!(load_model(&path), Err(Error::ModelFormat { .. })));

        std::fs::write(
            &path,
            "ENTROKEY-MODEL v1\ntrainer=hinge_sgd c=3 epochs=50 seed=0\n0\n好 without-tab\n",
        )
        .unwrap();
        assert!(matches!(
            load_model(&path),
            Err(Error::ModelIntegrity { .. })
        ));

        std::fs::write(
            &path,
            "ENTROKEY-MODEL v1\ntrainer=hinge_sgd c=3 epochs=50 seed=0\n0\n好\t1.0\n好\t2.0\n",
        )
        .unwrap();
        assert!(matches!(
            load_model(&path),
            Err(Error::ModelIntegrity { .. })
        ));
    }

    #[test]
    fn training_is_deterministic() {
        let data = separable_set();
        let config = TrainConfig {
            seed: 99,
            ..TrainConfig::default()
        };
        let a = train_hinge(&data, config).unwrap();
        let b = train_hinge(&data, config).unwrap();
        assert_eq!(a.weights(), b.weights());
        assert_eq!(a.bias(), b.bias());

        let dir = tempdir().unwrap();
        let first = dir.path().join("a.txt");
        let second = dir.path().join("b.txt");
        save_model(&a, &first).unwrap();
        save_model(&b, &second).unwrap();
        assert_eq!(
            std::fs::read(&first).unwrap(),
            std::fs::read(&second).unwrap()
        );
    }

    #[test]
    fn predictions_invariant_under_vocabulary_permutation() {
        let words = ["好", "差", "服务", "脏"];
        let docs: Vec<Vec<&str>> = vec![
            vec!["好", "好", "服务"],
            vec!["差", "脏", "脏"],
            vec!["好", "服务", "服务"],
            vec!["差", "差"],
        ];
        let labels = vec![1, -1, 1, -1];
        let build = |order: &[&str]| {
            let v = vocab(order);
            let vectorizer = Vectorizer::new(&v);
            let vectors: Vec<FeatureVector> = docs
                .iter()
                .map(|tokens| vectorizer.vectorize(&tokenized_doc(tokens)).unwrap())
                .collect();
            let set = TrainingSet::new(vectors.clone(), labels.clone(), v).unwrap();
            let config = TrainConfig {
                trainer: TrainerKind::Perceptron,
                ..TrainConfig::default()
            };
            let model = train_perceptron(&set, config).unwrap();
            vectors
                .iter()
                .map(|x| model.classify(x).unwrap())
                .collect::<Vec<i8>>()
        };
        let forward = build(&words);
        let permuted = build(&["脏", "服务", "好", "差"]);
        assert_eq!(forward, permuted);
    }

    proptest! {
        #[test]
        fn classify_agrees_with_decision_sign(
            weights in proptest::collection::vec(-5.0f64..5.0, 3),
            bias in -5.0f64..5.0,
            counts in proptest::collection::vec(1.0f64..6.0, 3),
        ) {
            let model = LinearModel::new(
                weights,
                bias,
                vec!["a".into(), "b".into(), "c".into()],
                TrainConfig::default(),
            )
            .unwrap();
            let x = fv(&[(0, counts[0].floor()), (1, counts[1].floor()), (2, counts[2].floor())], 3);
            let decision = model.decision(&x).unwrap();
            let label = model.classify(&x).unwrap();
            prop_assert_eq!(label, if decision >= 0.0 { 1 } else { -1 });
        }

        #[test]
        fn sparse_dot_matches_dense(
            a in proptest::collection::vec(proptest::option::of(1.0f64..5.0), 6),
            b in proptest::collection::vec(proptest::option::of(1.0f64..5.0), 6),
        ) {
            let to_fv = |entries: &[Option<f64>]| {
                let pairs: Vec<(usize, f64)> = entries
                    .iter()
                    .enumerate()
                    .filter_map(|(j, v)| v.map(|v| (j, v.floor())))
                    .collect();
                fv(&pairs, entries.len())
            };
            let xa = to_fv(&a);
            let xb = to_fv(&b);
            let dense: f64 = (0..6)
                .map(|j| {
                    let va = a[j].map(|v| v.floor()).unwrap_or(0.0);
                    let vb = b[j].map(|v| v.floor()).unwrap_or(0.0);
                    va * vb
                })
                .sum();
            prop_assert_eq!(xa.dot(&xb), dense);
        }
    }
}
