//! End-to-end run orchestration: configuration, staged execution with a
//! hashed artifact manifest, and human-readable keyword reports.
//!
//! A run executes `ingest → segment → keywords → grid → report → train →
//! predict`, writing every artifact under one output directory. The
//! manifest records a SHA-256 digest per artifact and carries no
//! timestamps, so identical configurations produce byte-identical output
//! trees. A stage error aborts the run, leaves the artifacts written so
//! far in place, and marks the manifest `failed` with the stage name.

use std::fs::{self, File, OpenOptions};
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::corpus::{filter_noise, load_corpus, save_corpus, Corpus, CorpusFormat, Label};
use crate::entropy::{
    alpha_grid, build_count_table, compute_stats, select_keywords, write_keyword_list,
    ExtractionConfig, KeywordList, KeywordStats, Polarity, DEFAULT_ALPHA_MAX, DEFAULT_ALPHA_MIN,
    DEFAULT_ALPHA_STEP,
};
use crate::error::{Error, Result};
use crate::eval::{
    label_corpus, run_grid, write_reports_text, write_reports_tsv, ConsensusSummary, GridOutcome,
    Prediction, DEFAULT_K,
};
use crate::segment::{SegmentMode, Segmenter, SegmenterConfig};
use crate::svm::{
    save_model, train_hinge, train_perceptron, LinearModel, TrainConfig, TrainerKind, TrainingSet,
};

pub const DEFAULT_TOP_N: usize = 20;
pub const DEFAULT_OUT_DIR: &str = "out";

/// Which keyword list backs the positive detector.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PositiveDetector {
    /// Union of the grid-best positive and negative lists.
    Combined,
    /// The grid-best positive list alone.
    BestPositive,
}

impl FromStr for PositiveDetector {
    type Err = Error;

    fn from_str(s: &str) -> Result<PositiveDetector> {
        match s {
            "combined" => Ok(PositiveDetector::Combined),
            "best_positive" => Ok(PositiveDetector::BestPositive),
            other => Err(Error::InvalidConfig {
                message: format!(
                    "unknown positive detector {other:?} (expected combined or best_positive)"
                ),
            }),
        }
    }
}

/// Everything a pipeline run needs. Build one from TOML with
/// [`RunConfig::from_toml_file`] or start from `RunConfig::default()` and
/// fill in the input path.
#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    /// Corpus to ingest. Required by [`run_pipeline`].
    pub input: Option<PathBuf>,
    pub format: CorpusFormat,
    /// Split documents into sentences during ingestion.
    pub split_sentences: bool,
    pub segmenter: SegmenterConfig,
    pub alpha_min: f64,
    pub alpha_max: f64,
    pub alpha_step: f64,
    /// Keywords per polarity in the ranked report.
    pub top_n: usize,
    pub train: TrainConfig,
    /// Cross-validation folds.
    pub k: usize,
    /// α′ selecting the negative detector's list; defaults to `alpha_max`.
    pub negative_alpha: Option<f64>,
    pub positive_detector: PositiveDetector,
    pub out_dir: PathBuf,
    /// Global seed; per-stage seeds are derived from it with
    /// [`derive_seed`].
    pub seed: u64,
}

impl Default for RunConfig {
    fn default() -> RunConfig {
        RunConfig {
            input: None,
            format: CorpusFormat::Jsonl,
            split_sentences: true,
            segmenter: SegmenterConfig::default(),
            alpha_min: DEFAULT_ALPHA_MIN,
            alpha_max: DEFAULT_ALPHA_MAX,
            alpha_step: DEFAULT_ALPHA_STEP,
            top_n: DEFAULT_TOP_N,
            train: TrainConfig::default(),
            k: DEFAULT_K,
            negative_alpha: None,
            positive_detector: PositiveDetector::Combined,
            out_dir: PathBuf::from(DEFAULT_OUT_DIR),
            seed: 0,
        }
    }
}

#[derive(Deserialize, Default)]
#[serde(deny_unknown_fields)]
struct RawConfig {
    seed: Option<u64>,
    input: Option<RawInput>,
    segment: Option<RawSegment>,
    keywords: Option<RawKeywords>,
    train: Option<RawTrain>,
    eval: Option<RawEval>,
    predict: Option<RawPredict>,
    output: Option<RawOutput>,
}

#[derive(Deserialize, Default)]
#[serde(deny_unknown_fields)]
struct RawInput {
    corpus: Option<PathBuf>,
    format: Option<String>,
    split_sentences: Option<bool>,
}

#[derive(Deserialize, Default)]
#[serde(deny_unknown_fields)]
struct RawSegment {
    mode: Option<String>,
    dictionary: Option<PathBuf>,
    max_word_len: Option<usize>,
}

#[derive(Deserialize, Default)]
#[serde(deny_unknown_fields)]
struct RawKeywords {
    alpha_min: Option<f64>,
    alpha_max: Option<f64>,
    alpha_step: Option<f64>,
    top_n: Option<usize>,
}

#[derive(Deserialize, Default)]
#[serde(deny_unknown_fields)]
struct RawTrain {
    trainer: Option<String>,
    c: Option<f64>,
    epochs: Option<usize>,
    learning_rate: Option<f64>,
    tolerance: Option<f64>,
}

#[derive(Deserialize, Default)]
#[serde(deny_unknown_fields)]
struct RawEval {
    k: Option<usize>,
}

#[derive(Deserialize, Default)]
#[serde(deny_unknown_fields)]
struct RawPredict {
    negative_alpha: Option<f64>,
    positive_detector: Option<String>,
}

#[derive(Deserialize, Default)]
#[serde(deny_unknown_fields)]
struct RawOutput {
    dir: Option<PathBuf>,
}

impl RunConfig {
    /// Parses a TOML config. Omitted keys keep their defaults; unknown keys
    /// are rejected.
    pub fn from_toml_str(text: &str) -> Result<RunConfig> {
        let raw: RawConfig = toml::from_str(text).map_err(|e| Error::InvalidConfig {
            message: format!("config parse error: {e}"),
        })?;
        let mut config = RunConfig::default();
        if let Some(seed) = raw.seed {
            config.seed = seed;
        }
        if let Some(input) = raw.input {
            config.input = input.corpus;
            if let Some(format) = input.format {
                config.format = format.parse()?;
            }
            if let Some(split) = input.split_sentences {
                config.split_sentences = split;
            }
        }
        if let Some(segment) = raw.segment {
            if let Some(mode) = segment.mode {
                config.segmenter.mode = mode.parse()?;
            }
            config.segmenter.dictionary_path = segment.dictionary;
            if let Some(len) = segment.max_word_len {
                config.segmenter.max_word_len = len;
            }
        }
        if let Some(keywords) = raw.keywords {
            if let Some(v) = keywords.alpha_min {
                config.alpha_min = v;
            }
            if let Some(v) = keywords.alpha_max {
                config.alpha_max = v;
            }
            if let Some(v) = keywords.alpha_step {
                config.alpha_step = v;
            }
            if let Some(v) = keywords.top_n {
                config.top_n = v;
            }
        }
        if let Some(train) = raw.train {
            if let Some(trainer) = train.trainer {
                config.train.trainer = trainer.parse()?;
            }
            if let Some(v) = train.c {
                config.train.c = v;
            }
            if let Some(v) = train.epochs {
                config.train.epochs = v;
            }
            if let Some(v) = train.learning_rate {
                config.train.learning_rate = v;
            }
            if let Some(v) = train.tolerance {
                config.train.tolerance = v;
            }
        }
        if let Some(eval) = raw.eval {
            if let Some(k) = eval.k {
                config.k = k;
            }
        }
        if let Some(predict) = raw.predict {
            config.negative_alpha = predict.negative_alpha;
            if let Some(detector) = predict.positive_detector {
                config.positive_detector = detector.parse()?;
            }
        }
        if let Some(output) = raw.output {
            if let Some(dir) = output.dir {
                config.out_dir = dir;
            }
        }
        config.validate()?;
        Ok(config)
    }

    pub fn from_toml_file(path: impl AsRef<Path>) -> Result<RunConfig> {
        let path = path.as_ref();
        let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        RunConfig::from_toml_str(&text)
    }

    /// Structural validation. Referenced files are only opened by the stage
    /// that consumes them, so a missing input surfaces as a stage failure,
    /// not a config error.
    pub fn validate(&self) -> Result<()> {
        alpha_grid(self.alpha_min, self.alpha_max, self.alpha_step)?;
        self.train.validate()?;
        if self.k < 2 {
            return Err(Error::InvalidConfig {
                message: format!("eval.k must be at least 2, got {}", self.k),
            });
        }
        if self.segmenter.max_word_len == 0 {
            return Err(Error::InvalidConfig {
                message: "segment.max_word_len must be at least 1".to_string(),
            });
        }
        if self.segmenter.mode == SegmentMode::MaxMatch && self.segmenter.dictionary_path.is_none()
        {
            return Err(Error::InvalidConfig {
                message: "max_match segmentation requires segment.dictionary".to_string(),
            });
        }
        if let Some(alpha) = self.negative_alpha {
            if !alpha.is_finite() || alpha <= 0.0 {
                return Err(Error::InvalidConfig {
                    message: format!(
                        "predict.negative_alpha must be finite and positive, got {alpha}"
                    ),
                });
            }
        }
        if self.out_dir.as_os_str().is_empty() {
            return Err(Error::InvalidConfig {
                message: "output.dir must not be empty".to_string(),
            });
        }
        Ok(())
    }
}

/// Derives a stage-specific seed from the global one, so stages draw from
/// independent streams and adding a stage never shifts another's seed.
pub fn derive_seed(global_seed: u64, stage: &str) -> u64 {
    let mut hasher = Sha256::new();
    hasher.update(global_seed.to_le_bytes());
    hasher.update(stage.as_bytes());
    let digest = hasher.finalize();
    u64::from_le_bytes(digest[..8].try_into().expect("digest is 32 bytes"))
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ArtifactRecord {
    /// Path relative to the output directory.
    pub path: String,
    pub sha256: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct StageRecord {
    pub name: String,
    pub status: String,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub error: Option<String>,
    pub artifacts: Vec<ArtifactRecord>,
}

/// Content-addressed record of one pipeline run. Serialized without
/// timestamps so reruns of the same configuration are byte-identical.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Manifest {
    pub seed: u64,
    pub status: String,
    pub stages: Vec<StageRecord>,
}

impl Manifest {
    pub fn stage(&self, name: &str) -> Option<&StageRecord> {
        self.stages.iter().find(|s| s.name == name)
    }

    pub fn artifacts(&self) -> impl Iterator<Item = &ArtifactRecord> {
        self.stages.iter().flat_map(|s| s.artifacts.iter())
    }

    pub fn artifact(&self, path: &str) -> Option<&ArtifactRecord> {
        self.artifacts().find(|a| a.path == path)
    }
}

pub fn sha256_file(path: impl AsRef<Path>) -> Result<String> {
    let path = path.as_ref();
    let bytes = fs::read(path).map_err(|e| Error::io(path, e))?;
    let digest = Sha256::digest(&bytes);
    Ok(digest.iter().map(|b| format!("{b:02x}")).collect())
}

/// Removes the output-directory lock when the run ends, even on early
/// return or panic.
struct LockGuard {
    path: PathBuf,
}

impl LockGuard {
    fn acquire(out_dir: &Path) -> Result<LockGuard> {
        let path = out_dir.join(".lock");
        match OpenOptions::new().write(true).create_new(true).open(&path) {
            Ok(_) => Ok(LockGuard { path }),
            Err(e) if e.kind() == std::io::ErrorKind::AlreadyExists => {
                Err(Error::OutputLocked { path })
            }
            Err(e) => Err(Error::io(path, e)),
        }
    }
}

impl Drop for LockGuard {
    fn drop(&mut self) {
        let _ = fs::remove_file(&self.path);
    }
}

fn write_manifest(manifest: &Manifest, out_dir: &Path) -> Result<()> {
    let path = out_dir.join("manifest.json");
    let json = serde_json::to_string_pretty(manifest).expect("manifest serializes");
    fs::write(&path, json + "\n").map_err(|e| Error::io(path, e))
}

/// A stage's product plus the artifact files it wrote.
type StageOutput<T> = Result<(T, Vec<PathBuf>)>;

/// Folds one stage's outcome into the manifest: hashes its artifacts on
/// success, or records the failure, persists the manifest, and re-raises
/// the error tagged with the stage name.
fn record_stage<T>(
    manifest: &mut Manifest,
    out_dir: &Path,
    name: &'static str,
    outcome: StageOutput<T>,
) -> Result<T> {
    let hashed = outcome.and_then(|(value, paths)| {
        let mut artifacts = Vec::with_capacity(paths.len());
        for path in paths {
            let relative = path
                .strip_prefix(out_dir)
                .unwrap_or(&path)
                .to_string_lossy()
                .into_owned();
            artifacts.push(ArtifactRecord {
                path: relative,
                sha256: sha256_file(&path)?,
            });
        }
        Ok((value, artifacts))
    });
    match hashed {
        Ok((value, artifacts)) => {
            manifest.stages.push(StageRecord {
                name: name.to_string(),
                status: "ok".to_string(),
                error: None,
                artifacts,
            });
            Ok(value)
        }
        Err(e) => {
            manifest.stages.push(StageRecord {
                name: name.to_string(),
                status: "failed".to_string(),
                error: Some(e.to_string()),
                artifacts: Vec::new(),
            });
            manifest.status = "failed".to_string();
            write_manifest(manifest, out_dir)?;
            Err(Error::Stage {
                stage: name,
                source: Box::new(e),
            })
        }
    }
}

/// Runs the full pipeline and returns the manifest (also written to
/// `out_dir/manifest.json`). On a stage failure the partial artifacts stay
/// on disk, the manifest records the failed stage, and the error comes
/// back tagged with the stage name.
pub fn run_pipeline(config: &RunConfig) -> Result<Manifest> {
    config.validate()?;
    let input = config.input.clone().ok_or_else(|| Error::InvalidConfig {
        message: "input.corpus is required".to_string(),
    })?;
    let out_dir = config.out_dir.clone();
    fs::create_dir_all(&out_dir).map_err(|e| Error::io(&out_dir, e))?;
    let _lock = LockGuard::acquire(&out_dir)?;

    let mut manifest = Manifest {
        seed: config.seed,
        status: "ok".to_string(),
        stages: Vec::new(),
    };

    let corpus = record_stage(
        &mut manifest,
        &out_dir,
        "ingest",
        stage_ingest(config, &input, &out_dir),
    )?;
    let segmented = record_stage(
        &mut manifest,
        &out_dir,
        "segment",
        stage_segment(config, &corpus, &out_dir),
    )?;
    let stats = record_stage(
        &mut manifest,
        &out_dir,
        "keywords",
        stage_keywords(&segmented, &out_dir),
    )?;
    let (grid, negative_list) = record_stage(
        &mut manifest,
        &out_dir,
        "grid",
        stage_grid(config, &segmented, &stats, &out_dir),
    )?;
    record_stage(
        &mut manifest,
        &out_dir,
        "report",
        stage_report(config, &stats, &grid, &negative_list, &out_dir),
    )?;
    let (pos_model, neg_model) = record_stage(
        &mut manifest,
        &out_dir,
        "train",
        stage_train(config, &segmented, &grid, &negative_list, &out_dir),
    )?;
    record_stage(
        &mut manifest,
        &out_dir,
        "predict",
        stage_predict(&segmented, &pos_model, &neg_model, &out_dir),
    )?;

    write_manifest(&manifest, &out_dir)?;
    Ok(manifest)
}

fn stage_ingest(config: &RunConfig, input: &Path, out_dir: &Path) -> StageOutput<Corpus> {
    let corpus = load_corpus(input, config.format)?;
    let corpus = if config.split_sentences {
        corpus.split_sentences()
    } else {
        corpus
    };
    if corpus.is_empty() {
        return Err(Error::EmptyInput { what: "corpus" });
    }
    let path = out_dir.join("corpus.jsonl");
    save_corpus(&corpus, &path)?;
    Ok((corpus, vec![path]))
}

fn stage_segment(config: &RunConfig, corpus: &Corpus, out_dir: &Path) -> StageOutput<Corpus> {
    let segmenter = Segmenter::new(&config.segmenter)?;
    let segmented = segmenter.segment_corpus(corpus);
    let cleaned = segmented.map_tokens(|doc| Ok(filter_noise(doc.tokens()?.to_vec())))?;
    let path = out_dir.join("segmented.jsonl");
    save_corpus(&cleaned, &path)?;
    Ok((cleaned, vec![path]))
}

fn stage_keywords(corpus: &Corpus, out_dir: &Path) -> StageOutput<Vec<KeywordStats>> {
    let table = build_count_table(corpus)?;
    let stats = compute_stats(&table);
    let path = out_dir.join("stats.tsv");
    write_stats(&stats, &path)?;
    Ok((stats, vec![path]))
}

/// Writes the per-word entropy/document-frequency table as TSV.
pub fn write_stats(stats: &[KeywordStats], path: impl AsRef<Path>) -> Result<()> {
    let path = path.as_ref();
    let file = File::create(path).map_err(|e| Error::io(path, e))?;
    let mut writer = BufWriter::new(file);
    let io_err = |e| Error::io(path, e);
    writeln!(writer, "word\th_pos\th_neg\tdf_pos\tdf_neg").map_err(io_err)?;
    for s in stats {
        writeln!(
            writer,
            "{}\t{:.6}\t{:.6}\t{}\t{}",
            s.word, s.h_pos, s.h_neg, s.df_pos, s.df_neg
        )
        .map_err(io_err)?;
    }
    writer.flush().map_err(io_err)
}

fn stage_grid(
    config: &RunConfig,
    corpus: &Corpus,
    stats: &[KeywordStats],
    out_dir: &Path,
) -> StageOutput<(GridOutcome, KeywordList)> {
    let mut train_config = config.train;
    train_config.seed = derive_seed(config.seed, "train");
    let fold_seed = derive_seed(config.seed, "folds");
    let grid = run_grid(
        corpus,
        stats,
        config.alpha_min,
        config.alpha_max,
        config.alpha_step,
        train_config,
        config.k,
        fold_seed,
    )?;
    let negative_alpha = config.negative_alpha.unwrap_or(config.alpha_max);
    let negative_list = select_keywords(
        stats,
        ExtractionConfig::new(negative_alpha, negative_alpha)?,
        Polarity::Negative,
    )?;

    let reports_tsv = out_dir.join("reports.tsv");
    let reports_txt = out_dir.join("reports.txt");
    write_reports_tsv(&grid.reports, &reports_tsv)?;
    write_reports_text(&grid.reports, &reports_txt)?;
    let pos_path = out_dir.join("keywords_positive.tsv");
    let neg_path = out_dir.join("keywords_negative.tsv");
    let combined_path = out_dir.join("keywords_combined.tsv");
    write_keyword_list(&grid.best_positive, stats, &pos_path)?;
    write_keyword_list(&negative_list, stats, &neg_path)?;
    write_keyword_list(&grid.combined, stats, &combined_path)?;

    Ok((
        (grid, negative_list),
        vec![reports_tsv, reports_txt, pos_path, neg_path, combined_path],
    ))
}

fn stage_report(
    config: &RunConfig,
    stats: &[KeywordStats],
    grid: &GridOutcome,
    negative_list: &KeywordList,
    out_dir: &Path,
) -> StageOutput<()> {
    let tsv = out_dir.join("keywords_report.tsv");
    let txt = out_dir.join("keywords_report.txt");
    report_keywords(
        stats,
        &[&grid.best_positive, negative_list],
        config.top_n,
        &tsv,
        &txt,
    )?;
    Ok(((), vec![tsv, txt]))
}

/// Trains a one-vs-rest detector for `target` on the labeled documents of
/// `corpus`, counting only `vocabulary` words, with the trainer named in
/// `config`.
pub fn train_detector(
    corpus: &Corpus,
    vocabulary: &KeywordList,
    target: Label,
    config: TrainConfig,
) -> Result<LinearModel> {
    let data = TrainingSet::from_corpus(corpus, vocabulary, target)?;
    match config.trainer {
        TrainerKind::HingeSgd => train_hinge(&data, config),
        TrainerKind::Perceptron => train_perceptron(&data, config),
    }
}

fn stage_train(
    config: &RunConfig,
    corpus: &Corpus,
    grid: &GridOutcome,
    negative_list: &KeywordList,
    out_dir: &Path,
) -> StageOutput<(LinearModel, LinearModel)> {
    let mut train_config = config.train;
    train_config.seed = derive_seed(config.seed, "train");
    let pos_vocabulary = match config.positive_detector {
        PositiveDetector::Combined => &grid.combined,
        PositiveDetector::BestPositive => &grid.best_positive,
    };
    let pos_model = train_detector(corpus, pos_vocabulary, Label::Positive, train_config)?;
    let neg_model = train_detector(corpus, negative_list, Label::Negative, train_config)?;
    let pos_path = out_dir.join("model_positive.txt");
    let neg_path = out_dir.join("model_negative.txt");
    save_model(&pos_model, &pos_path)?;
    save_model(&neg_model, &neg_path)?;
    Ok(((pos_model, neg_model), vec![pos_path, neg_path]))
}

#[derive(Serialize)]
struct LabeledRecord<'a> {
    id: &'a str,
    text: &'a str,
    label: String,
    pos_score: f64,
    neg_score: f64,
}

#[derive(Serialize)]
struct PredictSummary {
    #[serde(flatten)]
    consensus: ConsensusSummary,
    total: usize,
}

/// Writes consensus predictions for the unlabeled documents of `corpus`.
pub fn write_predictions(
    corpus: &Corpus,
    predictions: &[Prediction],
    path: impl AsRef<Path>,
) -> Result<()> {
    let path = path.as_ref();
    let by_id: std::collections::HashMap<&str, &crate::corpus::Document> = corpus
        .documents()
        .iter()
        .map(|d| (d.id.as_str(), d))
        .collect();
    let file = File::create(path).map_err(|e| Error::io(path, e))?;
    let mut writer = BufWriter::new(file);
    for p in predictions {
        let doc = by_id
            .get(p.id.as_str())
            .ok_or_else(|| Error::InvalidDocument {
                id: p.id.clone(),
                message: "prediction does not match any corpus document".to_string(),
            })?;
        let record = LabeledRecord {
            id: &p.id,
            text: &doc.text,
            label: p.label.to_string(),
            pos_score: p.pos_decision,
            neg_score: p.neg_decision,
        };
        let line = serde_json::to_string(&record).expect("record serializes");
        writeln!(writer, "{line}").map_err(|e| Error::io(path, e))?;
    }
    writer.flush().map_err(|e| Error::io(path, e))
}

/// Writes the consensus tally as pretty JSON with a `total` field.
pub fn write_prediction_summary(summary: &ConsensusSummary, path: impl AsRef<Path>) -> Result<()> {
    let path = path.as_ref();
    let body = PredictSummary {
        consensus: *summary,
        total: summary.total(),
    };
    let json = serde_json::to_string_pretty(&body).expect("summary serializes");
    fs::write(path, json + "\n").map_err(|e| Error::io(path, e))
}

fn stage_predict(
    corpus: &Corpus,
    pos_model: &LinearModel,
    neg_model: &LinearModel,
    out_dir: &Path,
) -> StageOutput<(Vec<Prediction>, ConsensusSummary)> {
    let (predictions, summary) = label_corpus(corpus, pos_model, neg_model)?;
    let labeled_path = out_dir.join("labeled.jsonl");
    write_predictions(corpus, &predictions, &labeled_path)?;
    let summary_path = out_dir.join("summary.json");
    write_prediction_summary(&summary, &summary_path)?;
    Ok(((predictions, summary), vec![labeled_path, summary_path]))
}

/// How strongly a word separates the classes: its entropy in the polarity's
/// own class over its entropy in the other, with 0/0 as 0 and x/0 as ∞.
fn polarity_ratio(stats: &KeywordStats, polarity: Polarity) -> f64 {
    let (own, other) = match polarity {
        Polarity::Positive => (stats.h_pos, stats.h_neg),
        Polarity::Negative => (stats.h_neg, stats.h_pos),
        Polarity::Combined => unreachable!("report rows carry a concrete polarity"),
    };
    if other == 0.0 {
        if own == 0.0 {
            0.0
        } else {
            f64::INFINITY
        }
    } else {
        own / other
    }
}

struct ReportRow<'a> {
    word: &'a str,
    polarity: Polarity,
    h_pos: f64,
    h_neg: f64,
    ratio: f64,
}

/// Writes the top-`n` keywords per polarity, ranked by how strongly each
/// word separates the classes, as a TSV plus an aligned-text table. Words
/// are drawn from `lists` (duplicates collapse); shorter lists are not
/// padded, and empty input yields header-only files.
pub fn report_keywords(
    stats: &[KeywordStats],
    lists: &[&KeywordList],
    top_n: usize,
    tsv_path: impl AsRef<Path>,
    text_path: impl AsRef<Path>,
) -> Result<()> {
    let by_word: std::collections::HashMap<&str, &KeywordStats> =
        stats.iter().map(|s| (s.word.as_str(), s)).collect();
    let mut seen = std::collections::HashSet::new();
    let mut positive = Vec::new();
    let mut negative = Vec::new();
    for list in lists {
        for (word, polarity) in list.iter_with_polarity() {
            if !seen.insert((word.to_string(), polarity)) {
                continue;
            }
            let s = by_word.get(word).ok_or_else(|| Error::UnknownWord {
                word: word.to_string(),
            })?;
            let row = ReportRow {
                word: &s.word,
                polarity,
                h_pos: s.h_pos,
                h_neg: s.h_neg,
                ratio: polarity_ratio(s, polarity),
            };
            match polarity {
                Polarity::Positive => positive.push(row),
                Polarity::Negative => negative.push(row),
                Polarity::Combined => unreachable!("list rows carry a concrete polarity"),
            }
        }
    }
    for rows in [&mut positive, &mut negative] {
        rows.sort_by(|a, b| {
            b.ratio
                .total_cmp(&a.ratio)
                .then(b.h_pos.max(b.h_neg).total_cmp(&a.h_pos.max(a.h_neg)))
                .then(a.word.cmp(b.word))
        });
        rows.truncate(top_n);
    }

    let format_ratio = |ratio: f64| {
        if ratio.is_infinite() {
            "inf".to_string()
        } else {
            format!("{ratio:.4}")
        }
    };

    let tsv_path = tsv_path.as_ref();
    let file = File::create(tsv_path).map_err(|e| Error::io(tsv_path, e))?;
    let mut tsv = BufWriter::new(file);
    writeln!(tsv, "polarity\trank\tword\th_pos\th_neg\tratio")
        .map_err(|e| Error::io(tsv_path, e))?;
    for rows in [&positive, &negative] {
        for (rank, row) in rows.iter().enumerate() {
            writeln!(
                tsv,
                "{}\t{}\t{}\t{:.6}\t{:.6}\t{}",
                row.polarity,
                rank + 1,
                row.word,
                row.h_pos,
                row.h_neg,
                format_ratio(row.ratio)
            )
            .map_err(|e| Error::io(tsv_path, e))?;
        }
    }
    tsv.flush().map_err(|e| Error::io(tsv_path, e))?;

    let text_path = text_path.as_ref();
    let file = File::create(text_path).map_err(|e| Error::io(text_path, e))?;
    let mut text = BufWriter::new(file);
    let io_err = |e| Error::io(text_path, e);
    let width = positive
        .iter()
        .chain(&negative)
        .map(|r| r.word.chars().count())
        .max()
        .unwrap_or(4)
        .max(4);
    for (title, rows) in [("positive", &positive), ("negative", &negative)] {
        writeln!(text, "top {title} keywords").map_err(io_err)?;
        writeln!(
            text,
            "{:>4}  {:<width$}  {:>9}  {:>9}  {:>9}",
            "rank", "word", "h_pos", "h_neg", "ratio"
        )
        .map_err(io_err)?;
        for (rank, row) in rows.iter().enumerate() {
            writeln!(
                text,
                "{:>4}  {:<width$}  {:>9.4}  {:>9.4}  {:>9}",
                rank + 1,
                row.word,
                row.h_pos,
                row.h_neg,
                format_ratio(row.ratio)
            )
            .map_err(io_err)?;
        }
        writeln!(text).map_err(io_err)?;
    }
    text.flush().map_err(io_err)
}
