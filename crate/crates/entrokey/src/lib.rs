//! Entropy-based keyword extraction and linear SVM sentiment classification
//! for labeled review corpora.
//!
//! The crate is organized as a pipeline: load and sentence-split a corpus
//! ([`corpus`]), tokenize it ([`segment`]), score words by class-conditional
//! entropy and select keyword lists ([`entropy`]), train linear classifiers
//! over keyword counts ([`svm`]), evaluate them with stratified k-fold
//! cross-validation ([`eval`]), and orchestrate the whole run with hashed,
//! reproducible artifacts ([`pipeline`]). [`synth`] generates synthetic
//! corpora with known keyword ground truth for end-to-end checks.

pub mod corpus;
pub mod entropy;
pub mod error;
pub mod eval;
pub mod pipeline;
pub mod segment;
pub mod svm;
pub mod synth;

pub use corpus::{
    filter_noise, load_corpus, save_corpus, split_sentences, Corpus, CorpusFormat, Document, Label,
    LabelCounts,
};
pub use entropy::{
    build_count_table, combine_lists, compute_stats, read_keyword_list, select_keywords,
    sweep_alphas, word_entropy, word_probabilities, write_keyword_list, CountTable,
    ExtractionConfig, KeywordList, KeywordStats, Polarity, SweepEntry, SweepResult,
};
pub use error::{Error, Result};
pub use eval::{
    compute_metrics, consensus_label, cross_validate, grid_report, label_corpus, make_folds,
    run_grid, write_reports_text, write_reports_tsv, ConsensusLabel, ConsensusSummary, EvalReport,
    FoldPlan, GridOutcome, Metrics, Prediction,
};
pub use pipeline::{
    derive_seed, report_keywords, run_pipeline, train_detector, write_prediction_summary,
    write_predictions, write_stats, Manifest, PositiveDetector, RunConfig,
};
pub use segment::{load_dictionary, Dictionary, SegmentMode, Segmenter, SegmenterConfig};
pub use svm::{
    dual_decision, hinge_objective, load_model, save_model, train_hinge, train_hinge_with_trace,
    train_perceptron, train_perceptron_from, vectorize, FeatureVector, LinearModel, TrainConfig,
    TrainerKind, TrainingSet, Vectorizer,
};
pub use synth::{generate_synthetic, SyntheticCorpus, SyntheticSpec};
