//! Command-line driver for the `entrokey` library: corpus ingestion,
//! segmentation, entropy keyword extraction, detector training, grid
//! evaluation, consensus labeling, synthetic corpora, and the full
//! pipeline.
//!
//! Exit codes: 0 on success, 2 for configuration errors, 3 for data
//! errors, 4 for stage or I/O failures.

use std::env;
use std::fs;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use entrokey::{
    build_count_table, compute_stats, cross_validate, derive_seed, filter_noise,
    generate_synthetic, label_corpus, load_corpus, load_model, read_keyword_list, report_keywords,
    run_grid, run_pipeline, save_corpus, save_model, select_keywords, sweep_alphas, train_detector,
    write_keyword_list, write_prediction_summary, write_predictions, write_reports_text,
    write_reports_tsv, write_stats, Corpus, CorpusFormat, Error, ExtractionConfig, KeywordList,
    Label, Polarity, Result, RunConfig, SegmentMode, Segmenter, SyntheticSpec, TrainerKind,
};

#[derive(Parser)]
#[command(
    name = "entrokey",
    version,
    about = "Entropy-based sentiment keywords and linear SVM detectors"
)]
struct Cli {
    #[command(flatten)]
    global: GlobalArgs,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct GlobalArgs {
    /// TOML run configuration; command-line flags override file values.
    #[arg(long, global = true, value_name = "PATH")]
    config: Option<PathBuf>,
    /// Global seed; every seeded stage derives its own seed from it.
    #[arg(long, global = true, value_name = "INT")]
    seed: Option<u64>,
    /// Output directory (the ENTROKEY_OUT environment variable overrides
    /// this flag).
    #[arg(long, global = true, value_name = "PATH")]
    out_dir: Option<PathBuf>,
    /// Suppress informational output.
    #[arg(long, global = true)]
    quiet: bool,
}

#[derive(Subcommand)]
enum Command {
    /// Load a corpus, optionally split sentences, and write normalized JSONL.
    Ingest(IngestArgs),
    /// Tokenize corpus text and drop punctuation-only tokens.
    Segment(SegmentArgs),
    /// Compute per-word entropies and write keyword lists for the whole α grid.
    Keywords(KeywordsArgs),
    /// Train one detector from a keyword list.
    Train(TrainArgs),
    /// Cross-validate one keyword list.
    Eval(EvalArgs),
    /// Cross-validate the α grid and keep the best keyword lists.
    Grid(GridArgs),
    /// Consensus-label unlabeled documents with two detectors.
    Predict(PredictArgs),
    /// Write the ranked keyword report for the given lists.
    Report(ReportArgs),
    /// Generate a synthetic labeled corpus with planted keywords.
    Synth(SynthArgs),
    /// Run the full pipeline: ingest through predict, with a manifest.
    Run(RunArgs),
}

#[derive(Args)]
struct IngestArgs {
    /// Corpus file; defaults to the configured input.
    #[arg(long, value_name = "PATH")]
    input: Option<PathBuf>,
    /// Corpus format: jsonl or tsv.
    #[arg(long, value_name = "FORMAT")]
    format: Option<CorpusFormat>,
    /// Split documents into sentences (renames ids to `parent#k`).
    #[arg(long, value_name = "BOOL")]
    split_sentences: Option<bool>,
}

#[derive(Args)]
struct SegmentArgs {
    /// Corpus file; defaults to <out-dir>/corpus.jsonl.
    #[arg(long, value_name = "PATH")]
    input: Option<PathBuf>,
    /// Segmentation mode: pretokenized, whitespace, or max_match.
    #[arg(long, value_name = "MODE")]
    mode: Option<SegmentMode>,
    /// Dictionary file for max_match mode.
    #[arg(long, value_name = "PATH")]
    dict: Option<PathBuf>,
    /// Longest dictionary match attempted, in code points.
    #[arg(long, value_name = "INT")]
    max_word_len: Option<usize>,
}

#[derive(Args)]
struct KeywordsArgs {
    /// Segmented corpus; defaults to <out-dir>/segmented.jsonl.
    #[arg(long, value_name = "PATH")]
    input: Option<PathBuf>,
    #[command(flatten)]
    grid: GridFlags,
}

#[derive(Args)]
struct GridFlags {
    /// Smallest selection coefficient on the grid.
    #[arg(long, value_name = "REAL")]
    alpha_min: Option<f64>,
    /// Largest selection coefficient on the grid.
    #[arg(long, value_name = "REAL")]
    alpha_max: Option<f64>,
    /// Grid step.
    #[arg(long, value_name = "REAL")]
    alpha_step: Option<f64>,
}

#[derive(Args)]
struct TrainFlags {
    /// Trainer: hinge_sgd or perceptron.
    #[arg(long, value_name = "KIND")]
    trainer: Option<TrainerKind>,
    /// Hinge misclassification cost.
    #[arg(long, value_name = "REAL")]
    c: Option<f64>,
    /// Maximum training epochs.
    #[arg(long, value_name = "INT")]
    epochs: Option<usize>,
    /// Perceptron step size.
    #[arg(long, value_name = "REAL")]
    learning_rate: Option<f64>,
    /// Early-stop threshold on the best objective (0 disables).
    #[arg(long, value_name = "REAL")]
    tolerance: Option<f64>,
}

#[derive(Args)]
struct TrainArgs {
    /// Segmented corpus; defaults to <out-dir>/segmented.jsonl.
    #[arg(long, value_name = "PATH")]
    input: Option<PathBuf>,
    /// Keyword list naming the detector vocabulary; its polarity picks the
    /// +1 class (combined lists detect positive).
    #[arg(long, value_name = "PATH")]
    keywords: PathBuf,
    #[command(flatten)]
    train: TrainFlags,
    /// Model file to write; defaults to <out-dir>/model.txt.
    #[arg(long, value_name = "PATH")]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct EvalArgs {
    /// Segmented corpus; defaults to <out-dir>/segmented.jsonl.
    #[arg(long, value_name = "PATH")]
    input: Option<PathBuf>,
    /// Keyword list to evaluate.
    #[arg(long, value_name = "PATH")]
    keywords: PathBuf,
    /// Cross-validation folds.
    #[arg(long, value_name = "INT")]
    k: Option<usize>,
    #[command(flatten)]
    train: TrainFlags,
}

#[derive(Args)]
struct GridArgs {
    /// Segmented corpus; defaults to <out-dir>/segmented.jsonl.
    #[arg(long, value_name = "PATH")]
    input: Option<PathBuf>,
    #[command(flatten)]
    grid: GridFlags,
    /// Cross-validation folds.
    #[arg(long, value_name = "INT")]
    k: Option<usize>,
    /// α′ selecting the negative detector's list; defaults to alpha-max.
    #[arg(long, value_name = "REAL")]
    negative_alpha: Option<f64>,
    #[command(flatten)]
    train: TrainFlags,
}

#[derive(Args)]
struct PredictArgs {
    /// Segmented corpus with unlabeled documents; defaults to
    /// <out-dir>/segmented.jsonl.
    #[arg(long, value_name = "PATH")]
    input: Option<PathBuf>,
    /// Positive detector model; defaults to <out-dir>/model_positive.txt.
    #[arg(long, value_name = "PATH")]
    pos_model: Option<PathBuf>,
    /// Negative detector model; defaults to <out-dir>/model_negative.txt.
    #[arg(long, value_name = "PATH")]
    neg_model: Option<PathBuf>,
    /// Labeled JSONL to write; defaults to <out-dir>/labeled.jsonl.
    #[arg(long, value_name = "PATH")]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct ReportArgs {
    /// Segmented corpus; defaults to <out-dir>/segmented.jsonl.
    #[arg(long, value_name = "PATH")]
    input: Option<PathBuf>,
    /// Keyword list file; repeatable.
    #[arg(long, value_name = "PATH", required = true)]
    keywords: Vec<PathBuf>,
    /// Keywords per polarity in the ranked report.
    #[arg(long, value_name = "INT")]
    top_n: Option<usize>,
}

#[derive(Args)]
struct SynthArgs {
    /// Positive documents to generate.
    #[arg(long, value_name = "INT", default_value_t = 200)]
    pos_docs: usize,
    /// Negative documents to generate.
    #[arg(long, value_name = "INT", default_value_t = 200)]
    neg_docs: usize,
    /// Unlabeled documents to generate.
    #[arg(long, value_name = "INT", default_value_t = 100)]
    unlabeled: usize,
    /// Planted positive vocabulary size.
    #[arg(long, value_name = "INT", default_value_t = 30)]
    planted_pos: usize,
    /// Planted negative vocabulary size.
    #[arg(long, value_name = "INT", default_value_t = 30)]
    planted_neg: usize,
    /// Shared (polarity-free) vocabulary size.
    #[arg(long, value_name = "INT", default_value_t = 40)]
    shared: usize,
    /// Tokens per document.
    #[arg(long, value_name = "INT", default_value_t = 12)]
    doc_length: usize,
    /// Fraction of tokens drawn uniformly from all vocabularies.
    #[arg(long, value_name = "REAL", default_value_t = 0.1)]
    noise: f64,
}

#[derive(Args)]
struct RunArgs {
    /// Corpus file; overrides the configured input.
    #[arg(long, value_name = "PATH")]
    input: Option<PathBuf>,
}

/// Effective run configuration after layering the config file, command-line
/// flags, and the ENTROKEY_OUT environment variable.
struct Context {
    config: RunConfig,
    quiet: bool,
}

impl Context {
    fn from_global(global: &GlobalArgs) -> Result<Context> {
        let mut config = match &global.config {
            Some(path) => RunConfig::from_toml_file(path)?,
            None => RunConfig::default(),
        };
        if let Some(seed) = global.seed {
            config.seed = seed;
        }
        if let Some(dir) = &global.out_dir {
            config.out_dir = dir.clone();
        }
        if let Some(dir) = env::var_os("ENTROKEY_OUT") {
            if !dir.is_empty() {
                config.out_dir = PathBuf::from(dir);
            }
        }
        Ok(Context {
            config,
            quiet: global.quiet,
        })
    }

    fn ensure_out_dir(&self) -> Result<()> {
        fs::create_dir_all(&self.config.out_dir).map_err(|e| Error::io(&self.config.out_dir, e))
    }

    /// `flag` if given, else `<out-dir>/<name>`.
    fn artifact(&self, flag: &Option<PathBuf>, name: &str) -> PathBuf {
        flag.clone()
            .unwrap_or_else(|| self.config.out_dir.join(name))
    }

    /// Loads the segmented corpus most subcommands consume.
    fn load_segmented(&self, flag: &Option<PathBuf>) -> Result<Corpus> {
        load_corpus(self.artifact(flag, "segmented.jsonl"), CorpusFormat::Jsonl)
    }

    fn say(&self, message: std::fmt::Arguments<'_>) {
        if !self.quiet {
            println!("{message}");
        }
    }
}

macro_rules! say {
    ($ctx:expr, $($arg:tt)*) => { $ctx.say(format_args!($($arg)*)) };
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match dispatch(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(err) => {
            eprintln!("error: {err}");
            ExitCode::from(exit_code(&err))
        }
    }
}

/// 2 for configuration errors, 3 for data errors, 4 for everything else
/// (I/O, locked output, failed pipeline stages).
fn exit_code(err: &Error) -> u8 {
    match err {
        Error::InvalidConfig { .. }
        | Error::InvalidGrid { .. }
        | Error::InvalidSpec { .. }
        | Error::InvalidFolds { .. }
        | Error::DictionaryRequired => 2,
        Error::MalformedRecord { .. }
        | Error::DuplicateId { .. }
        | Error::InvalidDocument { .. }
        | Error::EmptyDictionary { .. }
        | Error::UnknownWord { .. }
        | Error::Untokenized { .. }
        | Error::MissingClass { .. }
        | Error::InvalidProbabilities { .. }
        | Error::PolarityMismatch { .. }
        | Error::InvalidKeywordList { .. }
        | Error::EmptyTrainingSet
        | Error::SingleClassTrainingSet
        | Error::EmptyVocabulary
        | Error::DimensionMismatch { .. }
        | Error::LengthMismatch { .. }
        | Error::NonFinite { .. }
        | Error::ModelFormat { .. }
        | Error::ModelIntegrity { .. }
        | Error::EmptyInput { .. }
        | Error::InvalidLabel { .. } => 3,
        _ => 4,
    }
}

fn dispatch(cli: Cli) -> Result<()> {
    let ctx = Context::from_global(&cli.global)?;
    match cli.command {
        Command::Ingest(args) => cmd_ingest(&ctx, args),
        Command::Segment(args) => cmd_segment(&ctx, args),
        Command::Keywords(args) => cmd_keywords(&ctx, args),
        Command::Train(args) => cmd_train(&ctx, args),
        Command::Eval(args) => cmd_eval(&ctx, args),
        Command::Grid(args) => cmd_grid(&ctx, args),
        Command::Predict(args) => cmd_predict(&ctx, args),
        Command::Report(args) => cmd_report(&ctx, args),
        Command::Synth(args) => cmd_synth(&ctx, args),
        Command::Run(args) => cmd_run(&ctx, args),
    }
}

fn cmd_ingest(ctx: &Context, args: IngestArgs) -> Result<()> {
    let input = args
        .input
        .or_else(|| ctx.config.input.clone())
        .ok_or_else(|| Error::InvalidConfig {
            message: "input corpus required (give --input or set input.corpus)".to_string(),
        })?;
    let format = args.format.unwrap_or(ctx.config.format);
    let mut corpus = load_corpus(&input, format)?;
    if corpus.is_empty() {
        return Err(Error::EmptyInput { what: "corpus" });
    }
    if args.split_sentences.unwrap_or(ctx.config.split_sentences) {
        corpus = corpus.split_sentences();
    }
    ctx.ensure_out_dir()?;
    let path = ctx.config.out_dir.join("corpus.jsonl");
    save_corpus(&corpus, &path)?;
    let counts = corpus.counts();
    say!(
        ctx,
        "ingested {} documents ({} positive / {} negative / {} unlabeled) -> {}",
        counts.total(),
        counts.positive,
        counts.negative,
        counts.unlabeled,
        path.display()
    );
    Ok(())
}

fn cmd_segment(ctx: &Context, args: SegmentArgs) -> Result<()> {
    let corpus = load_corpus(
        ctx.artifact(&args.input, "corpus.jsonl"),
        CorpusFormat::Jsonl,
    )?;
    let mut segmenter_config = ctx.config.segmenter.clone();
    if let Some(mode) = args.mode {
        segmenter_config.mode = mode;
    }
    if let Some(dict) = args.dict {
        segmenter_config.dictionary_path = Some(dict);
    }
    if let Some(len) = args.max_word_len {
        segmenter_config.max_word_len = len;
    }
    let segmenter = Segmenter::new(&segmenter_config)?;
    let segmented = segmenter.segment_corpus(&corpus);
    let cleaned = segmented.map_tokens(|doc| Ok(filter_noise(doc.tokens()?.to_vec())))?;
    ctx.ensure_out_dir()?;
    let path = ctx.config.out_dir.join("segmented.jsonl");
    save_corpus(&cleaned, &path)?;
    say!(
        ctx,
        "segmented {} documents ({} mode) -> {}",
        cleaned.len(),
        segmenter.mode(),
        path.display()
    );
    Ok(())
}

fn cmd_keywords(ctx: &Context, args: KeywordsArgs) -> Result<()> {
    let corpus = ctx.load_segmented(&args.input)?;
    let table = build_count_table(&corpus)?;
    let stats = compute_stats(&table);
    let alpha_min = args.grid.alpha_min.unwrap_or(ctx.config.alpha_min);
    let alpha_max = args.grid.alpha_max.unwrap_or(ctx.config.alpha_max);
    let alpha_step = args.grid.alpha_step.unwrap_or(ctx.config.alpha_step);
    let sweep = sweep_alphas(&stats, alpha_min, alpha_max, alpha_step)?;

    ctx.ensure_out_dir()?;
    let stats_path = ctx.config.out_dir.join("stats.tsv");
    write_stats(&stats, &stats_path)?;
    let mut lists = 0;
    for entry in sweep.positive.iter().chain(&sweep.negative) {
        let name = format!("keywords_{}_a{:.2}.tsv", entry.list.polarity, entry.alpha);
        write_keyword_list(&entry.list, &stats, ctx.config.out_dir.join(name))?;
        lists += 1;
    }
    say!(
        ctx,
        "computed entropies for {} words; wrote {} and {} keyword lists",
        stats.len(),
        stats_path.display(),
        lists
    );
    Ok(())
}

fn effective_train_config(ctx: &Context, flags: &TrainFlags) -> entrokey::TrainConfig {
    let mut config = ctx.config.train;
    if let Some(trainer) = flags.trainer {
        config.trainer = trainer;
    }
    if let Some(c) = flags.c {
        config.c = c;
    }
    if let Some(epochs) = flags.epochs {
        config.epochs = epochs;
    }
    if let Some(rate) = flags.learning_rate {
        config.learning_rate = rate;
    }
    if let Some(tolerance) = flags.tolerance {
        config.tolerance = tolerance;
    }
    config.seed = derive_seed(ctx.config.seed, "train");
    config
}

fn cmd_train(ctx: &Context, args: TrainArgs) -> Result<()> {
    let corpus = ctx.load_segmented(&args.input)?;
    let list = read_keyword_list(&args.keywords)?;
    let target = match list.polarity {
        Polarity::Negative => Label::Negative,
        Polarity::Positive | Polarity::Combined => Label::Positive,
    };
    let train_config = effective_train_config(ctx, &args.train);
    let model = train_detector(&corpus, &list, target, train_config)?;
    ctx.ensure_out_dir()?;
    let path = ctx.artifact(&args.out, "model.txt");
    save_model(&model, &path)?;
    say!(
        ctx,
        "trained {} detector for the {} class over {} words -> {}",
        train_config.trainer,
        target,
        model.dimension(),
        path.display()
    );
    Ok(())
}

fn cmd_eval(ctx: &Context, args: EvalArgs) -> Result<()> {
    let corpus = ctx.load_segmented(&args.input)?;
    let list = read_keyword_list(&args.keywords)?;
    let train_config = effective_train_config(ctx, &args.train);
    let k = args.k.unwrap_or(ctx.config.k);
    let fold_seed = derive_seed(ctx.config.seed, "folds");
    let report = cross_validate(&corpus, &list, train_config, k, fold_seed)?;
    ctx.ensure_out_dir()?;
    let tsv_path = ctx.config.out_dir.join("eval_report.tsv");
    let text_path = ctx.config.out_dir.join("eval_report.txt");
    let reports = [report];
    write_reports_tsv(&reports, &tsv_path)?;
    write_reports_text(&reports, &text_path)?;
    let report = &reports[0];
    say!(
        ctx,
        "{}-fold accuracy {:.3} ± {:.3}, f1 {:.3} ± {:.3} -> {}",
        k,
        report.accuracy_mean,
        report.accuracy_std,
        report.f1_mean,
        report.f1_std,
        text_path.display()
    );
    Ok(())
}

fn cmd_grid(ctx: &Context, args: GridArgs) -> Result<()> {
    let corpus = ctx.load_segmented(&args.input)?;
    let table = build_count_table(&corpus)?;
    let stats = compute_stats(&table);
    let alpha_min = args.grid.alpha_min.unwrap_or(ctx.config.alpha_min);
    let alpha_max = args.grid.alpha_max.unwrap_or(ctx.config.alpha_max);
    let alpha_step = args.grid.alpha_step.unwrap_or(ctx.config.alpha_step);
    let train_config = effective_train_config(ctx, &args.train);
    let k = args.k.unwrap_or(ctx.config.k);
    let fold_seed = derive_seed(ctx.config.seed, "folds");
    let grid = run_grid(
        &corpus,
        &stats,
        alpha_min,
        alpha_max,
        alpha_step,
        train_config,
        k,
        fold_seed,
    )?;
    let negative_alpha = args
        .negative_alpha
        .or(ctx.config.negative_alpha)
        .unwrap_or(alpha_max);
    let negative_list = select_keywords(
        &stats,
        ExtractionConfig::new(negative_alpha, negative_alpha)?,
        Polarity::Negative,
    )?;

    ctx.ensure_out_dir()?;
    let out_dir = &ctx.config.out_dir;
    write_reports_tsv(&grid.reports, out_dir.join("reports.tsv"))?;
    write_reports_text(&grid.reports, out_dir.join("reports.txt"))?;
    write_keyword_list(
        &grid.best_positive,
        &stats,
        out_dir.join("keywords_positive.tsv"),
    )?;
    write_keyword_list(
        &negative_list,
        &stats,
        out_dir.join("keywords_negative.tsv"),
    )?;
    write_keyword_list(
        &grid.combined,
        &stats,
        out_dir.join("keywords_combined.tsv"),
    )?;
    let best = &grid.reports[0];
    say!(
        ctx,
        "evaluated {} lists; best {} (α {}) with f1 {:.3}, accuracy {:.3} -> {}",
        grid.reports.len(),
        best.keyword_list_name,
        best.alpha,
        best.f1_mean,
        best.accuracy_mean,
        out_dir.join("reports.txt").display()
    );
    Ok(())
}

fn cmd_predict(ctx: &Context, args: PredictArgs) -> Result<()> {
    let corpus = ctx.load_segmented(&args.input)?;
    let pos_model = load_model(ctx.artifact(&args.pos_model, "model_positive.txt"))?;
    let neg_model = load_model(ctx.artifact(&args.neg_model, "model_negative.txt"))?;
    let (predictions, summary) = label_corpus(&corpus, &pos_model, &neg_model)?;
    ctx.ensure_out_dir()?;
    let labeled_path = ctx.artifact(&args.out, "labeled.jsonl");
    write_predictions(&corpus, &predictions, &labeled_path)?;
    let summary_path = ctx.config.out_dir.join("summary.json");
    write_prediction_summary(&summary, &summary_path)?;
    say!(
        ctx,
        "labeled {} documents: {} positive / {} neutral / {} negative -> {}",
        summary.total(),
        summary.positive,
        summary.neutral,
        summary.negative,
        labeled_path.display()
    );
    Ok(())
}

fn cmd_report(ctx: &Context, args: ReportArgs) -> Result<()> {
    let corpus = ctx.load_segmented(&args.input)?;
    let table = build_count_table(&corpus)?;
    let stats = compute_stats(&table);
    let lists: Vec<KeywordList> = args
        .keywords
        .iter()
        .map(read_keyword_list)
        .collect::<Result<_>>()?;
    let list_refs: Vec<&KeywordList> = lists.iter().collect();
    let top_n = args.top_n.unwrap_or(ctx.config.top_n);
    ctx.ensure_out_dir()?;
    let tsv_path = ctx.config.out_dir.join("keywords_report.tsv");
    let text_path = ctx.config.out_dir.join("keywords_report.txt");
    report_keywords(&stats, &list_refs, top_n, &tsv_path, &text_path)?;
    say!(
        ctx,
        "ranked top {} keywords from {} lists -> {}",
        top_n,
        lists.len(),
        text_path.display()
    );
    Ok(())
}

fn cmd_synth(ctx: &Context, args: SynthArgs) -> Result<()> {
    let spec = SyntheticSpec::with_sizes(
        args.pos_docs,
        args.neg_docs,
        args.unlabeled,
        args.planted_pos,
        args.planted_neg,
        args.shared,
        args.doc_length,
        args.noise,
        ctx.config.seed,
    );
    let synthetic = generate_synthetic(&spec)?;
    ctx.ensure_out_dir()?;
    let corpus_path = ctx.config.out_dir.join("synthetic.jsonl");
    save_corpus(&synthetic.corpus, &corpus_path)?;
    let truth_path = ctx.config.out_dir.join("truth.tsv");
    let mut truth = String::from("id\tlabel\n");
    for (id, label) in &synthetic.truth {
        let name = match label {
            Label::Positive => "positive",
            Label::Negative => "negative",
            Label::Unlabeled => "unlabeled",
        };
        truth.push_str(&format!("{id}\t{name}\n"));
    }
    fs::write(&truth_path, truth).map_err(|e| Error::io(&truth_path, e))?;
    let counts = synthetic.corpus.counts();
    say!(
        ctx,
        "generated {} documents ({} positive / {} negative / {} unlabeled) -> {}",
        counts.total(),
        counts.positive,
        counts.negative,
        counts.unlabeled,
        corpus_path.display()
    );
    Ok(())
}

fn cmd_run(ctx: &Context, args: RunArgs) -> Result<()> {
    let mut config = ctx.config.clone();
    if let Some(input) = args.input {
        config.input = Some(input);
    }
    let manifest = run_pipeline(&config)?;
    let artifacts = manifest.artifacts().count();
    say!(
        ctx,
        "pipeline complete: {} stages, {} artifacts under {}",
        manifest.stages.len(),
        artifacts,
        config.out_dir.display()
    );
    Ok(())
}
