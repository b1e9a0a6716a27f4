//! Command-line interface.
//!
//! Exit codes: 0 on success, 1 on usage errors (bad flags, bad config keys
//! or values), 2 on data errors (unreadable or malformed inputs, training
//! failures).

use std::ffi::OsString;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use clap::{Args, Parser, Subcommand, ValueEnum};

use crate::engine::{cluster_stream, StreamOrder};
use crate::error::Error;
use crate::io::assignments::{assignments_partition, write_assignments};
use crate::io::config::Config;
use crate::io::tdt::{SplitSide, SplitTable};
use crate::io::{self as sio, MirandaOptions};
use crate::metrics::{evaluate, fragmentation_report, MetricKind};
use crate::model::{Document, SimilarityParams, FEATURE_LABELS};
use crate::repr::{EmbeddingStore, SparseEncoder, TfidfModels};
use crate::training::smote::DEFAULT_NEIGHBORS;
use crate::training::{
    cross_validate, make_creation_samples, make_svm_triplets, simulate_gold_stream, train_bundle, train_linear_svm,
    write_creation_samples, write_svm_samples, GridPoint, HyperGrid, NegativeSampling, TrainConfig,
};

pub const EXIT_OK: i32 = 0;
pub const EXIT_USAGE: i32 = 1;
pub const EXIT_DATA: i32 = 2;

/// Keys accepted in a `--config` file.
pub const CONFIG_KEYS: [&str; 13] = [
    "format",
    "split",
    "split_file",
    "all_languages",
    "seed",
    "cv_folds",
    "grid",
    "c",
    "mu",
    "sigma",
    "smote_k",
    "negatives",
    "order",
];

#[derive(Debug, Parser)]
#[command(name = "streamclust", version, about = "Online news-stream event clustering")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Train a model bundle on a labeled corpus.
    Train(TrainArgs),
    /// Cluster a corpus with a trained bundle and write assignments.
    Cluster(ClusterArgs),
    /// Score assignments against gold labels.
    Evaluate(EvaluateArgs),
    /// Fit TF-IDF models on a corpus.
    FitTfidf(FitTfidfArgs),
    /// Write the SVM triplet and creation training sets of a corpus.
    ExportFeatures(ExportArgs),
    /// Print the contents of a model bundle.
    InspectBundle(InspectArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Miranda,
    Tdt,
}

#[derive(Debug, Args)]
struct CorpusArgs {
    /// Corpus file (JSON lines or a JSON array).
    #[arg(long)]
    corpus: PathBuf,
    /// Corpus layout [default: miranda]
    #[arg(long, value_enum)]
    format: Option<Format>,
    /// Side of the TDT split to load [default: train for `train`, test otherwise]
    #[arg(long)]
    split: Option<String>,
    /// TDT split table with `event<TAB>train|test` lines instead of the standard one.
    #[arg(long)]
    split_file: Option<PathBuf>,
    /// Keep non-English Miranda records.
    #[arg(long)]
    all_languages: bool,
    /// Key-value defaults for any flag.
    #[arg(long)]
    config: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct EncodeArgs {
    /// Embedding file (binary; `.tsv` or `.txt` for the text form).
    #[arg(long)]
    embeddings: PathBuf,
    /// TF-IDF model file; fitted on the corpus when absent and the corpus
    /// ships no weights.
    #[arg(long)]
    tfidf: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct TrainArgs {
    #[command(flatten)]
    corpus: CorpusArgs,
    #[command(flatten)]
    encode: EncodeArgs,
    /// Output bundle path.
    #[arg(long)]
    out: PathBuf,
    /// Cross-validation folds over gold clusters; below 2 trains directly.
    #[arg(long)]
    cv_folds: Option<usize>,
    /// Grid such as `c=0.1,1,10;mu=0;sigma=1,3,7,14;k=5`.
    #[arg(long)]
    grid: Option<String>,
    #[arg(long)]
    seed: Option<u64>,
    /// SVM cost when training directly.
    #[arg(long)]
    c: Option<f64>,
    /// Temporal mean in days when training directly.
    #[arg(long)]
    mu: Option<f64>,
    /// Temporal spread in days when training directly.
    #[arg(long)]
    sigma: Option<f64>,
    /// SMOTE neighbors when training directly.
    #[arg(long)]
    smote_k: Option<usize>,
    /// Negative cluster sampling: uniform or hard.
    #[arg(long)]
    negatives: Option<String>,
}

#[derive(Debug, Args)]
struct ClusterArgs {
    #[command(flatten)]
    corpus: CorpusArgs,
    #[command(flatten)]
    encode: EncodeArgs,
    #[arg(long)]
    bundle: PathBuf,
    /// Assignment output; stdout when absent.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Stream order: timestamp or given.
    #[arg(long)]
    order: Option<String>,
}

#[derive(Debug, Args)]
struct EvaluateArgs {
    #[arg(long)]
    assignments: PathBuf,
    /// Gold labels: `doc_id<TAB>label` file, or a `.json`/`.jsonl` corpus.
    #[arg(long)]
    gold: PathBuf,
    /// Comma-separated metric names or `all`.
    #[arg(long, default_value = "all")]
    metrics: String,
    /// Cluster count of a baseline system, for the excess-reduction line.
    #[arg(long)]
    baseline_count: Option<usize>,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct FitTfidfArgs {
    #[command(flatten)]
    corpus: CorpusArgs,
    #[arg(long)]
    out: PathBuf,
}

#[derive(Debug, Args)]
struct ExportArgs {
    #[command(flatten)]
    corpus: CorpusArgs,
    #[command(flatten)]
    encode: EncodeArgs,
    /// Weights and temporal parameters for the creation set; an SVM is
    /// trained on the triplets when absent.
    #[arg(long)]
    bundle: Option<PathBuf>,
    #[arg(long)]
    svm_out: Option<PathBuf>,
    #[arg(long)]
    creation_out: Option<PathBuf>,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    c: Option<f64>,
    #[arg(long)]
    mu: Option<f64>,
    #[arg(long)]
    sigma: Option<f64>,
    #[arg(long)]
    negatives: Option<String>,
}

#[derive(Debug, Args)]
struct InspectArgs {
    bundle: PathBuf,
}

#[derive(Debug)]
enum Failure {
    Usage(String),
    Data(Error),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Data(e)
    }
}

type CliResult<T> = std::result::Result<T, Failure>;

fn usage(e: impl std::fmt::Display) -> Failure {
    Failure::Usage(e.to_string())
}

/// Parses `args` (including the program name) and runs one subcommand.
pub fn run<I, T>(args: I, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            use clap::error::ErrorKind;
            let text = e.render().to_string();
            return match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => {
                    let _ = write!(stdout, "{text}");
                    EXIT_OK
                }
                _ => {
                    let _ = write!(stderr, "{text}");
                    EXIT_USAGE
                }
            };
        }
    };
    let result = match cli.command {
        Command::Train(a) => train(a, stdout),
        Command::Cluster(a) => cluster(a, stdout),
        Command::Evaluate(a) => evaluate_cmd(a, stdout),
        Command::FitTfidf(a) => fit_tfidf(a, stdout),
        Command::ExportFeatures(a) => export_features(a, stdout),
        Command::InspectBundle(a) => inspect(a, stdout),
    };
    match result {
        Ok(()) => EXIT_OK,
        Err(Failure::Usage(msg)) => {
            let _ = writeln!(stderr, "error: {msg}");
            EXIT_USAGE
        }
        Err(Failure::Data(e)) => {
            let _ = writeln!(stderr, "error: {e}");
            EXIT_DATA
        }
    }
}

/// Flag value, else config value, else default.
fn pick<T: FromStr>(flag: Option<T>, config: &Config, key: &str, default: T) -> CliResult<T> {
    if let Some(v) = flag {
        return Ok(v);
    }
    Ok(config.get(key).map_err(usage)?.unwrap_or(default))
}

fn parse_flag<T: FromStr>(flag: Option<String>, config: &Config, key: &str, default: T) -> CliResult<T>
where
    T::Err: std::fmt::Display,
{
    match flag.or_else(|| config.get_str(key).map(str::to_owned)) {
        Some(s) => s.parse().map_err(|e: T::Err| usage(format!("--{}: {e}", key.replace('_', "-")))),
        None => Ok(default),
    }
}

fn load_config(path: &Option<PathBuf>) -> CliResult<Config> {
    let Some(path) = path else {
        return Ok(Config::default());
    };
    let config = Config::load(path).map_err(|e| match e {
        Error::Parse { .. } => usage(format!("{}: {e}", path.display())),
        other => Failure::Data(other),
    })?;
    config.check_keys(&CONFIG_KEYS).map_err(usage)?;
    Ok(config)
}

fn load_corpus(args: &CorpusArgs, config: &Config, default_side: SplitSide) -> CliResult<(Vec<Document>, Option<SparseEncoder>)> {
    let format = match args.format {
        Some(f) => f,
        None => match config.get_str("format") {
            None | Some("miranda") => Format::Miranda,
            Some("tdt") => Format::Tdt,
            Some(other) => return Err(usage(format!("unknown corpus format `{other}`"))),
        },
    };
    match format {
        Format::Miranda => {
            let all = args.all_languages || config.get::<bool>("all_languages").map_err(usage)?.unwrap_or(false);
            let corpus = sio::load_miranda(&args.corpus, MirandaOptions { english_only: !all })?;
            Ok((corpus.docs, corpus.weights.map(SparseEncoder::Provided)))
        }
        Format::Tdt => {
            let side = parse_flag(args.split.clone(), config, "split", default_side)?;
            let split_file = args
                .split_file
                .clone()
                .or_else(|| config.get_str("split_file").map(PathBuf::from));
            let table = match split_file {
                Some(p) => SplitTable::load(&p)?,
                None => SplitTable::standard(),
            };
            Ok((sio::load_tdt(&args.corpus, &table, side)?, None))
        }
    }
}

fn load_store(path: &Path) -> CliResult<EmbeddingStore> {
    let ext = path.extension().and_then(|e| e.to_str()).unwrap_or_default();
    Ok(if ext == "tsv" || ext == "txt" {
        sio::load_embeddings_text(path)?
    } else {
        sio::load_embeddings(path)?
    })
}

fn resolve_encoder(provided: Option<SparseEncoder>, tfidf: &Option<PathBuf>, docs: &[Document]) -> CliResult<SparseEncoder> {
    if let Some(path) = tfidf {
        return Ok(SparseEncoder::Fitted(sio::load_tfidf(path)?));
    }
    if let Some(enc) = provided {
        return Ok(enc);
    }
    Ok(SparseEncoder::Fitted(TfidfModels::fit(docs)?))
}

fn output(path: &Option<PathBuf>, stdout: &mut dyn Write, body: impl FnOnce(&mut dyn Write) -> crate::Result<()>) -> CliResult<()> {
    match path {
        Some(p) => {
            let mut f = sio::create(p)?;
            body(&mut f)?;
            f.flush().map_err(|e| Error::file(p, e))?;
        }
        None => body(stdout)?,
    }
    Ok(())
}

fn train(a: TrainArgs, stdout: &mut dyn Write) -> CliResult<()> {
    let config = load_config(&a.corpus.config)?;
    let seed = pick(a.seed, &config, "seed", 0)?;
    let folds = pick(a.cv_folds, &config, "cv_folds", 0)?;
    let sampling = parse_negatives(a.negatives, &config)?;
    let direct = GridPoint {
        c: pick(a.c, &config, "c", 1.0)?,
        mu: pick(a.mu, &config, "mu", 0.0)?,
        sigma: pick(a.sigma, &config, "sigma", SimilarityParams::default().sigma())?,
        k: pick(a.smote_k, &config, "smote_k", DEFAULT_NEIGHBORS)?,
    };
    let grid = match a.grid.or_else(|| config.get_str("grid").map(str::to_owned)) {
        Some(g) => Some(g.parse::<HyperGrid>().map_err(usage)?),
        None => None,
    };
    if folds < 2 {
        SimilarityParams::new(direct.mu, direct.sigma).map_err(usage)?;
        if !(direct.c > 0.0) || direct.k == 0 {
            return Err(usage("--c must be positive and --smote-k at least 1"));
        }
    }

    let (docs, provided) = load_corpus(&a.corpus, &config, SplitSide::Train)?;
    let store = load_store(&a.encode.embeddings)?;
    let encoder = resolve_encoder(provided, &a.encode.tfidf, &docs)?;

    let point = if folds >= 2 {
        let grid = grid.unwrap_or_default();
        let report = cross_validate(&docs, &encoder, &store, &grid, folds, seed, sampling)?;
        for (p, score) in &report.scores {
            writeln!(stdout, "cv\t{p}\t{score:.6}").map_err(Error::from)?;
        }
        report.best
    } else {
        direct
    };
    let config = TrainConfig::from_point(point, seed, sampling).map_err(usage)?;
    let (bundle, summary) = train_bundle(&docs, &encoder, &store, &config)?;
    sio::save_bundle(&bundle, &a.out)?;
    let mut w = |k: &str, v: String| writeln!(stdout, "{k}\t{v}").map_err(Error::from);
    w("selected", point.to_string())?;
    w("documents", summary.documents.to_string())?;
    w("gold_clusters", summary.gold_clusters.to_string())?;
    w("triplets", summary.triplets.to_string())?;
    w("creation_samples", summary.creation_samples.to_string())?;
    w("creation_positives", summary.creation_positives.to_string())?;
    w("balanced_samples", summary.balanced_samples.to_string())?;
    w("creation_accuracy", format!("{:.6}", summary.creation_accuracy))?;
    w("bundle", a.out.display().to_string())?;
    Ok(())
}

fn parse_negatives(flag: Option<String>, config: &Config) -> CliResult<NegativeSampling> {
    match flag.or_else(|| config.get_str("negatives").map(str::to_owned)).as_deref() {
        None | Some("uniform") => Ok(NegativeSampling::Uniform),
        Some("hard") => Ok(NegativeSampling::Hard),
        Some(other) => Err(usage(format!("unknown negative sampling `{other}` (expected uniform or hard)"))),
    }
}

fn cluster(a: ClusterArgs, stdout: &mut dyn Write) -> CliResult<()> {
    let config = load_config(&a.corpus.config)?;
    let order: StreamOrder = parse_flag(a.order, &config, "order", StreamOrder::Timestamp)?;
    let bundle = sio::load_bundle(&a.bundle)?;
    let (docs, provided) = load_corpus(&a.corpus, &config, SplitSide::Test)?;
    let store = load_store(&a.encode.embeddings)?;
    let encoder = resolve_encoder(provided, &a.encode.tfidf, &docs)?;
    let (_, assignments) = cluster_stream(&docs, &bundle, &encoder, &store, order)?;
    output(&a.out, stdout, |w| write_assignments(w, &assignments))
}

fn evaluate_cmd(a: EvaluateArgs, stdout: &mut dyn Write) -> CliResult<()> {
    let kinds = MetricKind::parse_list(&a.metrics).map_err(usage)?;
    let pred = assignments_partition(&sio::load_assignments(&a.assignments)?)?;
    let gold = sio::load_gold(&a.gold)?;
    let mut report = evaluate(&pred, &gold, &kinds)?;
    if let Some(baseline) = a.baseline_count {
        let frag = fragmentation_report(&pred, &gold);
        report.push_scalar("excess_clusters", frag.excess() as f64);
        match frag.excess_reduction_vs(baseline) {
            Some(r) => report.push_scalar("excess_reduction", r),
            None => report.push_scalar("excess_reduction", f64::NAN),
        }
    }
    output(&a.out, stdout, |w| write!(w, "{report}").map_err(Error::from))
}

fn fit_tfidf(a: FitTfidfArgs, stdout: &mut dyn Write) -> CliResult<()> {
    let config = load_config(&a.corpus.config)?;
    let (docs, _) = load_corpus(&a.corpus, &config, SplitSide::Train)?;
    let models = TfidfModels::fit(&docs)?;
    sio::save_tfidf(&models, &a.out)?;
    writeln!(stdout, "documents\t{}", docs.len()).map_err(Error::from)?;
    Ok(())
}

fn export_features(a: ExportArgs, stdout: &mut dyn Write) -> CliResult<()> {
    let config = load_config(&a.corpus.config)?;
    if a.svm_out.is_none() && a.creation_out.is_none() {
        return Err(usage("nothing to export: pass --svm-out and/or --creation-out"));
    }
    let seed = pick(a.seed, &config, "seed", 0)?;
    let sampling = parse_negatives(a.negatives, &config)?;
    let bundle = a.bundle.as_deref().map(sio::load_bundle).transpose()?;
    let params = match &bundle {
        Some(b) => b.sim_params,
        None => SimilarityParams::new(
            pick(a.mu, &config, "mu", 0.0)?,
            pick(a.sigma, &config, "sigma", SimilarityParams::default().sigma())?,
        )
        .map_err(usage)?,
    };
    let c = pick(a.c, &config, "c", 1.0)?;
    let (docs, provided) = load_corpus(&a.corpus, &config, SplitSide::Train)?;
    let store = load_store(&a.encode.embeddings)?;
    let encoder = resolve_encoder(provided, &a.encode.tfidf, &docs)?;
    let trace = simulate_gold_stream(&docs, &encoder, &store)?;
    let triplets = make_svm_triplets(&trace, &params, seed, sampling)?;
    if let Some(p) = &a.svm_out {
        let mut f = sio::create(p)?;
        write_svm_samples(&mut f, &triplets)?;
        writeln!(stdout, "svm_samples\t{}", triplets.len()).map_err(Error::from)?;
    }
    if let Some(p) = &a.creation_out {
        let w = match &bundle {
            Some(b) => b.weights,
            None => train_linear_svm(&triplets, c)?,
        };
        let samples = make_creation_samples(&trace, &w, &params)?;
        let mut f = sio::create(p)?;
        write_creation_samples(&mut f, &samples)?;
        writeln!(stdout, "creation_samples\t{}", samples.len()).map_err(Error::from)?;
    }
    Ok(())
}

fn inspect(a: InspectArgs, stdout: &mut dyn Write) -> CliResult<()> {
    let b = sio::load_bundle(&a.bundle)?;
    let mut text = String::new();
    text += &format!("format_version\t{}\n", b.format_version);
    text += &format!("embedding_dim\t{}\n", b.embedding_dim);
    text += &format!("mu\t{}\n", b.sim_params.mu());
    text += &format!("sigma\t{}\n", b.sim_params.sigma());
    for (label, w) in FEATURE_LABELS.iter().zip(b.weights.values()) {
        text += &format!("weight\t{label}\t{w}\n");
    }
    for (i, p) in b.creation_net.params().iter().enumerate() {
        text += &format!("net\t{i}\t{p}\n");
    }
    stdout.write_all(text.as_bytes()).map_err(Error::from)?;
    Ok(())
}
