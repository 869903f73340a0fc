//! Command-line front end.
//!
//! Exit codes: 0 on success, 1 for usage errors (unknown flags, invalid
//! parameter values), 2 for data errors (unreadable or malformed inputs,
//! empty corpora, no vocabulary overlap, ...).

use std::ffi::OsString;
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};

use crate::corpus::{Corpus, StopwordList};
use crate::embedding::EmbeddingStore;
use crate::error::{Error, Result};
use crate::eval::{evaluate, LabeledDataset};
use crate::fusion::{
    extend_out_of_sample, fuse, fuse_pca, Activation, AutoencoderConfig, FusionInput, FusionMethod,
    FusionOptions, DEFAULT_TARGET_DIM,
};
use crate::manifest::Manifest;
use crate::pipeline::{end_to_end, PipelineConfig};
use crate::similarity::{
    library_distribution, rank_embeddings, rbf_similarity_with, task_distribution, tfidf_cosine,
    KernelOptions, RankMethod, RankOptions,
};
use crate::weighting::{library_weights, task_weights, top_alpha_words, CorpusLibrary, Selection};

/// Environment variable capping worker threads (0 or unset = automatic).
pub const THREADS_ENV: &str = "EMBFUSE_THREADS";

#[derive(Debug, Parser)]
#[command(
    name = "embfuse",
    version,
    about = "Rank and fuse domain-specific word embeddings"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Words of one corpus ranked by specificity weight.
    Topwords(TopwordsArgs),
    /// Pairwise kernel similarities between library corpora (and a task).
    Similarity(SimilarityArgs),
    /// Rank library embeddings against a task corpus.
    Rank(RankArgs),
    /// Combine embeddings into one.
    Fuse(FuseArgs),
    /// Evaluate an embedding on a labeled dataset.
    Eval(EvalArgs),
    /// Rank, fuse the top embeddings, and evaluate, writing all artifacts.
    Pipeline(PipelineArgs),
}

#[derive(Debug, Args)]
struct LibraryArgs {
    /// Library manifest (JSON).
    #[arg(long)]
    library: PathBuf,
    /// Minimum word count; defaults to the manifest value.
    #[arg(long)]
    min_count: Option<u64>,
    /// Stopword file, one word per line; defaults to the manifest or built-in list.
    #[arg(long)]
    stopwords: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct KernelArgs {
    /// Words per corpus distribution.
    #[arg(long)]
    k: Option<usize>,
    /// RBF bandwidth.
    #[arg(long)]
    sigma: Option<f64>,
    /// Choose distribution support by frequency or by weight.
    #[arg(long, default_value = "frequency", value_parser = parse_selection)]
    select_by: Selection,
    /// Accumulate kernel sums in log space.
    #[arg(long)]
    log_domain: bool,
    /// Scale generic vectors to unit norm first.
    #[arg(long)]
    normalize_vectors: bool,
}

#[derive(Debug, Args)]
struct TopwordsArgs {
    #[command(flatten)]
    library: LibraryArgs,
    /// Library entry to report.
    #[arg(long, conflicts_with = "task", required_unless_present = "task")]
    entry: Option<String>,
    /// Task corpus (file or directory) weighted against the library.
    #[arg(long)]
    task: Option<PathBuf>,
    #[arg(long, default_value_t = 10)]
    n: usize,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct SimilarityArgs {
    #[command(flatten)]
    library: LibraryArgs,
    #[command(flatten)]
    kernel: KernelArgs,
    #[arg(long)]
    task: Option<PathBuf>,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct RankArgs {
    #[command(flatten)]
    library: LibraryArgs,
    #[command(flatten)]
    kernel: KernelArgs,
    /// Task corpus: a text file (one document per line) or a directory.
    #[arg(long)]
    task: PathBuf,
    #[arg(long, default_value = "rbf", value_parser = parse_rank_method)]
    method: RankMethod,
    /// Print only the first n embeddings.
    #[arg(long)]
    top: Option<usize>,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct FuseArgs {
    #[arg(long, value_parser = parse_fusion_method)]
    method: FusionMethod,
    /// Embeddings in ranking order.
    #[arg(long, num_args = 1.., required = true)]
    inputs: Vec<PathBuf>,
    /// Target corpus; its vocabulary is the output vocabulary.
    #[arg(long)]
    task: PathBuf,
    #[arg(long, default_value_t = DEFAULT_TARGET_DIM)]
    target_dim: usize,
    #[arg(long, default_value_t = 42)]
    seed: u64,
    #[arg(long, default_value_t = 200)]
    epochs: usize,
    #[arg(long, default_value_t = 0.01)]
    lr: f64,
    #[arg(long, default_value = "tanh", value_parser = parse_activation)]
    activation: Activation,
    #[arg(long, default_value_t = crate::corpus::DEFAULT_MIN_COUNT)]
    min_count: u64,
    /// With --method pca, also project words outside the task vocabulary.
    #[arg(long)]
    project_all: bool,
    /// Output word2vec file; the JSON sidecar goes next to it.
    #[arg(long)]
    out: PathBuf,
}

#[derive(Debug, Args)]
struct EvalArgs {
    /// TSV lines `label<TAB>text`.
    #[arg(long)]
    dataset: PathBuf,
    #[arg(long)]
    embedding: PathBuf,
    #[arg(long, default_value_t = crate::eval::DEFAULT_RUNS)]
    runs: usize,
    #[arg(long, default_value_t = crate::eval::DEFAULT_SPLIT)]
    split: f64,
    #[arg(long, default_value_t = 42)]
    seed: u64,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct PipelineArgs {
    #[arg(long)]
    library: PathBuf,
    /// Labeled task dataset (`label<TAB>text`); its text is the task corpus.
    #[arg(long)]
    task: PathBuf,
    /// Number of top-ranked embeddings to fuse.
    #[arg(long, default_value_t = 2)]
    top: usize,
    #[arg(long, default_value = "pca", value_parser = parse_fusion_method)]
    method: FusionMethod,
    #[arg(long)]
    target_dim: Option<usize>,
    #[arg(long)]
    min_count: Option<u64>,
    #[command(flatten)]
    kernel: KernelArgs,
    #[arg(long, default_value_t = 42)]
    seed: u64,
    #[arg(long, default_value_t = 200)]
    epochs: usize,
    #[arg(long, default_value_t = 0.01)]
    lr: f64,
    #[arg(long, default_value = "tanh", value_parser = parse_activation)]
    activation: Activation,
    #[arg(long, default_value_t = crate::eval::DEFAULT_RUNS)]
    runs: usize,
    #[arg(long, default_value_t = crate::eval::DEFAULT_SPLIT)]
    split: f64,
    #[arg(long)]
    out_dir: PathBuf,
}

fn parse_selection(s: &str) -> std::result::Result<Selection, String> {
    s.parse().map_err(|e: Error| e.to_string())
}

fn parse_rank_method(s: &str) -> std::result::Result<RankMethod, String> {
    s.parse().map_err(|e: Error| e.to_string())
}

fn parse_fusion_method(s: &str) -> std::result::Result<FusionMethod, String> {
    s.parse().map_err(|e: Error| e.to_string())
}

fn parse_activation(s: &str) -> std::result::Result<Activation, String> {
    s.parse().map_err(|e: Error| e.to_string())
}

/// Runs the CLI with process stdout/stderr and returns the exit code.
pub fn run<I, T>(argv: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let stdout = std::io::stdout();
    let stderr = std::io::stderr();
    run_with_io(argv, &mut stdout.lock(), &mut stderr.lock())
}

pub fn run_with_io<I, T>(argv: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let rendered = e.render().to_string();
            let _ = if code == 0 {
                out.write_all(rendered.as_bytes())
            } else {
                err.write_all(rendered.as_bytes())
            };
            return code;
        }
    };

    let threads = std::env::var(THREADS_ENV)
        .ok()
        .and_then(|v| v.trim().parse::<usize>().ok())
        .unwrap_or(0);
    let pool = match rayon::ThreadPoolBuilder::new().num_threads(threads).build() {
        Ok(pool) => pool,
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            return 2;
        }
    };

    match pool.install(|| dispatch(cli.command)) {
        Ok(text) => match out.write_all(text.as_bytes()) {
            Ok(()) => 0,
            Err(e) => {
                let _ = writeln!(err, "error: {e}");
                2
            }
        },
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            match e {
                Error::InvalidParameter(_) => 1,
                _ => 2,
            }
        }
    }
}

/// Runs one subcommand and returns what should go to stdout.
fn dispatch(command: Command) -> Result<String> {
    match command {
        Command::Topwords(args) => emit(args.out.as_deref(), topwords(&args)?),
        Command::Similarity(args) => emit(args.out.as_deref(), similarity(&args)?),
        Command::Rank(args) => emit(args.out.as_deref(), rank(&args)?),
        Command::Fuse(args) => fuse_cmd(&args),
        Command::Eval(args) => eval_cmd(&args),
        Command::Pipeline(args) => pipeline_cmd(&args),
    }
}

fn emit(path: Option<&Path>, text: String) -> Result<String> {
    match path {
        Some(p) => fs::write(p, text)
            .map(|_| String::new())
            .map_err(|e| Error::io(p, e)),
        None => Ok(text),
    }
}

struct LoadedLibrary {
    manifest: Manifest,
    library: CorpusLibrary,
    stopwords: StopwordList,
    min_count: u64,
}

fn load_library(args: &LibraryArgs, normalize: bool) -> Result<LoadedLibrary> {
    let manifest = Manifest::load(&args.library)?;
    let min_count = args.min_count.unwrap_or(manifest.defaults.min_count);
    let mut library = manifest.load_library(min_count)?;
    if normalize {
        let g = library.generic().normalized();
        library = library.with_generic(g);
    }
    let stopwords = match &args.stopwords {
        Some(p) => StopwordList::load(p)?,
        None => manifest.stopwords()?,
    };
    Ok(LoadedLibrary {
        manifest,
        library,
        stopwords,
        min_count,
    })
}

fn load_task(path: &Path, min_count: u64) -> Result<Corpus> {
    let name = path
        .file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_else(|| "task".into());
    Corpus::load(path, name, min_count)
}

fn rank_options(kernel: &KernelArgs, manifest: &Manifest) -> RankOptions {
    RankOptions {
        k: kernel.k.unwrap_or(manifest.defaults.k),
        kernel: KernelOptions {
            sigma: kernel.sigma.unwrap_or(manifest.defaults.sigma),
            log_domain: kernel.log_domain,
        },
        selection: kernel.select_by,
    }
}

fn topwords(args: &TopwordsArgs) -> Result<String> {
    if args.n == 0 {
        return Err(Error::invalid("--n must be at least 1"));
    }
    let lib = load_library(&args.library, false)?;
    let weights = match (&args.entry, &args.task) {
        (Some(name), _) => {
            let i = lib
                .library
                .index_of(name)
                .ok_or_else(|| Error::Manifest(format!("no entry named '{name}'")))?;
            library_weights(&lib.library, i)?
        }
        (None, Some(task)) => task_weights(&lib.library, &load_task(task, lib.min_count)?)?,
        (None, None) => return Err(Error::invalid("either --entry or --task is required")),
    };
    Ok(top_alpha_words(&weights, args.n)
        .into_iter()
        .enumerate()
        .map(|(i, (w, a))| format!("{}\t{w}\t{a:.16e}\n", i + 1))
        .collect())
}

fn similarity(args: &SimilarityArgs) -> Result<String> {
    let lib = load_library(&args.library, args.kernel.normalize_vectors)?;
    let opts = rank_options(&args.kernel, &lib.manifest);
    let mut dists = (0..lib.library.len())
        .map(|i| library_distribution(&lib.library, i, &lib.stopwords, &opts))
        .collect::<Result<Vec<_>>>()?;
    if let Some(task) = &args.task {
        let task = load_task(task, lib.min_count)?;
        dists.push(task_distribution(
            &lib.library,
            &task,
            &lib.stopwords,
            &opts,
        )?);
    }
    let mut text = String::new();
    for i in 0..dists.len() {
        for j in i..dists.len() {
            let s = rbf_similarity_with(&dists[i], &dists[j], opts.kernel)?;
            text.push_str(&format!(
                "{}\t{}\t{:.16e}\n",
                dists[i].name(),
                dists[j].name(),
                s.value
            ));
        }
    }
    Ok(text)
}

fn rank(args: &RankArgs) -> Result<String> {
    let lib = load_library(&args.library, args.kernel.normalize_vectors)?;
    let task = load_task(&args.task, lib.min_count)?;
    let ranking = match args.method {
        RankMethod::Rbf => {
            let opts = rank_options(&args.kernel, &lib.manifest);
            rank_embeddings(&lib.library, &task, &lib.stopwords, &opts)?
        }
        RankMethod::Tfidf => tfidf_cosine(&lib.library, &task)?,
    };
    Ok(ranking.to_tsv(args.top))
}

fn fuse_cmd(args: &FuseArgs) -> Result<String> {
    let stores = args
        .inputs
        .iter()
        .map(EmbeddingStore::load)
        .collect::<Result<Vec<_>>>()?;
    let task = load_task(&args.task, args.min_count)?;
    let input = FusionInput::for_corpus(stores, &task)?;

    let fused = if args.project_all {
        if args.method != FusionMethod::Pca {
            return Err(Error::invalid("--project-all requires --method pca"));
        }
        let (fused, model) = fuse_pca(&input, args.target_dim)?;
        extend_out_of_sample(&fused, &model, input.stores())?
    } else {
        let opts = FusionOptions {
            target_dim: args.target_dim,
            autoencoder: AutoencoderConfig {
                seed: args.seed,
                epochs: args.epochs,
                learning_rate: args.lr,
                activation: args.activation,
            },
        };
        fuse(args.method, &input, &opts)?
    };

    fused.store.save(&args.out)?;
    let sidecar_path = args.out.with_extension("json");
    let sidecar = serde_json::to_string_pretty(&fused.sidecar())? + "\n";
    fs::write(&sidecar_path, sidecar).map_err(|e| Error::io(&sidecar_path, e))?;
    Ok(format!(
        "wrote {} words x {} dims to {}\n",
        fused.store.len(),
        fused.out_dim(),
        args.out.display()
    ))
}

fn eval_cmd(args: &EvalArgs) -> Result<String> {
    let dataset = LabeledDataset::load(&args.dataset)?;
    let store = EmbeddingStore::load(&args.embedding)?;
    let report = evaluate(&dataset, &store, args.runs, args.split, args.seed)?;
    emit(
        args.out.as_deref(),
        serde_json::to_string_pretty(&report)? + "\n",
    )
}

fn pipeline_cmd(args: &PipelineArgs) -> Result<String> {
    let manifest = Manifest::load(&args.library)?;
    let config = PipelineConfig {
        top_k_embeddings: args.top,
        method: args.method,
        k: args.kernel.k,
        sigma: args.kernel.sigma,
        target_dim: args.target_dim,
        min_count: args.min_count,
        selection: args.kernel.select_by,
        log_domain: args.kernel.log_domain,
        normalize_vectors: args.kernel.normalize_vectors,
        seed: args.seed,
        epochs: args.epochs,
        learning_rate: args.lr,
        activation: args.activation,
        runs: args.runs,
        split: args.split,
    };
    let result = end_to_end(&manifest, &args.library, &args.task, &config)?;
    result.write(&args.out_dir)?;
    Ok(format!(
        "selected {} -> {} (mean accuracy {:.4})\n",
        result.provenance.selected.join(", "),
        args.out_dir.display(),
        result.report.mean_accuracy
    ))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn run_capture(args: &[&str]) -> (i32, String, String) {
        let mut out = Vec::new();
        let mut err = Vec::new();
        let code = run_with_io(
            std::iter::once("embfuse").chain(args.iter().copied()),
            &mut out,
            &mut err,
        );
        (
            code,
            String::from_utf8(out).unwrap(),
            String::from_utf8(err).unwrap(),
        )
    }

    #[test]
    fn unknown_subcommand_is_a_usage_error() {
        let (code, _, err) = run_capture(&["frobnicate"]);
        assert_eq!(code, 1);
        assert!(!err.is_empty());
    }

    #[test]
    fn unknown_flag_is_a_usage_error() {
        assert_eq!(run_capture(&["rank", "--bogus"]).0, 1);
        assert_eq!(
            run_capture(&[
                "fuse", "--method", "median", "--inputs", "a", "--task", "t", "--out", "o"
            ])
            .0,
            1
        );
    }

    #[test]
    fn help_exits_cleanly() {
        let (code, out, _) = run_capture(&["--help"]);
        assert_eq!(code, 0);
        assert!(out.contains("rank"));
    }

    #[test]
    fn missing_files_are_data_errors() {
        let (code, _, err) = run_capture(&[
            "eval",
            "--dataset",
            "/nonexistent.tsv",
            "--embedding",
            "/nope.vec",
        ]);
        assert_eq!(code, 2);
        assert!(err.contains("nonexistent"));
    }
}
