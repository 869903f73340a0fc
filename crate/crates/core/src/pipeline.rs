//! Rank, fuse, and evaluate in one pass.

use std::fs;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::corpus::build_corpus;
use crate::error::{Error, Result};
use crate::eval::{evaluate, EvalReport, LabeledDataset, DEFAULT_RUNS, DEFAULT_SPLIT};
use crate::fusion::{
    fuse, FusedEmbedding, FusionInput, FusionMethod, FusionOptions, FusionSidecar,
};
use crate::manifest::Manifest;
use crate::similarity::{rank_embeddings, KernelOptions, RankOptions, Ranking};
use crate::weighting::Selection;

/// Everything besides the manifest and the task that determines a run.
/// Unset fields fall back to the manifest defaults.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PipelineConfig {
    pub top_k_embeddings: usize,
    pub method: FusionMethod,
    pub k: Option<usize>,
    pub sigma: Option<f64>,
    pub target_dim: Option<usize>,
    pub min_count: Option<u64>,
    pub selection: Selection,
    pub log_domain: bool,
    pub normalize_vectors: bool,
    pub seed: u64,
    pub epochs: usize,
    pub learning_rate: f64,
    pub activation: crate::fusion::Activation,
    pub runs: usize,
    pub split: f64,
}

impl Default for PipelineConfig {
    fn default() -> Self {
        let ae = crate::fusion::AutoencoderConfig::default();
        Self {
            top_k_embeddings: 2,
            method: FusionMethod::Pca,
            k: None,
            sigma: None,
            target_dim: None,
            min_count: None,
            selection: Selection::Frequency,
            log_domain: false,
            normalize_vectors: false,
            seed: 42,
            epochs: ae.epochs,
            learning_rate: ae.learning_rate,
            activation: ae.activation,
            runs: DEFAULT_RUNS,
            split: DEFAULT_SPLIT,
        }
    }
}

/// Ties the three outputs of a run to its inputs.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Provenance {
    pub manifest: PathBuf,
    pub task: PathBuf,
    pub config: PipelineConfig,
    /// Fused embeddings, in ranking order.
    pub selected: Vec<String>,
    pub ranking: Ranking,
    pub fusion: FusionSidecar,
    pub eval: EvalReport,
}

#[derive(Debug, Clone)]
pub struct PipelineOutput {
    pub ranking: Ranking,
    pub fused: FusedEmbedding,
    pub report: EvalReport,
    pub provenance: Provenance,
}

impl PipelineOutput {
    /// Writes `ranking.tsv`, `fused.vec`, `fused.json`, `eval.json`, and
    /// `provenance.json` into `dir`.
    pub fn write(&self, dir: impl AsRef<Path>) -> Result<()> {
        let dir = dir.as_ref();
        fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
        let put = |name: &str, text: String| -> Result<()> {
            let p = dir.join(name);
            fs::write(&p, text).map_err(|e| Error::io(&p, e))
        };
        put("ranking.tsv", self.ranking.to_tsv(None))?;
        self.fused.store.save(dir.join("fused.vec"))?;
        put(
            "fused.json",
            serde_json::to_string_pretty(&self.fused.sidecar())? + "\n",
        )?;
        put(
            "eval.json",
            serde_json::to_string_pretty(&self.report)? + "\n",
        )?;
        put(
            "provenance.json",
            serde_json::to_string_pretty(&self.provenance)? + "\n",
        )?;
        Ok(())
    }
}

/// Ranks the library against the labeled task's text, fuses the top
/// embeddings over the task vocabulary, and evaluates the result on the task.
pub fn end_to_end(
    manifest: &Manifest,
    manifest_path: &Path,
    task_path: &Path,
    config: &PipelineConfig,
) -> Result<PipelineOutput> {
    let n = manifest.entries.len();
    if config.top_k_embeddings == 0 || config.top_k_embeddings > n {
        return Err(Error::invalid(format!(
            "top_k_embeddings must be between 1 and the library size {n}"
        )));
    }
    let defaults = &manifest.defaults;
    let min_count = config.min_count.unwrap_or(defaults.min_count);

    let dataset = LabeledDataset::load(task_path)?;
    let documents: Vec<&str> = dataset.documents().collect();
    let task = build_corpus(dataset.name(), &documents, min_count)?;

    let mut library = manifest.load_library(min_count)?;
    if config.normalize_vectors {
        let g = library.generic().normalized();
        library = library.with_generic(g);
    }
    let stopwords = manifest.stopwords()?;
    let rank_opts = RankOptions {
        k: config.k.unwrap_or(defaults.k),
        kernel: KernelOptions {
            sigma: config.sigma.unwrap_or(defaults.sigma),
            log_domain: config.log_domain,
        },
        selection: config.selection,
    };
    let ranking = rank_embeddings(&library, &task, &stopwords, &rank_opts)?;

    let selected: Vec<String> = ranking
        .top(config.top_k_embeddings)
        .iter()
        .map(|e| e.name.clone())
        .collect();
    let stores = selected
        .iter()
        .map(|name| manifest.load_embedding(name))
        .collect::<Result<Vec<_>>>()?;
    let input = FusionInput::for_corpus(stores, &task)?;
    let fusion_opts = FusionOptions {
        target_dim: config.target_dim.unwrap_or(defaults.target_dim),
        autoencoder: crate::fusion::AutoencoderConfig {
            seed: config.seed,
            epochs: config.epochs,
            learning_rate: config.learning_rate,
            activation: config.activation,
        },
    };
    let fused = fuse(config.method, &input, &fusion_opts)?;
    let report = evaluate(
        &dataset,
        &fused.store,
        config.runs,
        config.split,
        config.seed,
    )?;

    let provenance = Provenance {
        manifest: manifest_path.to_path_buf(),
        task: task_path.to_path_buf(),
        config: config.clone(),
        selected,
        ranking: ranking.clone(),
        fusion: fused.sidecar(),
        eval: report.clone(),
    };
    Ok(PipelineOutput {
        ranking,
        fused,
        report,
        provenance,
    })
}
