//! Combining several embeddings into one.
//!
//! All methods operate on a shared, ordered vocabulary. For each word the
//! per-store vectors are looked up with zero-fill for words a store does not
//! know, so rows stay aligned across stores.

use std::fmt;
use std::str::FromStr;

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use crate::corpus::Corpus;
use crate::embedding::{EmbeddingStore, OovPolicy};
use crate::error::{Error, Result};

pub mod autoencoder;
pub mod pca;

pub use autoencoder::{Activation, Autoencoder, AutoencoderConfig};
pub use pca::PcaModel;

/// Output dimension of the reducing methods when none is given.
pub const DEFAULT_TARGET_DIM: usize = 300;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum FusionMethod {
    Concat,
    Average,
    Pca,
    Autoencoder,
}

impl FromStr for FusionMethod {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "concat" => Ok(FusionMethod::Concat),
            "average" => Ok(FusionMethod::Average),
            "pca" => Ok(FusionMethod::Pca),
            "autoencoder" => Ok(FusionMethod::Autoencoder),
            other => Err(Error::invalid(format!("unknown fusion method '{other}'"))),
        }
    }
}

impl fmt::Display for FusionMethod {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            FusionMethod::Concat => "concat",
            FusionMethod::Average => "average",
            FusionMethod::Pca => "pca",
            FusionMethod::Autoencoder => "autoencoder",
        })
    }
}

/// Stores to combine, in ranking order, and the words to emit.
#[derive(Debug, Clone)]
pub struct FusionInput {
    stores: Vec<EmbeddingStore>,
    vocab: Vec<String>,
}

impl FusionInput {
    pub fn new(stores: Vec<EmbeddingStore>, vocab: Vec<String>) -> Result<Self> {
        if stores.is_empty() {
            return Err(Error::invalid("fusion needs at least one embedding"));
        }
        if vocab.is_empty() {
            return Err(Error::invalid("fusion vocabulary is empty"));
        }
        Ok(Self { stores, vocab })
    }

    /// Vocabulary = words of `corpus` known to at least one store, in
    /// lexicographic order.
    pub fn for_corpus(stores: Vec<EmbeddingStore>, corpus: &Corpus) -> Result<Self> {
        let vocab = corpus
            .words()
            .filter(|w| stores.iter().any(|s| s.contains(w)))
            .map(str::to_string)
            .collect();
        Self::new(stores, vocab)
    }

    pub fn stores(&self) -> &[EmbeddingStore] {
        &self.stores
    }

    pub fn vocab(&self) -> &[String] {
        &self.vocab
    }

    pub fn source_names(&self) -> Vec<String> {
        self.stores.iter().map(|s| s.name().to_string()).collect()
    }

    pub fn concat_dim(&self) -> usize {
        self.stores.iter().map(EmbeddingStore::dim).sum()
    }

    /// Concatenated, zero-filled vector of one word.
    pub fn concat_row(&self, word: &str) -> Vec<f64> {
        concat_row(&self.stores, word)
    }

    /// Concatenated rows for every vocabulary word.
    pub fn concat_matrix(&self) -> DMatrix<f64> {
        let cols = self.concat_dim();
        let mut data = Vec::with_capacity(self.vocab.len() * cols);
        for w in &self.vocab {
            data.extend(self.concat_row(w));
        }
        DMatrix::from_row_slice(self.vocab.len(), cols, &data)
    }
}

fn concat_row(stores: &[EmbeddingStore], word: &str) -> Vec<f64> {
    let mut row = Vec::with_capacity(stores.iter().map(EmbeddingStore::dim).sum());
    for s in stores {
        if let Some(v) = s.lookup(word, OovPolicy::Zero) {
            row.extend_from_slice(&v);
        }
    }
    row
}

/// Metadata written next to a fused embedding.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FusionSidecar {
    pub method: FusionMethod,
    pub sources: Vec<String>,
    pub out_dim: usize,
    pub seed: Option<u64>,
    pub training_loss_final: Option<f64>,
    /// Set when words outside the fitting vocabulary were projected with a
    /// previously learned map.
    #[serde(default)]
    pub out_of_sample: bool,
}

#[derive(Debug, Clone)]
pub struct FusedEmbedding {
    pub store: EmbeddingStore,
    pub method: FusionMethod,
    pub sources: Vec<String>,
    pub seed: Option<u64>,
    pub loss_curve: Vec<f64>,
    pub out_of_sample: bool,
}

impl FusedEmbedding {
    pub fn out_dim(&self) -> usize {
        self.store.dim()
    }

    pub fn sidecar(&self) -> FusionSidecar {
        FusionSidecar {
            method: self.method,
            sources: self.sources.clone(),
            out_dim: self.out_dim(),
            seed: self.seed,
            training_loss_final: self.loss_curve.last().copied(),
            out_of_sample: self.out_of_sample,
        }
    }
}

fn fused_name(method: FusionMethod, sources: &[String]) -> String {
    format!("{method}({})", sources.join("+"))
}

fn store_from_rows(
    method: FusionMethod,
    sources: &[String],
    vocab: &[String],
    rows: &DMatrix<f64>,
) -> Result<EmbeddingStore> {
    let dim = rows.ncols();
    EmbeddingStore::from_vectors(
        fused_name(method, sources),
        dim,
        vocab
            .iter()
            .enumerate()
            .map(|(i, w)| (w.clone(), rows.row(i).iter().copied().collect())),
    )
}

/// Concatenates the per-store vectors of every vocabulary word.
pub fn fuse_concat(input: &FusionInput) -> Result<FusedEmbedding> {
    let sources = input.source_names();
    let store = store_from_rows(
        FusionMethod::Concat,
        &sources,
        input.vocab(),
        &input.concat_matrix(),
    )?;
    Ok(FusedEmbedding {
        store,
        method: FusionMethod::Concat,
        sources,
        seed: None,
        loss_curve: Vec::new(),
        out_of_sample: false,
    })
}

/// Arithmetic mean of the per-store vectors; all stores must share a dimension.
pub fn fuse_average(input: &FusionInput) -> Result<FusedEmbedding> {
    let stores = input.stores();
    if stores.len() < 2 {
        return Err(Error::invalid("averaging needs at least two embeddings"));
    }
    let dim = stores[0].dim();
    if let Some(s) = stores.iter().find(|s| s.dim() != dim) {
        return Err(Error::DimensionMismatch {
            expected: dim,
            found: s.dim(),
        });
    }
    let k = stores.len() as f64;
    let sources = input.source_names();
    let vectors = input.vocab().iter().map(|w| {
        let mut sum = vec![0.0; dim];
        for s in stores {
            if let Some(v) = s.get(w) {
                sum.iter_mut().zip(v).for_each(|(acc, x)| *acc += x);
            }
        }
        (w.clone(), sum.into_iter().map(|x| x / k).collect())
    });
    let store =
        EmbeddingStore::from_vectors(fused_name(FusionMethod::Average, &sources), dim, vectors)?;
    Ok(FusedEmbedding {
        store,
        method: FusionMethod::Average,
        sources,
        seed: None,
        loss_curve: Vec::new(),
        out_of_sample: false,
    })
}

/// Projects the centered concatenation onto its top `target_dim` principal
/// directions. Returns the fitted model alongside the embedding so other
/// words can be projected later.
pub fn fuse_pca(input: &FusionInput, target_dim: usize) -> Result<(FusedEmbedding, PcaModel)> {
    let x = input.concat_matrix();
    let model = PcaModel::fit(&x, target_dim)?;
    let projected = model.transform(&x);
    let sources = input.source_names();
    let store = store_from_rows(FusionMethod::Pca, &sources, input.vocab(), &projected)?;
    Ok((
        FusedEmbedding {
            store,
            method: FusionMethod::Pca,
            sources,
            seed: None,
            loss_curve: Vec::new(),
            out_of_sample: false,
        },
        model,
    ))
}

/// Trains a one-hidden-layer autoencoder on the standardized concatenation
/// and emits the encoder activations.
pub fn fuse_autoencoder(
    input: &FusionInput,
    target_dim: usize,
    config: &AutoencoderConfig,
) -> Result<(FusedEmbedding, Autoencoder)> {
    let x = input.concat_matrix();
    let model = Autoencoder::train(&x, target_dim, config)?;
    let encoded = model.encode(&x);
    let sources = input.source_names();
    let store = store_from_rows(FusionMethod::Autoencoder, &sources, input.vocab(), &encoded)?;
    Ok((
        FusedEmbedding {
            store,
            method: FusionMethod::Autoencoder,
            sources,
            seed: Some(config.seed),
            loss_curve: model.loss_curve().to_vec(),
            out_of_sample: false,
        },
        model,
    ))
}

/// Parameters of the reducing methods.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FusionOptions {
    pub target_dim: usize,
    pub autoencoder: AutoencoderConfig,
}

impl Default for FusionOptions {
    fn default() -> Self {
        Self {
            target_dim: DEFAULT_TARGET_DIM,
            autoencoder: AutoencoderConfig::default(),
        }
    }
}

/// Runs `method` on `input`, discarding any fitted model.
pub fn fuse(
    method: FusionMethod,
    input: &FusionInput,
    opts: &FusionOptions,
) -> Result<FusedEmbedding> {
    match method {
        FusionMethod::Concat => fuse_concat(input),
        FusionMethod::Average => fuse_average(input),
        FusionMethod::Pca => fuse_pca(input, opts.target_dim).map(|(f, _)| f),
        FusionMethod::Autoencoder => {
            fuse_autoencoder(input, opts.target_dim, &opts.autoencoder).map(|(f, _)| f)
        }
    }
}

/// Adds every word known to `stores` but missing from `fused`, projected
/// with a PCA map fitted on the original vocabulary.
pub fn extend_out_of_sample(
    fused: &FusedEmbedding,
    model: &PcaModel,
    stores: &[EmbeddingStore],
) -> Result<FusedEmbedding> {
    let mut words: Vec<&str> = stores.iter().flat_map(|s| s.words()).collect();
    words.sort_unstable();
    words.dedup();

    let mut added = false;
    let mut vectors: Vec<(String, Vec<f64>)> = fused
        .store
        .iter()
        .map(|(w, v)| (w.to_string(), v.to_vec()))
        .collect();
    for w in words {
        if fused.store.contains(w) {
            continue;
        }
        let row = concat_row(stores, w);
        if row.len() != model.input_dim() {
            return Err(Error::DimensionMismatch {
                expected: model.input_dim(),
                found: row.len(),
            });
        }
        vectors.push((w.to_string(), model.project_row(&row)));
        added = true;
    }
    let store = EmbeddingStore::from_vectors(fused.store.name(), fused.out_dim(), vectors)?;
    Ok(FusedEmbedding {
        store,
        out_of_sample: fused.out_of_sample || added,
        ..fused.clone()
    })
}
