//! Rank a library of domain-specific word embeddings by how well their
//! training corpora match a target corpus, then fuse the best ones into a
//! single embedding.
//!
//! The pipeline has two halves:
//!
//! * **Ranking.** Every corpus becomes a probability distribution over the
//!   vectors of a shared generic embedding, with mass proportional to how
//!   specific each word is to that corpus ([`weighting`]). Two corpora are
//!   compared with the expected RBF kernel value between their
//!   distributions ([`similarity`]).
//! * **Fusion.** The top-ranked embeddings are concatenated, averaged, or
//!   reduced with PCA or an autoencoder over the target corpus vocabulary
//!   ([`fusion`]).
//!
//! [`eval`] measures a resulting embedding on binary document
//! classification, and [`pipeline`] ties everything together behind a JSON
//! manifest.

pub mod cli;
pub mod corpus;
pub mod embedding;
pub mod error;
pub mod eval;
pub mod fusion;
pub mod manifest;
pub mod pipeline;
pub mod similarity;
pub mod synthetic;
pub mod weighting;

pub use corpus::{build_corpus, tokenize, Corpus, StopwordList};
pub use embedding::{EmbeddingStore, OovPolicy};
pub use error::{Error, Result};
pub use eval::{evaluate, featurize, EvalReport, LabeledDataset};
pub use fusion::{
    fuse, fuse_autoencoder, fuse_average, fuse_concat, fuse_pca, FusedEmbedding, FusionInput,
    FusionMethod,
};
pub use manifest::Manifest;
pub use pipeline::{end_to_end, PipelineConfig, PipelineOutput};
pub use similarity::{
    rank_embeddings, rbf_similarity, tfidf_cosine, RankMethod, Ranking, SimilarityScore,
};
pub use weighting::{
    library_weights, task_weights, to_distribution, top_alpha_words, CorpusLibrary, Selection,
    WeightTable, WordDistribution,
};
