//! Word-specificity weights and the corpus distributions built from them.
//!
//! For a word `w` of library corpus `T_i`,
//!
//! ```text
//! alpha_i(w) = (#T_i(w) / sum_j #T_j(w)) * (sum_j |T_j| / |T_i|)
//! ```
//!
//! i.e. the frequency of `w` in `T_i` relative to its frequency across the
//! whole library. A task corpus `T` outside the library uses the same ratio
//! with its own count and length in the numerators while the sums run over
//! library corpora only; task words that no library corpus contains get no
//! weight at all.
//!
//! A weight table turns into a [`WordDistribution`] by selecting a word set,
//! attaching each word's vector from the generic embedding, and normalizing
//! the weights to probabilities.

use std::collections::{BTreeMap, HashMap, HashSet};
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::corpus::{Corpus, StopwordList};
use crate::embedding::EmbeddingStore;
use crate::error::{Error, Result};

/// Number of words per distribution when none is given.
pub const DEFAULT_SUPPORT_SIZE: usize = 500;

/// Domain corpora plus the generic embedding that places all of their words
/// in one vector space.
#[derive(Debug, Clone)]
pub struct CorpusLibrary {
    corpora: Vec<Corpus>,
    generic: EmbeddingStore,
    word_totals: HashMap<String, u64>,
    total_length: u64,
}

impl CorpusLibrary {
    pub fn new(corpora: Vec<Corpus>, generic: EmbeddingStore) -> Result<Self> {
        if corpora.is_empty() {
            return Err(Error::invalid("library needs at least one corpus"));
        }
        let mut seen = HashSet::new();
        for c in &corpora {
            if !seen.insert(c.name()) {
                return Err(Error::invalid(format!(
                    "duplicate library name '{}'",
                    c.name()
                )));
            }
        }

        let mut word_totals = HashMap::new();
        let mut total_length = 0u64;
        for c in &corpora {
            total_length += c.total_tokens();
            for (w, &n) in c.counts() {
                *word_totals.entry(w.clone()).or_insert(0) += n;
            }
        }
        Ok(Self {
            corpora,
            generic,
            word_totals,
            total_length,
        })
    }

    pub fn corpora(&self) -> &[Corpus] {
        &self.corpora
    }

    pub fn corpus(&self, i: usize) -> Option<&Corpus> {
        self.corpora.get(i)
    }

    pub fn index_of(&self, name: &str) -> Option<usize> {
        self.corpora.iter().position(|c| c.name() == name)
    }

    pub fn generic(&self) -> &EmbeddingStore {
        &self.generic
    }

    pub fn len(&self) -> usize {
        self.corpora.len()
    }

    pub fn is_empty(&self) -> bool {
        self.corpora.is_empty()
    }

    /// `sum_j |T_j|` over the library.
    pub fn total_length(&self) -> u64 {
        self.total_length
    }

    /// `sum_j #T_j(w)` over the library.
    pub fn library_count(&self, word: &str) -> u64 {
        self.word_totals.get(word).copied().unwrap_or(0)
    }

    /// Replaces the generic embedding, keeping the corpora.
    pub fn with_generic(mut self, generic: EmbeddingStore) -> Self {
        self.generic = generic;
        self
    }
}

/// Non-negative weight per word for one corpus.
#[derive(Debug, Clone, PartialEq)]
pub struct WeightTable {
    owner: String,
    weights: BTreeMap<String, f64>,
}

impl WeightTable {
    pub fn new(owner: impl Into<String>, weights: BTreeMap<String, f64>) -> Result<Self> {
        if weights.values().any(|w| !w.is_finite() || *w < 0.0) {
            return Err(Error::invalid("weights must be finite and non-negative"));
        }
        Ok(Self {
            owner: owner.into(),
            weights,
        })
    }

    pub fn owner(&self) -> &str {
        &self.owner
    }

    pub fn get(&self, word: &str) -> Option<f64> {
        self.weights.get(word).copied()
    }

    pub fn len(&self) -> usize {
        self.weights.len()
    }

    pub fn is_empty(&self) -> bool {
        self.weights.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = (&str, f64)> {
        self.weights.iter().map(|(w, &a)| (w.as_str(), a))
    }
}

/// Weights of library corpus `i` (0-based) against the whole library.
pub fn library_weights(library: &CorpusLibrary, i: usize) -> Result<WeightTable> {
    let corpus = library.corpus(i).ok_or_else(|| {
        Error::invalid(format!(
            "corpus index {i} out of range for library of {}",
            library.len()
        ))
    })?;
    let length_ratio = library.total_length() as f64 / corpus.total_tokens() as f64;
    let weights = corpus
        .counts()
        .iter()
        .map(|(w, &n)| {
            let share = n as f64 / library.library_count(w) as f64;
            (w.clone(), share * length_ratio)
        })
        .collect();
    WeightTable::new(corpus.name(), weights)
}

/// Weights of a task corpus that is not part of the library.
pub fn task_weights(library: &CorpusLibrary, task: &Corpus) -> Result<WeightTable> {
    let length_ratio = library.total_length() as f64 / task.total_tokens() as f64;
    let weights: BTreeMap<String, f64> = task
        .counts()
        .iter()
        .filter_map(|(w, &n)| {
            let denom = library.library_count(w);
            (denom > 0).then(|| (w.clone(), (n as f64 / denom as f64) * length_ratio))
        })
        .collect();
    if weights.is_empty() {
        return Err(Error::NoVocabularyOverlap);
    }
    WeightTable::new(task.name(), weights)
}

/// The `n` heaviest words, descending by weight with lexicographic tie-break.
pub fn top_alpha_words(weights: &WeightTable, n: usize) -> Vec<(&str, f64)> {
    let mut all: Vec<(&str, f64)> = weights.iter().collect();
    // iter() is lexicographic; the stable sort keeps that order among ties.
    all.sort_by(|a, b| b.1.total_cmp(&a.1));
    all.truncate(n);
    all
}

/// How the support of a distribution is chosen.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Selection {
    /// Most frequent non-stop words of the corpus.
    #[default]
    Frequency,
    /// Non-stop words with the largest weights.
    Alpha,
}

impl FromStr for Selection {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "frequency" => Ok(Selection::Frequency),
            "alpha" => Ok(Selection::Alpha),
            other => Err(Error::invalid(format!("unknown selection '{other}'"))),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SupportWord {
    pub word: String,
    pub probability: f64,
    pub vector: Vec<f64>,
}

/// A discrete distribution over generic-embedding vectors.
#[derive(Debug, Clone, PartialEq)]
pub struct WordDistribution {
    name: String,
    dim: usize,
    support: Vec<SupportWord>,
}

impl WordDistribution {
    /// Normalizes `(word, weight, vector)` triples into a distribution.
    /// Entries with zero weight are dropped.
    pub fn from_weighted<I>(name: impl Into<String>, entries: I) -> Result<Self>
    where
        I: IntoIterator<Item = (String, f64, Vec<f64>)>,
    {
        let entries: Vec<_> = entries.into_iter().filter(|(_, a, _)| *a > 0.0).collect();
        let Some(dim) = entries.first().map(|(_, _, v)| v.len()) else {
            return Err(Error::EmptyDistribution);
        };
        if let Some((_, _, v)) = entries.iter().find(|(_, _, v)| v.len() != dim) {
            return Err(Error::DimensionMismatch {
                expected: dim,
                found: v.len(),
            });
        }
        if entries.iter().any(|(_, a, _)| !a.is_finite()) {
            return Err(Error::invalid("distribution weights must be finite"));
        }
        let total: f64 = entries.iter().map(|(_, a, _)| a).sum();
        let support = entries
            .into_iter()
            .map(|(word, a, vector)| SupportWord {
                word,
                probability: a / total,
                vector,
            })
            .collect();
        Ok(Self {
            name: name.into(),
            dim,
            support,
        })
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn support(&self) -> &[SupportWord] {
        &self.support
    }

    pub fn len(&self) -> usize {
        self.support.len()
    }

    pub fn is_empty(&self) -> bool {
        self.support.is_empty()
    }
}

/// Builds the distribution of `corpus` from its weight table.
///
/// Up to `k` non-stop words are selected (by frequency or by weight), words
/// without a generic vector or without a weight are then dropped, and the
/// remaining weights are normalized to sum to one.
pub fn to_distribution(
    weights: &WeightTable,
    corpus: &Corpus,
    stopwords: &StopwordList,
    k: usize,
    generic: &EmbeddingStore,
    selection: Selection,
) -> Result<WordDistribution> {
    if k == 0 {
        return Err(Error::invalid("support size k must be at least 1"));
    }
    let selected: Vec<&str> = match selection {
        Selection::Frequency => corpus.top_frequent_nonstop(stopwords, k),
        Selection::Alpha => {
            let mut ranked: Vec<(&str, f64)> = weights
                .iter()
                .filter(|(w, _)| corpus.contains(w) && !stopwords.contains(w))
                .collect();
            ranked.sort_by(|a, b| b.1.total_cmp(&a.1));
            ranked.into_iter().take(k).map(|(w, _)| w).collect()
        }
    };

    let entries = selected.into_iter().filter_map(|w| {
        let alpha = weights.get(w)?;
        let vector = generic.get(w)?;
        Some((w.to_string(), alpha, vector.to_vec()))
    });
    WordDistribution::from_weighted(corpus.name(), entries)
}
