//! Kernel similarity between corpus distributions and embedding rankings.
//!
//! The similarity of two distributions `P`, `Q` over generic-embedding
//! vectors is the expected RBF kernel value
//!
//! ```text
//! s(P, Q) = sum_{w in P} sum_{w' in Q} p(w) q(w') exp(-||E(w) - E(w')||^2 / sigma^2)
//! ```
//!
//! With small bandwidths the terms for unrelated words underflow quickly, so
//! every score also carries its natural logarithm; in log-domain mode the
//! sum is accumulated with log-sum-exp and the log value stays meaningful
//! even when the linear value is zero.

use std::cmp::Ordering;
use std::collections::BTreeMap;
use std::str::FromStr;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::corpus::{Corpus, StopwordList};
use crate::error::{Error, Result};
use crate::weighting::{
    library_weights, task_weights, to_distribution, CorpusLibrary, Selection, WordDistribution,
};

/// RBF bandwidth used when none is given.
pub const DEFAULT_SIGMA: f64 = 0.01;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SimilarityScore {
    pub value: f64,
    /// `ln(value)`; finite in log-domain mode even when `value` underflows.
    pub log_value: f64,
    pub pair: (String, String),
    pub sigma: f64,
    /// Larger of the two support sizes.
    pub k: usize,
}

/// Options for [`rbf_similarity_with`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct KernelOptions {
    pub sigma: f64,
    pub log_domain: bool,
}

impl Default for KernelOptions {
    fn default() -> Self {
        Self {
            sigma: DEFAULT_SIGMA,
            log_domain: false,
        }
    }
}

pub fn rbf_similarity(
    p: &WordDistribution,
    q: &WordDistribution,
    sigma: f64,
) -> Result<SimilarityScore> {
    rbf_similarity_with(
        p,
        q,
        KernelOptions {
            sigma,
            log_domain: false,
        },
    )
}

pub fn rbf_similarity_with(
    p: &WordDistribution,
    q: &WordDistribution,
    opts: KernelOptions,
) -> Result<SimilarityScore> {
    if !(opts.sigma > 0.0 && opts.sigma.is_finite()) {
        return Err(Error::invalid(format!(
            "sigma must be positive, got {}",
            opts.sigma
        )));
    }
    if p.dim() != q.dim() {
        return Err(Error::DimensionMismatch {
            expected: p.dim(),
            found: q.dim(),
        });
    }
    if p.is_empty() || q.is_empty() {
        return Err(Error::EmptyDistribution);
    }

    // Always accumulate with the canonical distribution in the outer loop so
    // that s(P, Q) and s(Q, P) are bitwise equal.
    let (outer, inner) = if canonical_order(p, q) == Ordering::Greater {
        (q, p)
    } else {
        (p, q)
    };
    let inv_sigma2 = 1.0 / (opts.sigma * opts.sigma);

    let (value, log_value) = if opts.log_domain {
        let mut terms = Vec::with_capacity(outer.len() * inner.len());
        for a in outer.support() {
            for b in inner.support() {
                let d2 = squared_distance(&a.vector, &b.vector);
                terms.push(a.probability.ln() + b.probability.ln() - d2 * inv_sigma2);
            }
        }
        let lse = log_sum_exp(&terms);
        (lse.exp(), lse)
    } else {
        let mut total = 0.0;
        for a in outer.support() {
            let mut row = 0.0;
            for b in inner.support() {
                let d2 = squared_distance(&a.vector, &b.vector);
                row += b.probability * (-d2 * inv_sigma2).exp();
            }
            total += a.probability * row;
        }
        (total, total.ln())
    };

    Ok(SimilarityScore {
        value,
        log_value,
        pair: (p.name().to_string(), q.name().to_string()),
        sigma: opts.sigma,
        k: p.len().max(q.len()),
    })
}

fn squared_distance(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum()
}

fn log_sum_exp(terms: &[f64]) -> f64 {
    let max = terms.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    if max == f64::NEG_INFINITY {
        return max;
    }
    max + terms.iter().map(|t| (t - max).exp()).sum::<f64>().ln()
}

fn canonical_order(p: &WordDistribution, q: &WordDistribution) -> Ordering {
    p.name()
        .cmp(q.name())
        .then_with(|| p.len().cmp(&q.len()))
        .then_with(|| {
            for (a, b) in p.support().iter().zip(q.support()) {
                let ord = a
                    .word
                    .cmp(&b.word)
                    .then_with(|| a.probability.total_cmp(&b.probability))
                    .then_with(|| {
                        a.vector
                            .iter()
                            .zip(&b.vector)
                            .map(|(x, y)| x.total_cmp(y))
                            .find(|o| o.is_ne())
                            .unwrap_or(Ordering::Equal)
                    });
                if ord.is_ne() {
                    return ord;
                }
            }
            Ordering::Equal
        })
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum RankMethod {
    #[default]
    Rbf,
    Tfidf,
}

impl FromStr for RankMethod {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "rbf" => Ok(RankMethod::Rbf),
            "tfidf" => Ok(RankMethod::Tfidf),
            other => Err(Error::invalid(format!("unknown ranking method '{other}'"))),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RankEntry {
    pub name: String,
    pub score: f64,
    pub log_score: f64,
}

/// Library embeddings ordered by decreasing similarity to a task corpus.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Ranking {
    pub task: String,
    pub method: RankMethod,
    pub entries: Vec<RankEntry>,
}

impl Ranking {
    /// Sorts entries by descending score, then ascending name.
    pub fn new(task: impl Into<String>, method: RankMethod, mut entries: Vec<RankEntry>) -> Self {
        entries.sort_by(|a, b| {
            b.score
                .total_cmp(&a.score)
                .then_with(|| b.log_score.total_cmp(&a.log_score))
                .then_with(|| a.name.cmp(&b.name))
        });
        Self {
            task: task.into(),
            method,
            entries,
        }
    }

    pub fn names(&self) -> impl Iterator<Item = &str> {
        self.entries.iter().map(|e| e.name.as_str())
    }

    pub fn get(&self, name: &str) -> Option<&RankEntry> {
        self.entries.iter().find(|e| e.name == name)
    }

    pub fn top(&self, n: usize) -> &[RankEntry] {
        &self.entries[..n.min(self.entries.len())]
    }

    /// TSV lines `rank<TAB>embedding<TAB>score`, scores with 17 significant digits.
    pub fn to_tsv(&self, top: Option<usize>) -> String {
        let n = top.unwrap_or(self.entries.len());
        self.top(n)
            .iter()
            .enumerate()
            .map(|(i, e)| format!("{}\t{}\t{:.16e}\n", i + 1, e.name, e.score))
            .collect()
    }
}

/// Parameters shared by the distribution-based ranking.
#[derive(Debug, Clone, PartialEq)]
pub struct RankOptions {
    pub k: usize,
    pub kernel: KernelOptions,
    pub selection: Selection,
}

impl Default for RankOptions {
    fn default() -> Self {
        Self {
            k: crate::weighting::DEFAULT_SUPPORT_SIZE,
            kernel: KernelOptions::default(),
            selection: Selection::Frequency,
        }
    }
}

/// Distribution of library corpus `i` under its own weights.
pub fn library_distribution(
    library: &CorpusLibrary,
    i: usize,
    stopwords: &StopwordList,
    opts: &RankOptions,
) -> Result<WordDistribution> {
    let weights = library_weights(library, i)?;
    to_distribution(
        &weights,
        &library.corpora()[i],
        stopwords,
        opts.k,
        library.generic(),
        opts.selection,
    )
}

pub fn task_distribution(
    library: &CorpusLibrary,
    task: &Corpus,
    stopwords: &StopwordList,
    opts: &RankOptions,
) -> Result<WordDistribution> {
    let weights = task_weights(library, task)?;
    to_distribution(
        &weights,
        task,
        stopwords,
        opts.k,
        library.generic(),
        opts.selection,
    )
}

/// Scores every library corpus against `task` and sorts the results.
pub fn rank_embeddings(
    library: &CorpusLibrary,
    task: &Corpus,
    stopwords: &StopwordList,
    opts: &RankOptions,
) -> Result<Ranking> {
    let task_dist = task_distribution(library, task, stopwords, opts)?;
    let entries = (0..library.len())
        .into_par_iter()
        .map(|i| {
            let dist = library_distribution(library, i, stopwords, opts)?;
            let score = rbf_similarity_with(&dist, &task_dist, opts.kernel)?;
            Ok(RankEntry {
                name: library.corpora()[i].name().to_string(),
                score: score.value,
                log_score: score.log_value,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(Ranking::new(task.name(), RankMethod::Rbf, entries))
}

/// Baseline ranking by cosine between tf-idf vectors of whole corpora.
///
/// Each corpus (library corpora plus the task) is one document:
/// `tf = count / total_tokens`, `idf = ln((1 + n) / (1 + df)) + 1` with
/// `n = N + 1` and `df` the number of corpora containing the word.
pub fn tfidf_cosine(library: &CorpusLibrary, task: &Corpus) -> Result<Ranking> {
    if !task.words().any(|w| library.library_count(w) > 0) {
        return Err(Error::NoVocabularyOverlap);
    }
    let corpora: Vec<&Corpus> = library
        .corpora()
        .iter()
        .chain(std::iter::once(task))
        .collect();
    let n_docs = corpora.len() as f64;

    let mut df: BTreeMap<&str, u64> = BTreeMap::new();
    for c in &corpora {
        for w in c.words() {
            *df.entry(w).or_insert(0) += 1;
        }
    }
    let idf: BTreeMap<&str, f64> = df
        .iter()
        .map(|(&w, &d)| (w, ((1.0 + n_docs) / (1.0 + d as f64)).ln() + 1.0))
        .collect();

    let vectorize = |c: &Corpus| -> BTreeMap<String, f64> {
        let total = c.total_tokens() as f64;
        c.counts()
            .iter()
            .map(|(w, &n)| (w.clone(), n as f64 / total * idf[w.as_str()]))
            .collect()
    };
    let task_vec = vectorize(task);
    let task_norm = norm(&task_vec);

    let entries = library
        .corpora()
        .iter()
        .map(|c| {
            let v = vectorize(c);
            let dot: f64 = task_vec
                .iter()
                .filter_map(|(w, x)| v.get(w).map(|y| x * y))
                .sum();
            let cosine = dot / (task_norm * norm(&v));
            RankEntry {
                name: c.name().to_string(),
                score: cosine,
                log_score: cosine.ln(),
            }
        })
        .collect();
    Ok(Ranking::new(task.name(), RankMethod::Tfidf, entries))
}

fn norm(v: &BTreeMap<String, f64>) -> f64 {
    v.values().map(|x| x * x).sum::<f64>().sqrt()
}
