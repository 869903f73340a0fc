//! Downstream evaluation of an embedding on binary document classification.
//!
//! Documents are featurized as the mean vector of their in-vocabulary
//! tokens and classified with L2-regularized logistic regression. Each run
//! draws its own seeded train/test split; the report aggregates test
//! accuracy over runs.

use std::fs;
use std::path::Path;

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::corpus::tokenize;
use crate::embedding::EmbeddingStore;
use crate::error::{Error, Result};

pub const DEFAULT_RUNS: usize = 5;
pub const DEFAULT_SPLIT: f64 = 0.7;
pub const L2_STRENGTH: f64 = 1.0;
pub const MAX_ITERATIONS: usize = 500;
const MAX_SPLIT_ATTEMPTS: usize = 10;

#[derive(Debug, Clone, PartialEq)]
pub struct LabeledDataset {
    name: String,
    examples: Vec<(String, bool)>,
}

impl LabeledDataset {
    pub fn new(name: impl Into<String>, examples: Vec<(String, bool)>) -> Result<Self> {
        if examples.iter().any(|(doc, _)| doc.trim().is_empty()) {
            return Err(Error::Dataset("empty document".into()));
        }
        let positives = examples.iter().filter(|(_, l)| *l).count();
        if positives == 0 || positives == examples.len() {
            return Err(Error::Dataset("both labels must be present".into()));
        }
        Ok(Self {
            name: name.into(),
            examples,
        })
    }

    /// Parses `label<TAB>text` lines with labels `0` or `1`.
    pub fn parse_tsv(name: impl Into<String>, text: &str) -> Result<Self> {
        let mut examples = Vec::new();
        for (i, line) in text.lines().enumerate() {
            if line.trim().is_empty() {
                continue;
            }
            let bad = |msg: &str| Error::Dataset(format!("{msg} at line {}", i + 1));
            let (label, doc) = line.split_once('\t').ok_or_else(|| bad("missing tab"))?;
            let label = match label.trim() {
                "0" => false,
                "1" => true,
                _ => return Err(bad("label must be 0 or 1")),
            };
            examples.push((doc.to_string(), label));
        }
        Self::new(name, examples)
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        let name = path
            .file_stem()
            .map(|s| s.to_string_lossy().into_owned())
            .unwrap_or_default();
        Self::parse_tsv(name, &text)
    }

    pub fn to_tsv(&self) -> String {
        self.examples
            .iter()
            .map(|(doc, l)| format!("{}\t{doc}\n", u8::from(*l)))
            .collect()
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn examples(&self) -> &[(String, bool)] {
        &self.examples
    }

    pub fn len(&self) -> usize {
        self.examples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.examples.is_empty()
    }

    pub fn documents(&self) -> impl Iterator<Item = &str> {
        self.examples.iter().map(|(d, _)| d.as_str())
    }
}

/// Mean vector of the document's in-vocabulary tokens; zero when none are known.
pub fn featurize(document: &str, store: &EmbeddingStore) -> Vec<f64> {
    let mut sum = vec![0.0; store.dim()];
    let mut hits = 0usize;
    for token in tokenize(document) {
        if let Some(v) = store.get(&token) {
            sum.iter_mut().zip(v).for_each(|(acc, x)| *acc += x);
            hits += 1;
        }
    }
    if hits > 0 {
        let n = hits as f64;
        sum.iter_mut().for_each(|x| *x /= n);
    }
    sum
}

/// L2-regularized logistic regression on z-scored features, fitted by
/// full-batch gradient descent from a zero start.
///
/// The objective is `mean(logloss) + l2 / (2 n) * ||w||^2`; the bias is
/// not penalized.
#[derive(Debug, Clone, PartialEq)]
pub struct LogisticRegression {
    weights: Vec<f64>,
    bias: f64,
    mean: Vec<f64>,
    scale: Vec<f64>,
}

impl LogisticRegression {
    pub fn fit(features: &[Vec<f64>], labels: &[bool], l2: f64, iterations: usize) -> Self {
        let n = features.len();
        let p = features.first().map_or(0, Vec::len);
        let mean: Vec<f64> = (0..p)
            .map(|j| features.iter().map(|f| f[j]).sum::<f64>() / n as f64)
            .collect();
        let scale: Vec<f64> = (0..p)
            .map(|j| {
                let var = features
                    .iter()
                    .map(|f| (f[j] - mean[j]).powi(2))
                    .sum::<f64>()
                    / n as f64;
                if var > 0.0 {
                    var.sqrt()
                } else {
                    1.0
                }
            })
            .collect();
        let x: Vec<Vec<f64>> = features
            .iter()
            .map(|f| {
                f.iter()
                    .enumerate()
                    .map(|(j, v)| (v - mean[j]) / scale[j])
                    .collect()
            })
            .collect();

        let lipschitz = 0.25 * largest_gram_eigenvalue(&x) + l2 / n as f64;
        let step = 1.0 / lipschitz;

        let mut weights = vec![0.0; p];
        let mut bias = 0.0;
        for _ in 0..iterations {
            let mut grad_w = vec![0.0; p];
            let mut grad_b = 0.0;
            for (row, &label) in x.iter().zip(labels) {
                let z = bias + dot(&weights, row);
                let residual = sigmoid(z) - if label { 1.0 } else { 0.0 };
                grad_b += residual;
                grad_w
                    .iter_mut()
                    .zip(row)
                    .for_each(|(g, v)| *g += residual * v);
            }
            for (w, g) in weights.iter_mut().zip(&grad_w) {
                *w -= step * (g / n as f64 + l2 / n as f64 * *w);
            }
            bias -= step * grad_b / n as f64;
        }
        Self {
            weights,
            bias,
            mean,
            scale,
        }
    }

    pub fn probability(&self, features: &[f64]) -> f64 {
        let z = self.bias
            + features
                .iter()
                .enumerate()
                .map(|(j, v)| (v - self.mean[j]) / self.scale[j] * self.weights[j])
                .sum::<f64>();
        sigmoid(z)
    }

    pub fn predict(&self, features: &[f64]) -> bool {
        self.probability(features) >= 0.5
    }
}

/// Largest eigenvalue of `[X 1]^T [X 1] / n` by power iteration.
fn largest_gram_eigenvalue(x: &[Vec<f64>]) -> f64 {
    let n = x.len() as f64;
    let p = x.first().map_or(0, Vec::len) + 1;
    let mut v = vec![1.0 / (p as f64).sqrt(); p];
    let mut lambda = 1.0;
    for _ in 0..100 {
        let mut next = vec![0.0; p];
        for row in x {
            let proj = dot(&v[..p - 1], row) + v[p - 1];
            next.iter_mut().zip(row).for_each(|(a, r)| *a += proj * r);
            next[p - 1] += proj;
        }
        next.iter_mut().for_each(|a| *a /= n);
        let norm = dot(&next, &next).sqrt();
        if norm == 0.0 {
            return 1.0;
        }
        lambda = norm;
        v = next.into_iter().map(|a| a / norm).collect();
    }
    lambda
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

fn sigmoid(z: f64) -> f64 {
    if z >= 0.0 {
        1.0 / (1.0 + (-z).exp())
    } else {
        let e = z.exp();
        e / (1.0 + e)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EvalReport {
    pub embedding: String,
    pub dataset: String,
    pub runs: usize,
    pub mean_accuracy: f64,
    /// Population standard deviation over runs.
    pub std_accuracy: f64,
    pub split_ratio: f64,
    pub seed: u64,
    pub accuracies: Vec<f64>,
}

/// Runs `runs` seeded train/test splits (seed `seed + r` for run `r`).
pub fn evaluate(
    dataset: &LabeledDataset,
    store: &EmbeddingStore,
    runs: usize,
    split: f64,
    seed: u64,
) -> Result<EvalReport> {
    if runs == 0 {
        return Err(Error::invalid("runs must be at least 1"));
    }
    if !(split > 0.0 && split < 1.0) {
        return Err(Error::invalid(format!(
            "split must be in (0, 1), got {split}"
        )));
    }
    let n = dataset.len();
    if n < 2 {
        return Err(Error::Dataset("need at least two examples".into()));
    }
    let features: Vec<Vec<f64>> = dataset.documents().map(|d| featurize(d, store)).collect();
    let labels: Vec<bool> = dataset.examples().iter().map(|(_, l)| *l).collect();
    let n_train = ((split * n as f64).round() as usize).clamp(1, n - 1);

    let accuracies = (0..runs)
        .into_par_iter()
        .map(|r| run_once(&features, &labels, n_train, seed.wrapping_add(r as u64)))
        .collect::<Result<Vec<f64>>>()?;

    let mean = accuracies.iter().sum::<f64>() / runs as f64;
    let var = accuracies.iter().map(|a| (a - mean).powi(2)).sum::<f64>() / runs as f64;
    Ok(EvalReport {
        embedding: store.name().to_string(),
        dataset: dataset.name().to_string(),
        runs,
        mean_accuracy: mean,
        std_accuracy: var.sqrt(),
        split_ratio: split,
        seed,
        accuracies,
    })
}

fn run_once(features: &[Vec<f64>], labels: &[bool], n_train: usize, seed: u64) -> Result<f64> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut order: Vec<usize> = (0..features.len()).collect();
    for _ in 0..MAX_SPLIT_ATTEMPTS {
        order.shuffle(&mut rng);
        let (train, test) = order.split_at(n_train);
        let positives = train.iter().filter(|&&i| labels[i]).count();
        if positives == 0 || positives == train.len() {
            continue;
        }
        let train_x: Vec<Vec<f64>> = train.iter().map(|&i| features[i].clone()).collect();
        let train_y: Vec<bool> = train.iter().map(|&i| labels[i]).collect();
        let model = LogisticRegression::fit(&train_x, &train_y, L2_STRENGTH, MAX_ITERATIONS);
        let correct = test
            .iter()
            .filter(|&&i| model.predict(&features[i]) == labels[i])
            .count();
        return Ok(correct as f64 / test.len() as f64);
    }
    Err(Error::DegenerateSplit {
        attempts: MAX_SPLIT_ATTEMPTS,
    })
}
