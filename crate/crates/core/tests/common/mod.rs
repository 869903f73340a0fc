//! Reference implementations shared by the integration tests. None of these
//! call into the code they check.

#![allow(dead_code)]

use std::collections::BTreeMap;

use embfuse::corpus::build_corpus;
use embfuse::embedding::EmbeddingStore;
use embfuse::eval::{evaluate, EvalReport, LabeledDataset};
use embfuse::fusion::{fuse_average, fuse_pca, FusionInput};
use embfuse::synthetic::{SyntheticWorld, WorldConfig};
use embfuse::weighting::WordDistribution;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Plain double loop over both supports in their stored order.
pub fn naive_rbf(p: &WordDistribution, q: &WordDistribution, sigma: f64) -> f64 {
    let mut total = 0.0;
    for a in p.support() {
        for b in q.support() {
            let mut d2 = 0.0;
            for k in 0..a.vector.len() {
                let diff = a.vector[k] - b.vector[k];
                d2 += diff * diff;
            }
            total += a.probability * b.probability * (-d2 / (sigma * sigma)).exp();
        }
    }
    total
}

/// A random distribution whose vectors live in a box of side `spread`, so
/// that kernel values at bandwidths near `spread` are far from zero.
pub fn random_distribution(
    rng: &mut ChaCha8Rng,
    name: &str,
    support: usize,
    dim: usize,
    spread: f64,
) -> WordDistribution {
    let entries = (0..support).map(|i| {
        let v = (0..dim).map(|_| rng.gen_range(0.0..spread)).collect();
        (format!("w{i}"), rng.gen_range(0.01..1.0), v)
    });
    WordDistribution::from_weighted(name, entries.collect::<Vec<_>>()).unwrap()
}

/// Token counts straight from whitespace/punctuation splitting.
pub fn count_tokens(documents: &[String]) -> BTreeMap<String, u64> {
    let mut counts = BTreeMap::new();
    for doc in documents {
        for token in doc.split(|c: char| !c.is_ascii_alphanumeric()) {
            if token.is_empty() || token.bytes().all(|b| b.is_ascii_digit()) {
                continue;
            }
            *counts.entry(token.to_ascii_lowercase()).or_insert(0) += 1;
        }
    }
    counts
}

/// Row-major `rows x cols` matrix of standard normals scaled per column, so
/// that the covariance spectrum is spread out.
pub fn spread_matrix(seed: u64, rows: usize, cols: usize) -> Vec<Vec<f64>> {
    let mut r = rng(seed);
    (0..rows)
        .map(|_| {
            (0..cols)
                .map(|j| {
                    let u: f64 = r.gen_range(-1.0..1.0);
                    let v: f64 = r.gen_range(-1.0..1.0);
                    (u + v) * (1.0 + j as f64 * 0.25)
                })
                .collect()
        })
        .collect()
}

/// Sample covariance (divisor n - 1) of row-major data.
pub fn covariance(rows: &[Vec<f64>]) -> Vec<Vec<f64>> {
    let n = rows.len();
    let d = rows[0].len();
    let mean: Vec<f64> = (0..d)
        .map(|j| rows.iter().map(|r| r[j]).sum::<f64>() / n as f64)
        .collect();
    let mut c = vec![vec![0.0; d]; d];
    for r in rows {
        for i in 0..d {
            for j in 0..d {
                c[i][j] += (r[i] - mean[i]) * (r[j] - mean[j]);
            }
        }
    }
    for row in &mut c {
        for v in row.iter_mut() {
            *v /= (n - 1) as f64;
        }
    }
    c
}

/// Eigenvalues of a symmetric matrix by cyclic Jacobi rotations, descending.
#[allow(clippy::needless_range_loop)]
pub fn jacobi_eigenvalues(mut a: Vec<Vec<f64>>) -> Vec<f64> {
    let n = a.len();
    for _sweep in 0..100 {
        let off: f64 = (0..n)
            .flat_map(|i| (0..n).filter(move |&j| j != i).map(move |j| (i, j)))
            .map(|(i, j)| a[i][j] * a[i][j])
            .sum();
        if off < 1e-30 {
            break;
        }
        for p in 0..n {
            for q in p + 1..n {
                if a[p][q].abs() < 1e-300 {
                    continue;
                }
                let theta = (a[q][q] - a[p][p]) / (2.0 * a[p][q]);
                let t = theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt());
                let c = 1.0 / (t * t + 1.0).sqrt();
                let s = t * c;
                for k in 0..n {
                    let akp = a[k][p];
                    let akq = a[k][q];
                    a[k][p] = c * akp - s * akq;
                    a[k][q] = s * akp + c * akq;
                }
                for k in 0..n {
                    let apk = a[p][k];
                    let aqk = a[q][k];
                    a[p][k] = c * apk - s * aqk;
                    a[q][k] = s * apk + c * aqk;
                }
            }
        }
    }
    let mut eig: Vec<f64> = (0..n).map(|i| a[i][i]).collect();
    eig.sort_by(|x, y| y.total_cmp(x));
    eig
}

/// Two-topic sentiment benchmark with one partial embedding per topic.
pub struct Benchmark {
    pub dataset: LabeledDataset,
    pub parts: Vec<EmbeddingStore>,
    pub pca: EmbeddingStore,
    pub average: EmbeddingStore,
}

impl Benchmark {
    pub fn new(seed: u64) -> Self {
        let config = WorldConfig {
            topics: 2,
            ..WorldConfig::default()
        };
        let target_dim = config.domain_dim;
        let world = SyntheticWorld::new(config, seed).unwrap();
        let dataset = world.labeled_dataset("benchmark", &[0, 1], 400, 0).unwrap();
        let docs: Vec<&str> = dataset.documents().collect();
        let corpus = build_corpus("benchmark", &docs, 1).unwrap();
        let parts = vec![world.domain_embedding(0), world.domain_embedding(1)];
        let input = FusionInput::for_corpus(parts.clone(), &corpus).unwrap();
        let pca = fuse_pca(&input, target_dim).unwrap().0.store;
        let average = fuse_average(&input).unwrap().store;
        Self {
            dataset,
            parts,
            pca,
            average,
        }
    }

    pub fn eval(&self, store: &EmbeddingStore, seed: u64) -> EvalReport {
        evaluate(&self.dataset, store, 5, 0.7, seed).unwrap()
    }
}
