//! Seeded synthetic corpora, embeddings, and labeled data.
//!
//! A [`SyntheticWorld`] has a handful of topics. Each topic owns a content
//! vocabulary split into positive, negative, and neutral words; all topics
//! share a small neutral vocabulary and a set of stopwords. From a world
//! one can draw:
//!
//! * topic corpora (library corpora or tasks),
//! * a generic embedding in which each topic's words cluster tightly around
//!   a topic center,
//! * per-topic domain embeddings that encode polarity only for that topic's
//!   sentiment words and are noise everywhere else,
//! * labeled sentiment documents over any subset of topics.
//!
//! Everything is a pure function of the seed.

use std::fs;
use std::path::{Path, PathBuf};

use rand::distributions::{Distribution, WeightedIndex};
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use serde::Serialize;

use crate::embedding::EmbeddingStore;
use crate::error::{Error, Result};
use crate::eval::LabeledDataset;

const TOPIC_NAMES: [&str; 8] = [
    "aviation", "cuisine", "cinema", "railway", "pharma", "legal", "finance", "botany",
];

/// Stopwords mixed into every generated document.
pub const FILLER_STOPWORDS: [&str; 12] = [
    "the", "a", "and", "of", "to", "in", "is", "it", "was", "for", "on", "with",
];

#[derive(Debug, Clone, PartialEq)]
pub struct WorldConfig {
    pub topics: usize,
    pub sentiment_words: usize,
    pub neutral_words: usize,
    pub shared_words: usize,
    pub generic_dim: usize,
    /// Per-coordinate noise of topic words around their topic center in
    /// the generic embedding.
    pub generic_spread: f64,
    pub domain_dim: usize,
    /// Per-coordinate noise of domain vectors.
    pub domain_noise: f64,
    pub doc_len: usize,
    /// Fraction of each topic document drawn from other topics' vocabularies.
    pub leakage: f64,
}

impl Default for WorldConfig {
    fn default() -> Self {
        Self {
            topics: 3,
            sentiment_words: 15,
            neutral_words: 40,
            shared_words: 20,
            generic_dim: 16,
            generic_spread: 0.002,
            domain_dim: 8,
            domain_noise: 0.3,
            doc_len: 20,
            leakage: 0.0,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Topic {
    pub name: String,
    pub positive: Vec<String>,
    pub negative: Vec<String>,
    pub neutral: Vec<String>,
}

impl Topic {
    pub fn words(&self) -> impl Iterator<Item = &str> {
        self.positive
            .iter()
            .chain(&self.negative)
            .chain(&self.neutral)
            .map(String::as_str)
    }
}

#[derive(Debug, Clone)]
pub struct SyntheticWorld {
    config: WorldConfig,
    seed: u64,
    topics: Vec<Topic>,
    shared: Vec<String>,
}

/// Base-26 letter code: 0 → "a", 25 → "z", 26 → "ba", ...
fn letters(mut n: usize) -> String {
    let mut out = Vec::new();
    loop {
        out.push(b'a' + (n % 26) as u8);
        n /= 26;
        if n == 0 {
            break;
        }
    }
    out.reverse();
    String::from_utf8(out).expect("ascii")
}

fn rng_for(seed: u64, stream: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}

fn gaussian(rng: &mut ChaCha8Rng, dim: usize, scale: f64) -> Vec<f64> {
    (0..dim)
        .map(|_| {
            let z: f64 = StandardNormal.sample(rng);
            z * scale
        })
        .collect()
}

impl SyntheticWorld {
    pub fn new(config: WorldConfig, seed: u64) -> Result<Self> {
        if config.topics == 0 || config.topics > TOPIC_NAMES.len() {
            return Err(Error::invalid(format!(
                "topics must be between 1 and {}",
                TOPIC_NAMES.len()
            )));
        }
        if config.sentiment_words == 0 || config.neutral_words == 0 || config.doc_len < 4 {
            return Err(Error::invalid(
                "world needs sentiment and neutral words and doc_len >= 4",
            ));
        }
        if !(0.0..1.0).contains(&config.leakage) {
            return Err(Error::invalid("leakage must be in [0, 1)"));
        }
        let topics = TOPIC_NAMES[..config.topics]
            .iter()
            .map(|&name| {
                let stem = &name[..3];
                let make = |tag: &str, n: usize| -> Vec<String> {
                    (0..n)
                        .map(|j| format!("{stem}{tag}{}", letters(j)))
                        .collect()
                };
                Topic {
                    name: name.to_string(),
                    positive: make("pos", config.sentiment_words),
                    negative: make("neg", config.sentiment_words),
                    neutral: make("neu", config.neutral_words),
                }
            })
            .collect();
        let shared = (0..config.shared_words)
            .map(|j| format!("common{}", letters(j)))
            .collect();
        Ok(Self {
            config,
            seed,
            topics,
            shared,
        })
    }

    pub fn config(&self) -> &WorldConfig {
        &self.config
    }

    pub fn topics(&self) -> &[Topic] {
        &self.topics
    }

    pub fn topic(&self, name: &str) -> Option<&Topic> {
        self.topics.iter().find(|t| t.name == name)
    }

    pub fn shared_words(&self) -> &[String] {
        &self.shared
    }

    /// Every non-stopword the world can emit.
    pub fn vocabulary(&self) -> Vec<String> {
        let mut words: Vec<String> = self
            .topics
            .iter()
            .flat_map(|t| t.words().map(str::to_string))
            .chain(self.shared.iter().cloned())
            .collect();
        words.sort();
        words
    }

    /// Shared embedding: topic words cluster around a per-topic center;
    /// shared words and stopwords get independent random vectors.
    pub fn generic_embedding(&self) -> EmbeddingStore {
        let dim = self.config.generic_dim;
        let mut rng = rng_for(self.seed, 1);
        let mut vectors = Vec::new();
        for topic in &self.topics {
            let center = gaussian(&mut rng, dim, 1.0 / (dim as f64).sqrt());
            for w in topic.words() {
                let noise = gaussian(&mut rng, dim, self.config.generic_spread);
                let v = center.iter().zip(noise).map(|(c, e)| c + e).collect();
                vectors.push((w.to_string(), v));
            }
        }
        for w in self
            .shared
            .iter()
            .map(String::as_str)
            .chain(FILLER_STOPWORDS)
        {
            vectors.push((
                w.to_string(),
                gaussian(&mut rng, dim, 1.0 / (dim as f64).sqrt()),
            ));
        }
        EmbeddingStore::from_vectors("generic", dim, vectors).expect("valid generic embedding")
    }

    /// Domain embedding trained "on" topic `t`: its sentiment words carry
    /// polarity on the first coordinate, every other word is pure noise.
    pub fn domain_embedding(&self, t: usize) -> EmbeddingStore {
        let dim = self.config.domain_dim;
        let noise = self.config.domain_noise;
        let mut rng = rng_for(self.seed, 100 + t as u64);
        let own = &self.topics[t];
        let vectors = self
            .vocabulary()
            .into_iter()
            .chain(FILLER_STOPWORDS.iter().map(|s| s.to_string()))
            .map(|w| {
                let mut v = gaussian(&mut rng, dim, noise);
                if own.positive.contains(&w) {
                    v[0] += 1.0;
                } else if own.negative.contains(&w) {
                    v[0] -= 1.0;
                }
                (w, v)
            })
            .collect::<Vec<_>>();
        EmbeddingStore::from_vectors(own.name.clone(), dim, vectors)
            .expect("valid domain embedding")
    }

    /// Unlabeled documents about topic `t`, each mixing stopwords, shared
    /// words, and Zipf-distributed topic words.
    pub fn topic_documents(&self, t: usize, n_docs: usize, stream: u64) -> Vec<String> {
        let mut rng = rng_for(self.seed, 1_000 + stream);
        (0..n_docs)
            .map(|_| {
                let polarity = rng.gen_bool(0.5);
                self.document(t, polarity, &mut rng)
            })
            .collect()
    }

    /// Labeled sentiment documents whose topics are drawn uniformly from `topics`.
    pub fn labeled_dataset(
        &self,
        name: &str,
        topics: &[usize],
        n_docs: usize,
        stream: u64,
    ) -> Result<LabeledDataset> {
        if topics.is_empty() {
            return Err(Error::invalid("need at least one topic"));
        }
        let mut rng = rng_for(self.seed, 10_000 + stream);
        let examples = (0..n_docs)
            .map(|i| {
                let t = *topics.choose(&mut rng).expect("non-empty");
                let label = i % 2 == 0;
                (self.document(t, label, &mut rng), label)
            })
            .collect();
        LabeledDataset::new(name, examples)
    }

    fn document(&self, t: usize, positive: bool, rng: &mut ChaCha8Rng) -> String {
        let topic = &self.topics[t];
        let len = self.config.doc_len;
        let sentiment = if positive {
            &topic.positive
        } else {
            &topic.negative
        };
        let neutral_zipf = zipf(topic.neutral.len());
        let sentiment_zipf = zipf(sentiment.len());

        let mut words: Vec<&str> = Vec::with_capacity(len);
        for i in 0..len {
            let roll: f64 = rng.gen();
            let word = if i < 2 {
                sentiment[sentiment_zipf.sample(rng)].as_str()
            } else if roll < 0.25 {
                FILLER_STOPWORDS[rng.gen_range(0..FILLER_STOPWORDS.len())]
            } else if roll < 0.25 + 0.1 && !self.shared.is_empty() {
                self.shared[rng.gen_range(0..self.shared.len())].as_str()
            } else if self.topics.len() > 1 && rng.gen_bool(self.config.leakage) {
                let mut other = rng.gen_range(0..self.topics.len() - 1);
                if other >= t {
                    other += 1;
                }
                let o = &self.topics[other];
                o.neutral[rng.gen_range(0..o.neutral.len())].as_str()
            } else {
                topic.neutral[neutral_zipf.sample(rng)].as_str()
            };
            words.push(word);
        }
        words.shuffle(rng);
        words.join(" ")
    }
}

fn zipf(n: usize) -> WeightedIndex<f64> {
    WeightedIndex::new((1..=n).map(|r| 1.0 / r as f64)).expect("positive weights")
}

/// `n_docs` documents of `doc_len` tokens drawn from a Zipf law over a
/// fixed `vocab_size`-word vocabulary.
pub fn zipf_documents(seed: u64, vocab_size: usize, n_docs: usize, doc_len: usize) -> Vec<String> {
    let vocab: Vec<String> = (0..vocab_size)
        .map(|j| format!("z{}", letters(j)))
        .collect();
    let dist = zipf(vocab_size);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..n_docs)
        .map(|_| {
            (0..doc_len)
                .map(|_| vocab[dist.sample(&mut rng)].as_str())
                .collect::<Vec<_>>()
                .join(" ")
        })
        .collect()
}

#[derive(Debug, Clone, Serialize)]
struct ManifestEntryOut {
    name: String,
    corpus_path: String,
    embedding_path: String,
}

#[derive(Debug, Clone, Serialize)]
struct ManifestOut {
    generic_embedding_path: String,
    entries: Vec<ManifestEntryOut>,
    defaults: serde_json::Value,
}

/// Paths written by [`write_fixture_library`].
#[derive(Debug, Clone)]
pub struct FixturePaths {
    pub manifest: PathBuf,
    /// Unlabeled task drawn from the first topic.
    pub task: PathBuf,
    /// Labeled documents drawn from the first two topics.
    pub dataset: PathBuf,
    pub generic: PathBuf,
    pub embeddings: Vec<PathBuf>,
}

/// Writes a complete on-disk library: one corpus and one domain embedding
/// per topic, the generic embedding, a manifest, a task corpus about the
/// first topic, and a labeled dataset spanning the first two topics.
pub fn write_fixture_library(
    dir: impl AsRef<Path>,
    config: WorldConfig,
    seed: u64,
) -> Result<FixturePaths> {
    let dir = dir.as_ref();
    fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
    let world = SyntheticWorld::new(config, seed)?;
    let write = |name: &str, text: String| -> Result<PathBuf> {
        let p = dir.join(name);
        fs::write(&p, text).map_err(|e| Error::io(&p, e))?;
        Ok(p)
    };

    let generic = dir.join("generic.vec");
    world.generic_embedding().save(&generic)?;

    let mut entries = Vec::new();
    let mut embeddings = Vec::new();
    for (t, topic) in world.topics().iter().enumerate() {
        let corpus_file = format!("{}.txt", topic.name);
        let embedding_file = format!("{}.vec", topic.name);
        write(
            &corpus_file,
            world.topic_documents(t, 300, t as u64).join("\n") + "\n",
        )?;
        let emb = dir.join(&embedding_file);
        world.domain_embedding(t).save(&emb)?;
        embeddings.push(emb);
        entries.push(ManifestEntryOut {
            name: topic.name.clone(),
            corpus_path: corpus_file,
            embedding_path: embedding_file,
        });
    }

    let task = write(
        "task.txt",
        world.topic_documents(0, 120, 500).join("\n") + "\n",
    )?;
    let topics: Vec<usize> = (0..world.topics().len().min(2)).collect();
    let dataset = world.labeled_dataset("dataset", &topics, 400, 0)?;
    let dataset = write("dataset.tsv", dataset.to_tsv())?;

    let manifest = ManifestOut {
        generic_embedding_path: "generic.vec".into(),
        entries,
        defaults: serde_json::json!({ "min_count": 1, "target_dim": world.config().domain_dim }),
    };
    let manifest = write(
        "library.json",
        serde_json::to_string_pretty(&manifest)? + "\n",
    )?;

    Ok(FixturePaths {
        manifest,
        task,
        dataset,
        generic,
        embeddings,
    })
}
