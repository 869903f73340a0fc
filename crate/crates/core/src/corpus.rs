//! Token-count statistics for text corpora.
//!
//! A [`Corpus`] is a bag of normalized tokens: lowercase, split on anything
//! that is not alphanumeric (apostrophes survive only between two
//! alphanumeric characters), with pure-digit tokens removed. Words below a
//! minimum count are dropped and do not contribute to the total length.

use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use rayon::prelude::*;

use crate::error::{Error, Result};

/// Minimum occurrence count used when none is given.
pub const DEFAULT_MIN_COUNT: u64 = 5;

const BUILTIN_STOPWORDS: &str = include_str!("../data/stopwords_en.txt");

/// Splits a document into normalized tokens.
pub fn tokenize(document: &str) -> Vec<String> {
    let chars: Vec<char> = document.chars().collect();
    let mut tokens = Vec::new();
    let mut current = String::new();

    for (i, &c) in chars.iter().enumerate() {
        let keep = if c.is_alphanumeric() {
            true
        } else if c == '\'' {
            let prev = i > 0 && chars[i - 1].is_alphanumeric();
            let next = chars.get(i + 1).is_some_and(|n| n.is_alphanumeric());
            prev && next
        } else {
            false
        };

        if keep {
            current.extend(c.to_lowercase());
        } else {
            flush(&mut current, &mut tokens);
        }
    }
    flush(&mut current, &mut tokens);
    tokens
}

fn flush(current: &mut String, tokens: &mut Vec<String>) {
    if current.is_empty() {
        return;
    }
    let token = std::mem::take(current);
    if !token.chars().all(|c| c.is_numeric()) {
        tokens.push(token);
    }
}

/// A set of normalized words excluded from frequency-based selection.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct StopwordList {
    words: BTreeSet<String>,
}

impl StopwordList {
    pub fn new<I, S>(words: I) -> Self
    where
        I: IntoIterator<Item = S>,
        S: AsRef<str>,
    {
        let words = words
            .into_iter()
            .flat_map(|w| tokenize(w.as_ref()))
            .collect();
        Self { words }
    }

    pub fn empty() -> Self {
        Self::default()
    }

    /// The bundled English list.
    pub fn english() -> Self {
        Self::parse(BUILTIN_STOPWORDS)
    }

    /// One word per line; blank lines and `#` comments are ignored.
    pub fn parse(text: &str) -> Self {
        Self::new(
            text.lines()
                .map(str::trim)
                .filter(|l| !l.is_empty() && !l.starts_with('#')),
        )
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Ok(Self::parse(&text))
    }

    pub fn contains(&self, word: &str) -> bool {
        self.words.contains(word)
    }

    pub fn len(&self) -> usize {
        self.words.len()
    }

    pub fn is_empty(&self) -> bool {
        self.words.is_empty()
    }
}

/// Word counts for one corpus.
///
/// Counts are kept in a sorted map so that iteration order, and everything
/// derived from it, is deterministic.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Corpus {
    name: String,
    counts: BTreeMap<String, u64>,
    total_tokens: u64,
    num_documents: usize,
}

impl Corpus {
    /// Builds a corpus from an explicit count table. Zero counts are dropped.
    pub fn from_counts<I, S>(
        name: impl Into<String>,
        counts: I,
        num_documents: usize,
    ) -> Result<Self>
    where
        I: IntoIterator<Item = (S, u64)>,
        S: Into<String>,
    {
        let mut table = BTreeMap::new();
        for (word, count) in counts {
            if count > 0 {
                *table.entry(word.into()).or_insert(0) += count;
            }
        }
        if table.is_empty() {
            return Err(Error::EmptyCorpus);
        }
        let total_tokens = table.values().sum();
        Ok(Self {
            name: name.into(),
            counts: table,
            total_tokens,
            num_documents,
        })
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn counts(&self) -> &BTreeMap<String, u64> {
        &self.counts
    }

    /// Occurrences of `word`, zero when absent.
    pub fn count(&self, word: &str) -> u64 {
        self.counts.get(word).copied().unwrap_or(0)
    }

    pub fn contains(&self, word: &str) -> bool {
        self.counts.contains_key(word)
    }

    pub fn total_tokens(&self) -> u64 {
        self.total_tokens
    }

    pub fn num_documents(&self) -> usize {
        self.num_documents
    }

    pub fn vocab_size(&self) -> usize {
        self.counts.len()
    }

    pub fn words(&self) -> impl Iterator<Item = &str> {
        self.counts.keys().map(String::as_str)
    }

    pub fn with_name(mut self, name: impl Into<String>) -> Self {
        self.name = name.into();
        self
    }

    /// The `k` most frequent words that are not stopwords, by descending
    /// count with ascending lexicographic tie-break.
    pub fn top_frequent_nonstop(&self, stopwords: &StopwordList, k: usize) -> Vec<&str> {
        let mut words: Vec<(&str, u64)> = self
            .counts
            .iter()
            .filter(|(w, _)| !stopwords.contains(w))
            .map(|(w, &c)| (w.as_str(), c))
            .collect();
        // BTreeMap order is already lexicographic, so a stable sort by count
        // keeps the tie-break.
        words.sort_by_key(|&(_, c)| std::cmp::Reverse(c));
        words.truncate(k);
        words.into_iter().map(|(w, _)| w).collect()
    }

    /// Reads a corpus from a text file (one document per line), a directory
    /// of such files, or a count cache written by [`Corpus::write_cache`].
    pub fn load(path: impl AsRef<Path>, name: impl Into<String>, min_count: u64) -> Result<Self> {
        let path = path.as_ref();
        let name = name.into();
        if path.is_dir() {
            let mut files: Vec<_> = fs::read_dir(path)
                .map_err(|e| Error::io(path, e))?
                .filter_map(|entry| entry.ok().map(|e| e.path()))
                .filter(|p| p.is_file())
                .collect();
            files.sort();
            let mut documents = Vec::new();
            for file in &files {
                let text = fs::read_to_string(file).map_err(|e| Error::io(file, e))?;
                documents.extend(split_documents(&text).into_iter().map(str::to_string));
            }
            return build_corpus(name, &documents, min_count);
        }

        let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        if text.starts_with("#total") {
            return Self::parse_cache(&text, name, min_count);
        }
        build_corpus(name, &split_documents(&text), min_count)
    }

    /// Serializes the count table as `#total <n>` followed by `word\tcount` lines.
    pub fn to_cache_string(&self) -> String {
        let mut out = format!("#total {}\n", self.total_tokens);
        for (word, count) in &self.counts {
            let _ = writeln!(out, "{word}\t{count}");
        }
        out
    }

    pub fn write_cache(&self, path: impl AsRef<Path>) -> Result<()> {
        let path = path.as_ref();
        fs::write(path, self.to_cache_string()).map_err(|e| Error::io(path, e))
    }

    pub fn parse_cache(text: &str, name: impl Into<String>, min_count: u64) -> Result<Self> {
        let mut lines = text.lines().enumerate();
        let declared: u64 = lines
            .next()
            .and_then(|(_, l)| l.strip_prefix("#total"))
            .and_then(|rest| rest.trim().parse().ok())
            .ok_or_else(|| Error::Parse {
                line: 1,
                message: "malformed corpus cache header".into(),
            })?;

        let mut counts = Vec::new();
        let mut sum = 0u64;
        for (idx, line) in lines {
            if line.is_empty() {
                continue;
            }
            let parse_err = || Error::Parse {
                line: idx + 1,
                message: "malformed corpus cache row".into(),
            };
            let (word, count) = line.split_once('\t').ok_or_else(parse_err)?;
            let count: u64 = count.trim().parse().map_err(|_| parse_err())?;
            sum += count;
            counts.push((word.to_string(), count));
        }
        if sum != declared {
            return Err(Error::Parse {
                line: 1,
                message: format!("declared total {declared} but counts sum to {sum}"),
            });
        }
        Self::from_counts(
            name,
            counts.into_iter().filter(|(_, c)| *c >= min_count.max(1)),
            0,
        )
    }
}

fn split_documents(text: &str) -> Vec<&str> {
    text.lines().filter(|l| !l.trim().is_empty()).collect()
}

/// Counts tokens across `documents`, keeping words seen at least `min_count` times.
pub fn build_corpus<S>(name: impl Into<String>, documents: &[S], min_count: u64) -> Result<Corpus>
where
    S: AsRef<str> + Sync,
{
    if min_count == 0 {
        return Err(Error::invalid("min_count must be at least 1"));
    }
    if documents.is_empty() {
        return Err(Error::EmptyCorpus);
    }

    let raw = documents
        .par_iter()
        .fold(HashMap::<String, u64>::new, |mut acc, doc| {
            for token in tokenize(doc.as_ref()) {
                *acc.entry(token).or_insert(0) += 1;
            }
            acc
        })
        .reduce(HashMap::new, |mut a, b| {
            for (w, c) in b {
                *a.entry(w).or_insert(0) += c;
            }
            a
        });

    Corpus::from_counts(
        name,
        raw.into_iter().filter(|(_, c)| *c >= min_count),
        documents.len(),
    )
}
