//! Word-embedding tables in the word2vec text format.
//!
//! The format is a header line `<vocab_size> <dim>` followed by one line per
//! word: `<word> <v1> ... <vd>`, single-space separated. Values are written
//! with Rust's shortest round-trip float formatting, so a save/load cycle
//! reproduces every component bit for bit.

use std::borrow::Cow;
use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::fs;
use std::io::{BufRead, BufReader, Write};
use std::path::Path;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// What to return when a word has no vector.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum OovPolicy {
    /// Report the word as absent.
    Skip,
    /// Substitute the zero vector.
    Zero,
}

impl FromStr for OovPolicy {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "skip" => Ok(OovPolicy::Skip),
            "zero" => Ok(OovPolicy::Zero),
            other => Err(Error::invalid(format!("unknown OOV policy '{other}'"))),
        }
    }
}

/// A word → vector map with a fixed dimension.
#[derive(Debug, Clone, PartialEq)]
pub struct EmbeddingStore {
    name: String,
    dim: usize,
    vectors: BTreeMap<String, Vec<f64>>,
}

impl EmbeddingStore {
    /// Builds a store, checking that every vector has length `dim` and only
    /// finite components. Later duplicates replace earlier ones.
    pub fn from_vectors<I, S>(name: impl Into<String>, dim: usize, vectors: I) -> Result<Self>
    where
        I: IntoIterator<Item = (S, Vec<f64>)>,
        S: Into<String>,
    {
        if dim == 0 {
            return Err(Error::invalid("embedding dimension must be at least 1"));
        }
        let mut map = BTreeMap::new();
        for (word, vector) in vectors {
            if vector.len() != dim {
                return Err(Error::DimensionMismatch {
                    expected: dim,
                    found: vector.len(),
                });
            }
            if vector.iter().any(|v| !v.is_finite()) {
                return Err(Error::invalid("embedding contains a non-finite value"));
            }
            map.insert(word.into(), vector);
        }
        if map.is_empty() {
            return Err(Error::EmptyEmbedding);
        }
        Ok(Self {
            name: name.into(),
            dim,
            vectors: map,
        })
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn len(&self) -> usize {
        self.vectors.len()
    }

    pub fn is_empty(&self) -> bool {
        self.vectors.is_empty()
    }

    pub fn contains(&self, word: &str) -> bool {
        self.vectors.contains_key(word)
    }

    pub fn get(&self, word: &str) -> Option<&[f64]> {
        self.vectors.get(word).map(Vec::as_slice)
    }

    pub fn lookup(&self, word: &str, policy: OovPolicy) -> Option<Cow<'_, [f64]>> {
        match (self.get(word), policy) {
            (Some(v), _) => Some(Cow::Borrowed(v)),
            (None, OovPolicy::Skip) => None,
            (None, OovPolicy::Zero) => Some(Cow::Owned(vec![0.0; self.dim])),
        }
    }

    /// Words in lexicographic order.
    pub fn words(&self) -> impl Iterator<Item = &str> {
        self.vectors.keys().map(String::as_str)
    }

    pub fn iter(&self) -> impl Iterator<Item = (&str, &[f64])> {
        self.vectors.iter().map(|(w, v)| (w.as_str(), v.as_slice()))
    }

    pub fn with_name(mut self, name: impl Into<String>) -> Self {
        self.name = name.into();
        self
    }

    /// A copy with every non-zero vector scaled to unit Euclidean norm.
    pub fn normalized(&self) -> Self {
        let vectors = self
            .vectors
            .iter()
            .map(|(w, v)| {
                let norm = v.iter().map(|x| x * x).sum::<f64>().sqrt();
                let v = if norm > 0.0 {
                    v.iter().map(|x| x / norm).collect()
                } else {
                    v.clone()
                };
                (w.clone(), v)
            })
            .collect();
        Self {
            name: self.name.clone(),
            dim: self.dim,
            vectors,
        }
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let file = fs::File::open(path).map_err(|e| Error::io(path, e))?;
        let name = path
            .file_stem()
            .map(|s| s.to_string_lossy().into_owned())
            .unwrap_or_default();
        Self::read(BufReader::new(file), name)
    }

    pub fn read<R: BufRead>(reader: R, name: impl Into<String>) -> Result<Self> {
        let mut lines = reader.lines();
        let header = match lines.next() {
            Some(line) => line.map_err(|e| read_error(1, e))?,
            None => return Err(Error::EmptyEmbedding),
        };
        let (vocab_size, dim) = parse_header(&header)?;
        if vocab_size == 0 {
            return Err(Error::EmptyEmbedding);
        }

        let mut vectors = BTreeMap::new();
        let mut rows = 0usize;
        for (idx, line) in lines.enumerate() {
            let line_no = idx + 2;
            let line = line.map_err(|e| read_error(line_no, e))?;
            if line.trim().is_empty() {
                continue;
            }
            let mut fields = line.split_whitespace();
            let word = fields.next().unwrap_or_default().to_string();
            let mut vector = Vec::with_capacity(dim);
            for field in fields {
                let value: f64 = field.parse().map_err(|_| Error::Parse {
                    line: line_no,
                    message: format!("invalid number '{field}'"),
                })?;
                if !value.is_finite() {
                    return Err(Error::Parse {
                        line: line_no,
                        message: "non-finite value".into(),
                    });
                }
                vector.push(value);
            }
            if vector.len() != dim {
                return Err(Error::Parse {
                    line: line_no,
                    message: "dimension mismatch".into(),
                });
            }
            if vectors.insert(word.clone(), vector).is_some() {
                log::warn!(
                    "duplicate word '{word}' at line {line_no}; keeping the last occurrence"
                );
            }
            rows += 1;
        }
        if rows != vocab_size {
            return Err(Error::Parse {
                line: rows + 2,
                message: format!("header declares {vocab_size} rows but found {rows}"),
            });
        }
        Ok(Self {
            name: name.into(),
            dim,
            vectors,
        })
    }

    pub fn save(&self, path: impl AsRef<Path>) -> Result<()> {
        let path = path.as_ref();
        fs::write(path, self.to_text()).map_err(|e| Error::io(path, e))
    }

    pub fn write<W: Write>(&self, mut writer: W) -> std::io::Result<()> {
        writer.write_all(self.to_text().as_bytes())
    }

    /// The word2vec text rendering, words sorted lexicographically.
    pub fn to_text(&self) -> String {
        let mut out = format!("{} {}\n", self.vectors.len(), self.dim);
        for (word, vector) in &self.vectors {
            out.push_str(word);
            for v in vector {
                // Display for f64 is the shortest string that parses back to the same bits.
                let _ = write!(out, " {v}");
            }
            out.push('\n');
        }
        out
    }
}

fn parse_header(header: &str) -> Result<(usize, usize)> {
    let malformed = || Error::Parse {
        line: 1,
        message: "malformed header".into(),
    };
    let mut fields = header.split_whitespace();
    let vocab_size = fields
        .next()
        .and_then(|f| f.parse().ok())
        .ok_or_else(malformed)?;
    let dim: usize = fields
        .next()
        .and_then(|f| f.parse().ok())
        .ok_or_else(malformed)?;
    if fields.next().is_some() || dim == 0 {
        return Err(malformed());
    }
    Ok((vocab_size, dim))
}

fn read_error(line: usize, e: std::io::Error) -> Error {
    Error::Parse {
        line,
        message: format!("read error ({e})"),
    }
}
