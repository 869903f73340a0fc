//! JSON description of an embedding library.
//!
//! ```json
//! {
//!   "generic_embedding_path": "generic.vec",
//!   "entries": [
//!     { "name": "cinema", "corpus_path": "cinema.txt", "embedding_path": "cinema.vec" }
//!   ],
//!   "defaults": { "k": 500, "sigma": 0.01, "target_dim": 300, "min_count": 5 }
//! }
//! ```
//!
//! Relative paths are resolved against the manifest's directory.

use std::collections::HashSet;
use std::fs;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::corpus::{Corpus, StopwordList, DEFAULT_MIN_COUNT};
use crate::embedding::EmbeddingStore;
use crate::error::{Error, Result};
use crate::fusion::DEFAULT_TARGET_DIM;
use crate::similarity::DEFAULT_SIGMA;
use crate::weighting::{CorpusLibrary, DEFAULT_SUPPORT_SIZE};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ManifestEntry {
    pub name: String,
    pub corpus_path: PathBuf,
    pub embedding_path: PathBuf,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct Defaults {
    pub k: usize,
    pub sigma: f64,
    pub target_dim: usize,
    pub min_count: u64,
    pub stopword_path: Option<PathBuf>,
}

impl Default for Defaults {
    fn default() -> Self {
        Self {
            k: DEFAULT_SUPPORT_SIZE,
            sigma: DEFAULT_SIGMA,
            target_dim: DEFAULT_TARGET_DIM,
            min_count: DEFAULT_MIN_COUNT,
            stopword_path: None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Manifest {
    pub generic_embedding_path: PathBuf,
    pub entries: Vec<ManifestEntry>,
    #[serde(default)]
    pub defaults: Defaults,
}

impl Manifest {
    /// Parses and validates a manifest file, resolving its paths.
    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        let mut manifest: Manifest = serde_json::from_str(&text)?;
        let base = path.parent().unwrap_or_else(|| Path::new("."));
        manifest.resolve(base);
        manifest.validate()?;
        Ok(manifest)
    }

    fn resolve(&mut self, base: &Path) {
        let fix = |p: &mut PathBuf| {
            if p.is_relative() {
                *p = base.join(&*p);
            }
        };
        fix(&mut self.generic_embedding_path);
        for e in &mut self.entries {
            fix(&mut e.corpus_path);
            fix(&mut e.embedding_path);
        }
        if let Some(p) = self.defaults.stopword_path.as_mut() {
            fix(p);
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.entries.is_empty() {
            return Err(Error::Manifest("no entries".into()));
        }
        let mut names = HashSet::new();
        for e in &self.entries {
            if !names.insert(e.name.as_str()) {
                return Err(Error::Manifest(format!(
                    "duplicate entry name '{}'",
                    e.name
                )));
            }
        }
        let d = &self.defaults;
        if d.k == 0
            || d.target_dim == 0
            || d.min_count == 0
            || !(d.sigma > 0.0 && d.sigma.is_finite())
        {
            return Err(Error::Manifest("defaults must be positive".into()));
        }
        let paths = std::iter::once(&self.generic_embedding_path)
            .chain(
                self.entries
                    .iter()
                    .flat_map(|e| [&e.corpus_path, &e.embedding_path]),
            )
            .chain(d.stopword_path.as_ref());
        for p in paths {
            if !p.exists() {
                return Err(Error::Manifest(format!("missing path {}", p.display())));
            }
        }
        Ok(())
    }

    pub fn entry(&self, name: &str) -> Option<&ManifestEntry> {
        self.entries.iter().find(|e| e.name == name)
    }

    pub fn stopwords(&self) -> Result<StopwordList> {
        match &self.defaults.stopword_path {
            Some(p) => StopwordList::load(p),
            None => Ok(StopwordList::english()),
        }
    }

    pub fn load_generic(&self) -> Result<EmbeddingStore> {
        Ok(EmbeddingStore::load(&self.generic_embedding_path)?.with_name("generic"))
    }

    pub fn load_corpus(&self, entry: &ManifestEntry, min_count: u64) -> Result<Corpus> {
        Corpus::load(&entry.corpus_path, entry.name.clone(), min_count)
    }

    /// Loads every corpus plus the generic embedding. Domain embeddings are
    /// not read; use [`Manifest::load_embedding`] for the ones you need.
    pub fn load_library(&self, min_count: u64) -> Result<CorpusLibrary> {
        let corpora = self
            .entries
            .iter()
            .map(|e| self.load_corpus(e, min_count))
            .collect::<Result<Vec<_>>>()?;
        CorpusLibrary::new(corpora, self.load_generic()?)
    }

    pub fn load_embedding(&self, name: &str) -> Result<EmbeddingStore> {
        let entry = self
            .entry(name)
            .ok_or_else(|| Error::Manifest(format!("no entry named '{name}'")))?;
        Ok(EmbeddingStore::load(&entry.embedding_path)?.with_name(name))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn write(dir: &Path, name: &str, text: &str) {
        fs::write(dir.join(name), text).unwrap();
    }

    fn fixture() -> tempfile::TempDir {
        let dir = tempfile::tempdir().unwrap();
        write(dir.path(), "g.vec", "2 2\napple 1 0\ntrain 0 1\n");
        write(dir.path(), "a.txt", "apple apple pie\n");
        write(dir.path(), "a.vec", "1 1\napple 1\n");
        dir
    }

    #[test]
    fn resolves_relative_paths_and_fills_defaults() {
        let dir = fixture();
        write(
            dir.path(),
            "m.json",
            r#"{"generic_embedding_path":"g.vec","entries":[{"name":"a","corpus_path":"a.txt","embedding_path":"a.vec"}]}"#,
        );
        let m = Manifest::load(dir.path().join("m.json")).unwrap();
        assert_eq!(m.defaults, Defaults::default());
        assert_eq!(m.entries[0].corpus_path, dir.path().join("a.txt"));
        let lib = m.load_library(1).unwrap();
        assert_eq!(lib.len(), 1);
        assert_eq!(lib.corpora()[0].count("apple"), 2);
        assert_eq!(m.load_embedding("a").unwrap().name(), "a");
        assert!(m.load_embedding("b").is_err());
    }

    #[test]
    fn rejects_invalid_manifests() {
        let dir = fixture();
        let cases = [
            r#"{"generic_embedding_path":"g.vec","entries":[]}"#,
            r#"{"generic_embedding_path":"g.vec","entries":[{"name":"a","corpus_path":"a.txt","embedding_path":"a.vec"},{"name":"a","corpus_path":"a.txt","embedding_path":"a.vec"}]}"#,
            r#"{"generic_embedding_path":"nope.vec","entries":[{"name":"a","corpus_path":"a.txt","embedding_path":"a.vec"}]}"#,
            r#"{"generic_embedding_path":"g.vec","entries":[{"name":"a","corpus_path":"a.txt","embedding_path":"a.vec"}],"defaults":{"sigma":0}}"#,
            r#"{"entries":[]}"#,
        ];
        for case in cases {
            write(dir.path(), "m.json", case);
            assert!(Manifest::load(dir.path().join("m.json")).is_err(), "{case}");
        }
    }
}
