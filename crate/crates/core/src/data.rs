// Copyright 2026 The groverfeat Developers
//
// Licensed under the Apache License, Version 2.0 (the "License"); you may not use this file except
// in compliance with the License. You may obtain a copy of the License at
//
//     https://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software distributed under the License
// is distributed on an "AS IS" BASIS, WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express
// or implied. See the License for the specific language governing permissions and limitations under
// the License.

//! Datasets, tokenization and the frozen embedding store.
//!
//! Embedding exchange file layout, all integers little-endian:
//!
//! ```text
//! "QTPE" | version u32 | vocab_size u32 | dim u32
//! vocab_size × ( token_len u16 | token UTF-8 | dim × f32 )
//! ```

use std::collections::{HashMap, HashSet};
use std::fmt;
use std::fs::File;
use std::io::{BufRead, BufReader, Read, Write};
use std::path::Path;
use std::str::FromStr;

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::seed;

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct LabeledExample {
    pub id: String,
    pub text: String,
    pub label: usize,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Dataset {
    pub examples: Vec<LabeledExample>,
    pub num_classes: usize,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct Header {
    num_classes: usize,
}

pub fn load_dataset(path: impl AsRef<Path>) -> Result<Dataset> {
    let path = path.as_ref();
    let file = File::open(path).map_err(|e| Error::Data(format!("{}: {e}", path.display())))?;
    parse_dataset(BufReader::new(file))
}

/// Parses JSONL with one `{"id", "text", "label"}` object per line. An
/// optional first line `{"num_classes": C}` fixes the class count; otherwise
/// it is `max label + 1`.
pub fn parse_dataset<R: BufRead>(reader: R) -> Result<Dataset> {
    let mut header: Option<usize> = None;
    let mut examples: Vec<LabeledExample> = Vec::new();
    let mut seen = HashSet::new();
    for (i, line) in reader.lines().enumerate() {
        let line_no = i + 1;
        let line = line?;
        let trimmed = line.trim();
        if trimmed.is_empty() {
            continue;
        }
        if examples.is_empty() && header.is_none() {
            if let Ok(h) = serde_json::from_str::<Header>(trimmed) {
                if h.num_classes < 2 {
                    return Err(Error::Data(format!("line {line_no}: num_classes must be ≥ 2")));
                }
                header = Some(h.num_classes);
                continue;
            }
        }
        let example: LabeledExample = serde_json::from_str(trimmed)
            .map_err(|e| Error::Data(format!("line {line_no}: malformed example: {e}")))?;
        if example.text.trim().is_empty() {
            return Err(Error::Data(format!("example {:?} has empty text", example.id)));
        }
        if let Some(c) = header {
            if example.label >= c {
                return Err(Error::Data(format!(
                    "example {:?} has label {} outside 0..{c}",
                    example.id, example.label
                )));
            }
        }
        if !seen.insert(example.id.clone()) {
            return Err(Error::Data(format!("duplicate example id {:?}", example.id)));
        }
        examples.push(example);
    }
    if examples.is_empty() {
        return Err(Error::Data("no examples".into()));
    }
    let inferred = examples.iter().map(|e| e.label).max().unwrap_or(0) + 1;
    let num_classes = header.unwrap_or(inferred.max(2));
    Ok(Dataset { examples, num_classes })
}

/// Writes a dataset in the format [`parse_dataset`] reads, header first.
pub fn write_dataset<W: Write>(dataset: &Dataset, mut out: W) -> Result<()> {
    writeln!(out, "{}", serde_json::json!({ "num_classes": dataset.num_classes }))?;
    for e in &dataset.examples {
        writeln!(out, "{}", serde_json::to_string(e).map_err(|e| Error::Data(e.to_string()))?)?;
    }
    Ok(())
}

/// Lowercase, split on Unicode whitespace, strip surrounding ASCII
/// punctuation, drop empties.
pub fn tokenize(text: &str) -> Vec<String> {
    text.split_whitespace()
        .map(|t| t.trim_matches(|c: char| c.is_ascii_punctuation()).to_lowercase())
        .filter(|t| !t.is_empty())
        .collect()
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum OovPolicy {
    /// Deterministic pseudo-random unit vector keyed by the token.
    #[default]
    Hash,
    Zero,
    Skip,
}

impl fmt::Display for OovPolicy {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            OovPolicy::Hash => "hash",
            OovPolicy::Zero => "zero",
            OovPolicy::Skip => "skip",
        })
    }
}

impl FromStr for OovPolicy {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "hash" => Ok(OovPolicy::Hash),
            "zero" => Ok(OovPolicy::Zero),
            "skip" => Ok(OovPolicy::Skip),
            other => Err(Error::Config(format!("unknown OOV policy {other:?}, expected hash, zero or skip"))),
        }
    }
}

/// Token → vector table, immutable once built.
#[derive(Clone, Debug, PartialEq)]
pub struct EmbeddingStore {
    dim: usize,
    tokens: Vec<String>,
    vectors: Vec<Vec<f32>>,
    index: HashMap<String, usize>,
    oov: OovPolicy,
}

const EMBEDDING_MAGIC: &[u8; 4] = b"QTPE";
pub const EMBEDDING_VERSION: u32 = 1;

/// Unit vector for `token`, seeded by a stable 64-bit hash of its UTF-8
/// bytes. Components are uniform in [-1, 1) before normalization.
pub fn hash_vector(token: &str, dim: usize) -> Vec<f64> {
    let mut rng = seed::rng(seed::stable_hash(token.as_bytes()));
    let mut v: Vec<f64> = (0..dim).map(|_| rng.gen::<f64>() * 2.0 - 1.0).collect();
    let norm = v.iter().map(|x| x * x).sum::<f64>().sqrt();
    if norm > 0.0 {
        v.iter_mut().for_each(|x| *x /= norm);
    }
    v
}

impl EmbeddingStore {
    pub fn new(dim: usize, oov: OovPolicy) -> Result<Self> {
        if dim == 0 {
            return Err(Error::Config("embedding dimension must be ≥ 1".into()));
        }
        Ok(Self { dim, tokens: Vec::new(), vectors: Vec::new(), index: HashMap::new(), oov })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn len(&self) -> usize {
        self.tokens.len()
    }

    pub fn is_empty(&self) -> bool {
        self.tokens.is_empty()
    }

    pub fn oov_policy(&self) -> OovPolicy {
        self.oov
    }

    pub fn set_oov_policy(&mut self, oov: OovPolicy) {
        self.oov = oov;
    }

    pub fn insert(&mut self, token: impl Into<String>, vector: Vec<f32>) -> Result<()> {
        let token = token.into();
        if vector.len() != self.dim {
            return Err(Error::Data(format!(
                "vector for {token:?} has {} components, store dim is {}",
                vector.len(),
                self.dim
            )));
        }
        if token.len() > u16::MAX as usize {
            return Err(Error::Data(format!("token of {} bytes exceeds the 65535-byte limit", token.len())));
        }
        if self.index.contains_key(&token) {
            return Err(Error::Data(format!("duplicate token {token:?}")));
        }
        self.index.insert(token.clone(), self.tokens.len());
        self.tokens.push(token);
        self.vectors.push(vector);
        Ok(())
    }

    /// Stored vector, bit-exact.
    pub fn get(&self, token: &str) -> Option<&[f32]> {
        self.index.get(token).map(|&i| self.vectors[i].as_slice())
    }

    /// Vector for `token` under the OOV policy; `None` means drop the token.
    pub fn lookup(&self, token: &str) -> Option<Vec<f64>> {
        if let Some(v) = self.get(token) {
            return Some(v.iter().map(|&x| f64::from(x)).collect());
        }
        match self.oov {
            OovPolicy::Hash => Some(hash_vector(token, self.dim)),
            OovPolicy::Zero => Some(vec![0.0; self.dim]),
            OovPolicy::Skip => None,
        }
    }

    pub fn read_from<R: Read>(mut input: R, oov: OovPolicy) -> Result<Self> {
        let mut magic = [0u8; 4];
        read_exact(&mut input, &mut magic, "header")?;
        if &magic != EMBEDDING_MAGIC {
            return Err(Error::Data(format!("bad embedding magic {magic:?}")));
        }
        let version = read_u32(&mut input)?;
        if version != EMBEDDING_VERSION {
            return Err(Error::Data(format!("unsupported embedding file version {version}")));
        }
        let vocab = read_u32(&mut input)? as usize;
        let dim = read_u32(&mut input)? as usize;
        let mut store = Self::new(dim, oov).map_err(|e| Error::Data(e.to_string()))?;
        let mut len_buf = [0u8; 2];
        let mut f_buf = [0u8; 4];
        for record in 0..vocab {
            read_exact(&mut input, &mut len_buf, "record")?;
            let mut token = vec![0u8; u16::from_le_bytes(len_buf) as usize];
            read_exact(&mut input, &mut token, "token")?;
            let token =
                String::from_utf8(token).map_err(|_| Error::Data(format!("record {record}: token is not UTF-8")))?;
            let mut vector = Vec::with_capacity(dim);
            for _ in 0..dim {
                read_exact(&mut input, &mut f_buf, "vector")?;
                vector.push(f32::from_le_bytes(f_buf));
            }
            store.insert(token, vector)?;
        }
        Ok(store)
    }

    pub fn load(path: impl AsRef<Path>, oov: OovPolicy) -> Result<Self> {
        let path = path.as_ref();
        let file = File::open(path).map_err(|e| Error::Data(format!("{}: {e}", path.display())))?;
        Self::read_from(BufReader::new(file), oov)
    }

    /// Writes the exchange format in insertion order.
    pub fn write_to<W: Write>(&self, mut out: W) -> Result<()> {
        out.write_all(EMBEDDING_MAGIC)?;
        for v in [EMBEDDING_VERSION, self.tokens.len() as u32, self.dim as u32] {
            out.write_all(&v.to_le_bytes())?;
        }
        for (token, vector) in self.tokens.iter().zip(&self.vectors) {
            out.write_all(&(token.len() as u16).to_le_bytes())?;
            out.write_all(token.as_bytes())?;
            for x in vector {
                out.write_all(&x.to_le_bytes())?;
            }
        }
        out.flush()?;
        Ok(())
    }
}

fn read_exact<R: Read>(input: &mut R, buf: &mut [u8], what: &str) -> Result<()> {
    input.read_exact(buf).map_err(|e| Error::Data(format!("truncated embedding file ({what}): {e}")))
}

fn read_u32<R: Read>(input: &mut R) -> Result<u32> {
    let mut b = [0u8; 4];
    read_exact(input, &mut b, "header")?;
    Ok(u32::from_le_bytes(b))
}

/// Token vectors surviving the OOV policy, in order.
pub fn token_vectors(store: &EmbeddingStore, tokens: &[String]) -> Vec<Vec<f64>> {
    tokens.iter().filter_map(|t| store.lookup(t)).collect()
}

/// Mean of the token vectors.
pub fn sentence_embedding(store: &EmbeddingStore, tokens: &[String]) -> Result<Vec<f64>> {
    mean_vector(&token_vectors(store, tokens), store.dim())
}

pub(crate) fn mean_vector(vectors: &[Vec<f64>], dim: usize) -> Result<Vec<f64>> {
    if vectors.is_empty() {
        return Err(Error::Degenerate("no tokens survive the OOV policy".into()));
    }
    let mut mean = vec![0.0; dim];
    for v in vectors {
        for (m, x) in mean.iter_mut().zip(v) {
            *m += x;
        }
    }
    let n = vectors.len() as f64;
    mean.iter_mut().for_each(|m| *m /= n);
    Ok(mean)
}
