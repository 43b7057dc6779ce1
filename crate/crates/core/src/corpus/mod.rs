//! Documents, tokenization and corpus files.

mod synthetic;

use std::collections::HashSet;
use std::fmt;
use std::io::{BufRead, BufReader};
use std::ops::Deref;
use std::path::Path;

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub use synthetic::make_synthetic_corpus;

const DETACHED: &[char] = &['.', ',', '!', '?', ';', ':', '"', '(', ')', '\''];

/// An ordered sequence of lowercase tokens. BOS/EOS are never stored.
#[derive(Debug, Clone, Default, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(transparent)]
pub struct TokenSeq(Vec<String>);

impl TokenSeq {
    /// Builds a sequence from already-tokenized strings.
    ///
    /// Panics if a token is empty or contains whitespace.
    pub fn new<S: Into<String>>(tokens: impl IntoIterator<Item = S>) -> Self {
        let tokens: Vec<String> = tokens.into_iter().map(Into::into).collect();
        for t in &tokens {
            assert!(
                !t.is_empty() && !t.chars().any(char::is_whitespace),
                "invalid token {t:?}"
            );
        }
        TokenSeq(tokens)
    }

    /// Whitespace-separated convenience constructor, mostly for tests.
    pub fn from_words(s: &str) -> Self {
        TokenSeq(s.split_whitespace().map(str::to_owned).collect())
    }

    pub fn tokens(&self) -> &[String] {
        &self.0
    }

    pub fn into_inner(self) -> Vec<String> {
        self.0
    }

    /// First `n` tokens.
    pub fn truncated(&self, n: usize) -> TokenSeq {
        TokenSeq(self.0.iter().take(n).cloned().collect())
    }
}

impl Deref for TokenSeq {
    type Target = [String];

    fn deref(&self) -> &[String] {
        &self.0
    }
}

impl fmt::Display for TokenSeq {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0.join(" "))
    }
}

/// Lowercases, splits on Unicode whitespace and detaches punctuation.
///
/// Apostrophes between two alphanumeric characters stay inside the token;
/// hyphens are never split.
pub fn tokenize(text: &str) -> TokenSeq {
    let lower = text.to_lowercase();
    let mut out = Vec::new();
    for chunk in lower.split_whitespace() {
        let chars: Vec<char> = chunk.chars().collect();
        let mut cur = String::new();
        for (i, &c) in chars.iter().enumerate() {
            let internal_apostrophe = c == '\''
                && i > 0
                && i + 1 < chars.len()
                && chars[i - 1].is_alphanumeric()
                && chars[i + 1].is_alphanumeric();
            if DETACHED.contains(&c) && !internal_apostrophe {
                if !cur.is_empty() {
                    out.push(std::mem::take(&mut cur));
                }
                out.push(c.to_string());
            } else {
                cur.push(c);
            }
        }
        if !cur.is_empty() {
            out.push(cur);
        }
    }
    TokenSeq(out)
}

/// A source document paired with its reference summary.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Document {
    pub id: String,
    pub source: TokenSeq,
    pub reference: TokenSeq,
}

impl Document {
    pub fn new(id: impl Into<String>, source: TokenSeq, reference: TokenSeq) -> Result<Self> {
        let id = id.into();
        if source.is_empty() {
            return Err(Error::EmptySource(id));
        }
        if reference.is_empty() {
            return Err(Error::EmptyReference(id));
        }
        Ok(Document {
            id,
            source,
            reference,
        })
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Corpus {
    pub name: String,
    documents: Vec<Document>,
}

impl Corpus {
    /// Fails on duplicate ids.
    pub fn new(name: impl Into<String>, documents: Vec<Document>) -> Result<Self> {
        let mut seen = HashSet::new();
        for d in &documents {
            if !seen.insert(d.id.as_str()) {
                return Err(Error::DuplicateId(d.id.clone()));
            }
        }
        Ok(Corpus {
            name: name.into(),
            documents,
        })
    }

    pub fn documents(&self) -> &[Document] {
        &self.documents
    }

    pub fn len(&self) -> usize {
        self.documents.len()
    }

    pub fn is_empty(&self) -> bool {
        self.documents.is_empty()
    }

    pub fn get(&self, id: &str) -> Option<&Document> {
        self.documents.iter().find(|d| d.id == id)
    }

    pub fn iter(&self) -> std::slice::Iter<'_, Document> {
        self.documents.iter()
    }

    /// Writes the corpus as line-delimited JSON (`id`, `source`, `reference`).
    ///
    /// Token sequences are joined by single spaces, which `tokenize` maps back
    /// to the same tokens.
    pub fn to_jsonl(&self) -> String {
        let mut out = String::new();
        for d in &self.documents {
            let rec = RawRecord {
                id: d.id.clone(),
                source: d.source.to_string(),
                reference: d.reference.to_string(),
            };
            out.push_str(&serde_json::to_string(&rec).expect("serializable record"));
            out.push('\n');
        }
        out
    }
}

impl<'a> IntoIterator for &'a Corpus {
    type Item = &'a Document;
    type IntoIter = std::slice::Iter<'a, Document>;

    fn into_iter(self) -> Self::IntoIter {
        self.documents.iter()
    }
}

#[derive(Serialize)]
struct RawRecord {
    id: String,
    source: String,
    reference: String,
}

/// Loads a line-delimited JSON corpus file. Blank lines are skipped.
pub fn load_corpus(path: &Path) -> Result<Corpus> {
    let file = std::fs::File::open(path).map_err(|e| Error::io(path, e))?;
    let mut docs = Vec::new();
    for (idx, line) in BufReader::new(file).lines().enumerate() {
        let line = line.map_err(|e| Error::io(path, e))?;
        let lineno = idx + 1;
        if line.trim().is_empty() {
            continue;
        }
        let value: serde_json::Value =
            serde_json::from_str(&line).map_err(|e| Error::MalformedLine {
                path: path.to_owned(),
                line: lineno,
                message: e.to_string(),
            })?;
        let field = |name: &str| -> Result<String> {
            value
                .get(name)
                .and_then(|v| v.as_str())
                .map(str::to_owned)
                .ok_or_else(|| Error::MissingField {
                    path: path.to_owned(),
                    line: lineno,
                    field: name.to_owned(),
                })
        };
        let id = field("id")?;
        let source = tokenize(&field("source")?);
        let reference = tokenize(&field("reference")?);
        docs.push(Document::new(id, source, reference)?);
    }
    let name = path
        .file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_default();
    Corpus::new(name, docs)
}

/// Train/validation/test fractions plus the shuffle seed.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SplitSpec {
    pub train_fraction: f64,
    pub val_fraction: f64,
    pub test_fraction: f64,
    pub seed: u64,
}

impl SplitSpec {
    pub fn validate(&self) -> Result<()> {
        let fr = [self.train_fraction, self.val_fraction, self.test_fraction];
        if fr.iter().any(|f| !f.is_finite() || *f < 0.0 || *f > 1.0) {
            return Err(Error::invalid(format!(
                "split fractions must lie in [0,1], got {fr:?}"
            )));
        }
        let sum: f64 = fr.iter().sum();
        if (sum - 1.0).abs() > 1e-9 {
            return Err(Error::invalid(format!(
                "split fractions must sum to 1, got {sum}"
            )));
        }
        Ok(())
    }
}

/// Shuffles by seed and cuts into (train, val, test).
///
/// Validation and test receive `floor(fraction * n)` documents; the remainder
/// goes to train.
pub fn split_corpus(corpus: &Corpus, spec: &SplitSpec) -> Result<(Corpus, Corpus, Corpus)> {
    spec.validate()?;
    if corpus.is_empty() {
        return Err(Error::invalid("cannot split an empty corpus"));
    }
    let n = corpus.len();
    let n_val = (spec.val_fraction * n as f64).floor() as usize;
    let n_test = (spec.test_fraction * n as f64).floor() as usize;
    let n_train = n - n_val - n_test;

    let mut order: Vec<usize> = (0..n).collect();
    order.shuffle(&mut ChaCha8Rng::seed_from_u64(spec.seed));

    let take = |idx: &[usize], suffix: &str| {
        let docs = idx.iter().map(|&i| corpus.documents[i].clone()).collect();
        Corpus {
            name: format!("{}-{suffix}", corpus.name),
            documents: docs,
        }
    };
    Ok((
        take(&order[..n_train], "train"),
        take(&order[n_train..n_train + n_val], "val"),
        take(&order[n_train + n_val..], "test"),
    ))
}
