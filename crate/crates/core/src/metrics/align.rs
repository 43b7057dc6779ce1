use std::cell::OnceCell;
use std::collections::HashSet;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::corpus::TokenSeq;
use crate::error::Error;

/// Token aligner backend.
///
/// * `Exact`: 1 if the token occurs in `b`, else 0.
/// * `SoftChar`: best character-gram Jaccard similarity against any token of
///   `b`. Tokens of at least four characters compare character 4-gram sets;
///   when either token is shorter, identical tokens score 1 and others
///   compare character-bigram sets.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum AlignerKind {
    Exact,
    SoftChar,
}

impl fmt::Display for AlignerKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            AlignerKind::Exact => "Exact",
            AlignerKind::SoftChar => "SoftChar",
        })
    }
}

impl FromStr for AlignerKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self, Error> {
        match s {
            "Exact" => Ok(AlignerKind::Exact),
            "SoftChar" => Ok(AlignerKind::SoftChar),
            other => Err(Error::invalid(format!("unknown aligner `{other}`"))),
        }
    }
}

#[derive(Debug, Clone)]
struct Grams {
    long: bool,
    quads: Vec<[char; 4]>,
    pairs: Vec<[char; 2]>,
}

impl Grams {
    fn of(token: &str) -> Self {
        let chars: Vec<char> = token.chars().collect();
        let mut quads: Vec<[char; 4]> = chars
            .windows(4)
            .map(|w| [w[0], w[1], w[2], w[3]])
            .collect();
        quads.sort_unstable();
        quads.dedup();
        let mut pairs: Vec<[char; 2]> = chars.windows(2).map(|w| [w[0], w[1]]).collect();
        pairs.sort_unstable();
        pairs.dedup();
        Grams {
            long: chars.len() >= 4,
            quads,
            pairs,
        }
    }

    fn similarity(&self, other: &Grams) -> f64 {
        if self.long && other.long {
            jaccard(&self.quads, &other.quads)
        } else {
            jaccard(&self.pairs, &other.pairs)
        }
    }
}

fn jaccard<T: Ord>(a: &[T], b: &[T]) -> f64 {
    let (mut i, mut j, mut inter) = (0, 0, 0usize);
    while i < a.len() && j < b.len() {
        match a[i].cmp(&b[j]) {
            std::cmp::Ordering::Less => i += 1,
            std::cmp::Ordering::Greater => j += 1,
            std::cmp::Ordering::Equal => {
                inter += 1;
                i += 1;
                j += 1;
            }
        }
    }
    let union = a.len() + b.len() - inter;
    if union == 0 {
        0.0
    } else {
        inter as f64 / union as f64
    }
}

/// Character-gram similarity of two tokens, as used by `SoftChar`.
pub fn char_gram_jaccard(a: &str, b: &str) -> f64 {
    if a == b {
        return 1.0;
    }
    Grams::of(a).similarity(&Grams::of(b))
}

/// Lookup structure over the tokens of the aligned-to sequence.
#[derive(Debug, Clone)]
pub struct SourceIndex<'a> {
    tokens: HashSet<&'a str>,
    /// Distinct tokens in first-occurrence order.
    distinct: Vec<&'a str>,
    /// Character grams of `distinct`, built on the first soft lookup.
    grams: OnceCell<Vec<Grams>>,
}

impl<'a> SourceIndex<'a> {
    pub fn new(b: &'a [String]) -> Self {
        let mut tokens = HashSet::with_capacity(b.len());
        let mut distinct = Vec::new();
        for t in b {
            if tokens.insert(t.as_str()) {
                distinct.push(t.as_str());
            }
        }
        SourceIndex {
            tokens,
            distinct,
            grams: OnceCell::new(),
        }
    }

    pub fn contains(&self, token: &str) -> bool {
        self.tokens.contains(token)
    }

    /// Confidence that `token` is grounded in the indexed sequence.
    pub fn confidence(&self, token: &str, aligner: AlignerKind) -> f64 {
        if self.contains(token) {
            return 1.0;
        }
        match aligner {
            AlignerKind::Exact => 0.0,
            AlignerKind::SoftChar => {
                let g = Grams::of(token);
                self.grams
                    .get_or_init(|| self.distinct.iter().map(|t| Grams::of(t)).collect())
                    .iter()
                    .map(|o| g.similarity(o))
                    .fold(0.0, f64::max)
            }
        }
    }
}

/// Per-token grounding confidences of `a` in `b`; same length as `a`.
pub fn align(a: &TokenSeq, b: &TokenSeq, aligner: AlignerKind) -> Vec<f64> {
    if a.is_empty() {
        return Vec::new();
    }
    let index = SourceIndex::new(b);
    a.iter().map(|t| index.confidence(t, aligner)).collect()
}
