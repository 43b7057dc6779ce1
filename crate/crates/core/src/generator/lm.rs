use std::collections::HashMap;

use serde::{Deserialize, Serialize};

use crate::corpus::{Corpus, TokenSeq};
use crate::error::{Error, Result};

pub type TokenId = u32;

/// Reserved start-of-sequence id. Never predicted.
pub const BOS: TokenId = 0;
/// Reserved end-of-sequence id.
pub const EOS: TokenId = 1;

const EOS_COPY_SHARE: f64 = 0.5;

/// Copy-mixture bigram language model conditioned on a source document.
///
/// `p(w | x, prefix) = λ·p_copy(w | x, |prefix|) + (1 − λ)·p_bigram(w | last)`
///
/// `p_copy` is the relative frequency of `w` in `x`, with an EOS share that
/// ramps linearly to one half as the prefix approaches the mean training
/// reference length. `p_bigram` is add-α smoothed over the vocabulary plus
/// EOS.
#[derive(Debug, Clone, PartialEq)]
pub struct ConditionalLM {
    /// id -> token; ids 2.. are sorted lexicographically.
    tokens: Vec<String>,
    index: HashMap<String, TokenId>,
    rows: Vec<BigramRow>,
    copy_weight: f64,
    alpha: f64,
    target_len: f64,
}

#[derive(Debug, Clone, Default, PartialEq)]
struct BigramRow {
    total: u64,
    /// Sorted by next-token id.
    counts: Vec<(TokenId, u64)>,
    lookup: HashMap<TokenId, u64>,
}

impl BigramRow {
    fn from_counts(counts: Vec<(TokenId, u64)>) -> Self {
        let total = counts.iter().map(|&(_, c)| c).sum();
        let lookup = counts.iter().copied().collect();
        BigramRow {
            total,
            counts,
            lookup,
        }
    }
}

/// Accumulates bigram counts over reference summaries (with BOS/EOS) and
/// builds the vocabulary from every source and reference token.
pub fn train_lm(corpus: &Corpus, copy_weight: f64, alpha: f64) -> Result<ConditionalLM> {
    if corpus.is_empty() {
        return Err(Error::invalid("cannot train a language model on an empty corpus"));
    }
    check_params(copy_weight, alpha)?;

    let mut words: Vec<&str> = corpus
        .iter()
        .flat_map(|d| d.source.iter().chain(d.reference.iter()))
        .map(String::as_str)
        .collect();
    words.sort_unstable();
    words.dedup();
    let mut tokens = vec!["<s>".to_owned(), "</s>".to_owned()];
    tokens.extend(words.iter().map(|w| (*w).to_owned()));
    let index: HashMap<String, TokenId> = tokens
        .iter()
        .enumerate()
        .skip(2)
        .map(|(i, t)| (t.clone(), i as TokenId))
        .collect();

    let mut dense: Vec<HashMap<TokenId, u64>> = vec![HashMap::new(); tokens.len()];
    let mut ref_tokens = 0usize;
    for doc in corpus {
        ref_tokens += doc.reference.len();
        let mut prev = BOS;
        for t in doc.reference.iter() {
            let id = index[t.as_str()];
            *dense[prev as usize].entry(id).or_default() += 1;
            prev = id;
        }
        *dense[prev as usize].entry(EOS).or_default() += 1;
    }
    let rows = dense
        .into_iter()
        .map(|m| {
            let mut counts: Vec<_> = m.into_iter().collect();
            counts.sort_unstable();
            BigramRow::from_counts(counts)
        })
        .collect();

    Ok(ConditionalLM {
        tokens,
        index,
        rows,
        copy_weight,
        alpha,
        target_len: ref_tokens as f64 / corpus.len() as f64,
    })
}

fn check_params(copy_weight: f64, alpha: f64) -> Result<()> {
    if !(0.0..=1.0).contains(&copy_weight) {
        return Err(Error::invalid(format!(
            "copy weight must lie in [0,1], got {copy_weight}"
        )));
    }
    if !(alpha > 0.0 && alpha.is_finite()) {
        return Err(Error::invalid(format!("smoothing α must be positive, got {alpha}")));
    }
    Ok(())
}

impl ConditionalLM {
    pub fn copy_weight(&self) -> f64 {
        self.copy_weight
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    /// Mean reference length of the training corpus, in tokens.
    pub fn target_len(&self) -> f64 {
        self.target_len
    }

    /// Vocabulary size including BOS and EOS.
    pub fn vocab_len(&self) -> usize {
        self.tokens.len()
    }

    pub fn token_id(&self, token: &str) -> Option<TokenId> {
        self.index.get(token).copied()
    }

    /// Same counts, different mixture parameters.
    pub fn with_params(&self, copy_weight: f64, alpha: f64) -> Result<Self> {
        check_params(copy_weight, alpha)?;
        Ok(ConditionalLM {
            copy_weight,
            alpha,
            ..self.clone()
        })
    }

    /// Raw bigram count, `None` meaning BOS/EOS for the respective side.
    pub fn bigram_count(&self, prev: Option<&str>, next: Option<&str>) -> u64 {
        let p = match prev {
            None => Some(BOS),
            Some(t) => self.token_id(t),
        };
        let n = match next {
            None => Some(EOS),
            Some(t) => self.token_id(t),
        };
        match (p, n) {
            (Some(p), Some(n)) => self.rows[p as usize].lookup.get(&n).copied().unwrap_or(0),
            _ => 0,
        }
    }

    /// Number of outcomes the bigram model smooths over: real tokens + EOS.
    fn support(&self) -> f64 {
        (self.tokens.len() - 1) as f64
    }

    /// Precomputes everything about `x` the decoder needs.
    pub fn context(&self, x: &TokenSeq) -> Result<DecodeContext<'_>> {
        DecodeContext::new(self, x)
    }

    /// Like [`ConditionalLM::context`] for a borrowed token slice.
    pub fn context_for(&self, x: &[String]) -> Result<DecodeContext<'_>> {
        DecodeContext::new(self, x)
    }

    /// Next-token distribution as `(token, probability)` pairs; EOS is `None`.
    ///
    /// Only entries with non-zero probability are listed.
    pub fn next_token_dist(
        &self,
        x: &TokenSeq,
        prefix: &TokenSeq,
    ) -> Result<Vec<(Option<String>, f64)>> {
        let ctx = self.context(x)?;
        let ids = ctx.encode(prefix);
        let dist = ctx.next_token_dist(&ids);
        Ok(dist
            .iter()
            .enumerate()
            .filter(|(_, &p)| p > 0.0)
            .map(|(id, &p)| {
                let tok = (id as TokenId != EOS).then(|| ctx.token_str(id as TokenId).to_owned());
                (tok, p)
            })
            .collect())
    }

    /// Log-probability of `tokens` (plus EOS when `finished`) given `x`.
    pub fn sequence_logprob(&self, x: &TokenSeq, tokens: &TokenSeq, finished: bool) -> Result<f64> {
        let ctx = self.context(x)?;
        Ok(ctx.sequence_logprob(&ctx.encode(tokens), finished))
    }

    pub(crate) fn to_serialized(&self) -> SerializedLM {
        let mut bigrams = Vec::new();
        for (prev, row) in self.rows.iter().enumerate() {
            for &(next, c) in &row.counts {
                bigrams.push((prev as TokenId, next, c));
            }
        }
        SerializedLM {
            version: LM_VERSION.to_owned(),
            tokens: self.tokens.clone(),
            bigrams,
            copy_weight: self.copy_weight,
            alpha: self.alpha,
            target_len: self.target_len,
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(&self.to_serialized()).expect("serializable model")
    }

    pub fn from_json(s: &str) -> Result<Self> {
        let raw: SerializedLM = serde_json::from_str(s)?;
        if raw.version != LM_VERSION {
            return Err(Error::invalid(format!("unsupported LM version `{}`", raw.version)));
        }
        check_params(raw.copy_weight, raw.alpha)?;
        if raw.tokens.len() < 2 {
            return Err(Error::invalid("LM vocabulary lacks BOS/EOS"));
        }
        let n = raw.tokens.len();
        let mut per_row: Vec<Vec<(TokenId, u64)>> = vec![Vec::new(); n];
        for (p, nx, c) in raw.bigrams {
            if p as usize >= n || nx as usize >= n {
                return Err(Error::invalid("bigram id out of range"));
            }
            per_row[p as usize].push((nx, c));
        }
        let rows = per_row
            .into_iter()
            .map(|mut r| {
                r.sort_unstable();
                BigramRow::from_counts(r)
            })
            .collect();
        let index = raw
            .tokens
            .iter()
            .enumerate()
            .skip(2)
            .map(|(i, t)| (t.clone(), i as TokenId))
            .collect();
        Ok(ConditionalLM {
            tokens: raw.tokens,
            index,
            rows,
            copy_weight: raw.copy_weight,
            alpha: raw.alpha,
            target_len: raw.target_len,
        })
    }
}

const LM_VERSION: &str = "lm-v1";

#[derive(Serialize, Deserialize)]
pub(crate) struct SerializedLM {
    version: String,
    tokens: Vec<String>,
    bigrams: Vec<(TokenId, TokenId, u64)>,
    copy_weight: f64,
    alpha: f64,
    target_len: f64,
}

/// Per-source decoding state.
///
/// Source tokens missing from the vocabulary get extended ids after the
/// vocabulary so the copy component can still emit them.
#[derive(Debug, Clone)]
pub struct DecodeContext<'a> {
    lm: &'a ConditionalLM,
    oov: Vec<String>,
    oov_index: HashMap<String, TokenId>,
    /// (id, count in x), sorted by id.
    copy_counts: Vec<(TokenId, u32)>,
    copy_lookup: HashMap<TokenId, u32>,
    source_len: usize,
}

impl<'a> DecodeContext<'a> {
    fn new(lm: &'a ConditionalLM, x: &[String]) -> Result<Self> {
        if x.is_empty() {
            return Err(Error::invalid("source document is empty"));
        }
        let mut oov: Vec<String> = x
            .iter()
            .filter(|t| !lm.index.contains_key(t.as_str()))
            .cloned()
            .collect();
        oov.sort_unstable();
        oov.dedup();
        let base = lm.tokens.len() as TokenId;
        let oov_index: HashMap<String, TokenId> = oov
            .iter()
            .enumerate()
            .map(|(i, t)| (t.clone(), base + i as TokenId))
            .collect();

        let mut copy_lookup: HashMap<TokenId, u32> = HashMap::new();
        for t in x.iter() {
            let id = lm.index.get(t.as_str()).copied().unwrap_or_else(|| oov_index[t.as_str()]);
            *copy_lookup.entry(id).or_default() += 1;
        }
        let mut copy_counts: Vec<_> = copy_lookup.iter().map(|(&k, &v)| (k, v)).collect();
        copy_counts.sort_unstable();
        Ok(DecodeContext {
            lm,
            oov,
            oov_index,
            copy_counts,
            copy_lookup,
            source_len: x.len(),
        })
    }

    pub fn lm(&self) -> &ConditionalLM {
        self.lm
    }

    /// Size of the extended vocabulary (model vocabulary + source OOVs).
    pub fn dist_len(&self) -> usize {
        self.lm.tokens.len() + self.oov.len()
    }

    pub fn token_str(&self, id: TokenId) -> &str {
        let base = self.lm.tokens.len();
        let i = id as usize;
        if i < base {
            &self.lm.tokens[i]
        } else {
            &self.oov[i - base]
        }
    }

    /// Maps tokens to extended ids. Tokens unknown to both the model and the
    /// source map to `u32::MAX`, which has zero probability everywhere.
    pub fn encode(&self, seq: &TokenSeq) -> Vec<TokenId> {
        seq.iter()
            .map(|t| {
                self.lm
                    .index
                    .get(t.as_str())
                    .or_else(|| self.oov_index.get(t.as_str()))
                    .copied()
                    .unwrap_or(TokenId::MAX)
            })
            .collect()
    }

    pub fn decode(&self, ids: &[TokenId]) -> TokenSeq {
        TokenSeq::new(ids.iter().map(|&i| self.token_str(i).to_owned()))
    }

    fn eos_share(&self, prefix_len: usize) -> f64 {
        (prefix_len as f64 / self.lm.target_len).min(1.0) * EOS_COPY_SHARE
    }

    /// Relative frequency of `id` in the source (no EOS share).
    pub fn copy_frequency(&self, id: TokenId) -> f64 {
        self.copy_lookup.get(&id).copied().unwrap_or(0) as f64 / self.source_len as f64
    }

    /// Dense distribution over the extended vocabulary. Index `BOS` is 0.
    pub fn next_token_dist(&self, prefix: &[TokenId]) -> Vec<f64> {
        let lm = self.lm;
        let lambda = lm.copy_weight;
        let mut dist = vec![0.0; self.dist_len()];

        let row = self.bigram_row(prefix);
        let support = lm.support();
        match row {
            Some(row) => {
                let denom = row.total as f64 + lm.alpha * support;
                let floor = (1.0 - lambda) * lm.alpha / denom;
                dist[1..lm.tokens.len()].fill(floor);
                for &(id, c) in &row.counts {
                    dist[id as usize] += (1.0 - lambda) * c as f64 / denom;
                }
            }
            None => dist[1..lm.tokens.len()].fill((1.0 - lambda) / support),
        }

        let eos = self.eos_share(prefix.len());
        let norm = self.source_len as f64 + eos;
        dist[EOS as usize] += lambda * eos / norm;
        let scale = lambda / norm;
        for &(id, c) in &self.copy_counts {
            dist[id as usize] += scale * c as f64;
        }
        dist
    }

    /// Row of the previous token; `None` when it is a source OOV.
    fn bigram_row(&self, prefix: &[TokenId]) -> Option<&BigramRow> {
        let prev = prefix.last().copied().unwrap_or(BOS);
        self.lm.rows.get(prev as usize)
    }

    /// Probability of one next token, without building the full table.
    pub fn token_prob(&self, prefix: &[TokenId], next: TokenId) -> f64 {
        let lm = self.lm;
        let lambda = lm.copy_weight;
        let support = lm.support();
        let in_vocab = next != BOS && (next as usize) < lm.tokens.len();
        let bigram = if !in_vocab {
            0.0
        } else {
            match self.bigram_row(prefix) {
                Some(row) => {
                    let c = row.lookup.get(&next).copied().unwrap_or(0) as f64;
                    (c + lm.alpha) / (row.total as f64 + lm.alpha * support)
                }
                None => 1.0 / support,
            }
        };
        let eos = self.eos_share(prefix.len());
        let norm = self.source_len as f64 + eos;
        let copy = if next == EOS {
            eos / norm
        } else {
            self.copy_lookup.get(&next).copied().unwrap_or(0) as f64 / norm
        };
        lambda * copy + (1.0 - lambda) * bigram
    }

    /// Sum of step log probabilities, EOS included when `finished`.
    pub fn sequence_logprob(&self, ids: &[TokenId], finished: bool) -> f64 {
        let mut lp = 0.0;
        for i in 0..ids.len() {
            lp += self.token_prob(&ids[..i], ids[i]).ln();
        }
        if finished {
            lp += self.token_prob(ids, EOS).ln();
        }
        lp
    }
}
