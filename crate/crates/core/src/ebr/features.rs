//! Reference-free features of a (source, candidate) pair.

use std::collections::HashSet;

use serde::{Deserialize, Serialize};

use crate::corpus::TokenSeq;
use crate::error::{Error, Result};
use crate::generator::{ConditionalLM, DecodeContext, Hypothesis};
use crate::metrics::{AlignerKind, SourceIndex};

/// Only this many leading source tokens are looked at.
pub const SOURCE_TRUNCATION: usize = 512;

pub const N_FEATURES: usize = 12;

pub const FEATURE_NAMES: [&str; N_FEATURES] = [
    "unigram_precision",
    "bigram_precision",
    "novel_unigram_fraction",
    "novel_bigram_fraction",
    "length_ratio_source",
    "length_ratio_max_len",
    "mean_copy_probability",
    "mean_token_logprob",
    "repeated_bigram_fraction",
    "soft_char_alignment",
    "source_coverage",
    "bias",
];

/// Floor applied to generator probabilities so the log-likelihood feature
/// stays finite for tokens the generator cannot emit.
const MIN_PROB: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct FeatureVector(pub [f64; N_FEATURES]);

impl FeatureVector {
    pub fn values(&self) -> &[f64; N_FEATURES] {
        &self.0
    }

    pub fn get(&self, name: &str) -> Option<f64> {
        FEATURE_NAMES.iter().position(|n| *n == name).map(|i| self.0[i])
    }

    pub fn is_finite(&self) -> bool {
        self.0.iter().all(|v| v.is_finite())
    }
}

/// Precomputed per-source state, reused across the candidates of a document.
pub struct FeatureExtractor<'a> {
    source: &'a [String],
    index: SourceIndex<'a>,
    bigrams: HashSet<(&'a str, &'a str)>,
    ctx: DecodeContext<'a>,
    max_len: usize,
}

impl<'a> FeatureExtractor<'a> {
    pub fn new(lm: &'a ConditionalLM, x: &'a TokenSeq, max_len: usize) -> Result<Self> {
        if max_len == 0 {
            return Err(Error::invalid("feature max_len must be positive"));
        }
        let src = &x[..x.len().min(SOURCE_TRUNCATION)];
        let ctx = lm.context_for(src)?;
        Ok(FeatureExtractor {
            index: SourceIndex::new(src),
            bigrams: src.windows(2).map(|w| (w[0].as_str(), w[1].as_str())).collect(),
            source: src,
            ctx,
            max_len,
        })
    }

    pub fn extract(&self, candidate: &Hypothesis) -> Result<FeatureVector> {
        let y = &candidate.tokens;
        if y.is_empty() {
            return Err(Error::invalid("cannot extract features of an empty candidate"));
        }
        let n = y.len() as f64;

        let in_source = y.iter().filter(|t| self.index.contains(t)).count() as f64;
        let types: HashSet<&str> = y.iter().map(String::as_str).collect();
        let novel_types = types.iter().filter(|t| !self.index.contains(t)).count() as f64;

        let cand_bigrams: Vec<(&str, &str)> =
            y.windows(2).map(|w| (w[0].as_str(), w[1].as_str())).collect();
        let bigram_types: HashSet<(&str, &str)> = cand_bigrams.iter().copied().collect();
        let (bigram_precision, novel_bigrams, repeated_bigrams) = if cand_bigrams.is_empty() {
            (0.0, 0.0, 0.0)
        } else {
            let nb = cand_bigrams.len() as f64;
            let hits = cand_bigrams.iter().filter(|b| self.bigrams.contains(*b)).count() as f64;
            let novel = bigram_types.iter().filter(|b| !self.bigrams.contains(*b)).count() as f64;
            (
                hits / nb,
                novel / bigram_types.len() as f64,
                (nb - bigram_types.len() as f64) / nb,
            )
        };

        let ids = self.ctx.encode(y);
        let copy = ids.iter().map(|&id| self.ctx.copy_frequency(id)).sum::<f64>() / n;
        let mut loglik = 0.0;
        for i in 0..ids.len() {
            loglik += self.ctx.token_prob(&ids[..i], ids[i]).max(MIN_PROB).ln();
        }
        let mut steps = n;
        if candidate.finished {
            loglik += self
                .ctx
                .token_prob(&ids, crate::generator::EOS)
                .max(MIN_PROB)
                .ln();
            steps += 1.0;
        }

        let soft = y
            .iter()
            .map(|t| self.index.confidence(t, AlignerKind::SoftChar))
            .sum::<f64>()
            / n;
        let covered = self.source.iter().filter(|t| types.contains(t.as_str())).count() as f64;

        let f = FeatureVector([
            in_source / n,
            bigram_precision,
            novel_types / types.len() as f64,
            novel_bigrams,
            n / self.source.len() as f64,
            n / self.max_len as f64,
            copy,
            loglik / steps,
            repeated_bigrams,
            soft,
            covered / self.source.len() as f64,
            1.0,
        ]);
        debug_assert!(f.is_finite());
        Ok(f)
    }
}

/// Features of one candidate. Builds the per-source state on every call;
/// use [`FeatureExtractor`] for many candidates of one source.
pub fn extract_features(
    x: &TokenSeq,
    candidate: &Hypothesis,
    lm: &ConditionalLM,
    max_len: usize,
) -> Result<FeatureVector> {
    FeatureExtractor::new(lm, x, max_len)?.extract(candidate)
}
