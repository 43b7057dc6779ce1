//! Toy conditional summarizer and its decoders.
//!
//! [`ConditionalLM`] mixes a copy distribution over the source with an
//! add-α bigram model trained on reference summaries. Decoding is plain beam
//! search or group-wise diverse beam search.

mod lm;
mod search;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::corpus::{Corpus, TokenSeq};
use crate::error::{Error, Result};

pub use lm::{train_lm, ConditionalLM, DecodeContext, TokenId, BOS, EOS};
pub use search::{beam_search, diverse_beam_search, greedy_decode};

/// A decoded summary with its generator log-probability.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Hypothesis {
    pub tokens: TokenSeq,
    /// Sum of per-step log probabilities, EOS included when `finished`.
    pub logprob: f64,
    /// `false` for hypotheses cut at `max_len`.
    #[serde(default = "default_finished")]
    pub finished: bool,
}

fn default_finished() -> bool {
    true
}

/// Decoder settings.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GenConfig {
    pub beams: usize,
    pub groups: usize,
    pub diversity_weight: f64,
    pub max_len: usize,
    /// Number of candidates returned.
    pub k: usize,
}

impl GenConfig {
    pub fn validate(&self) -> Result<()> {
        if self.beams == 0 {
            return Err(Error::invalid("beams must be at least 1"));
        }
        if self.groups == 0 || !self.beams.is_multiple_of(self.groups) {
            return Err(Error::invalid(format!(
                "groups ({}) must divide beams ({})",
                self.groups, self.beams
            )));
        }
        if self.k == 0 || self.k > self.beams {
            return Err(Error::invalid(format!(
                "k ({}) must lie in 1..=beams ({})",
                self.k, self.beams
            )));
        }
        if self.max_len == 0 {
            return Err(Error::invalid("max_len must be at least 1"));
        }
        if !(self.diversity_weight.is_finite() && self.diversity_weight >= 0.0) {
            return Err(Error::invalid(format!(
                "diversity weight must be a non-negative number, got {}",
                self.diversity_weight
            )));
        }
        Ok(())
    }
}

/// Up to `k` distinct candidates for one document, best logprob first.
///
/// Position 0 is the top-beam baseline output.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CandidateSet {
    pub doc_id: String,
    pub candidates: Vec<Hypothesis>,
}

impl CandidateSet {
    pub fn new(doc_id: impl Into<String>, candidates: Vec<Hypothesis>) -> Result<Self> {
        let doc_id = doc_id.into();
        if candidates.is_empty() {
            return Err(Error::invalid(format!("document `{doc_id}`: no candidates")));
        }
        for (i, a) in candidates.iter().enumerate() {
            if candidates[..i].iter().any(|b| b.tokens == a.tokens) {
                return Err(Error::invalid(format!(
                    "document `{doc_id}`: duplicate candidate `{}`",
                    a.tokens
                )));
            }
        }
        Ok(CandidateSet { doc_id, candidates })
    }

    pub fn len(&self) -> usize {
        self.candidates.len()
    }

    pub fn is_empty(&self) -> bool {
        self.candidates.is_empty()
    }

    /// The first `k` candidates (nested prefixes of one decoder run).
    pub fn top(&self, k: usize) -> CandidateSet {
        CandidateSet {
            doc_id: self.doc_id.clone(),
            candidates: self.candidates.iter().take(k).cloned().collect(),
        }
    }
}

/// Candidates for every document of `corpus`, in corpus order. Uses
/// diverse beam search when `cfg` asks for more than one group.
pub fn generate_candidates(
    lm: &ConditionalLM,
    corpus: &Corpus,
    cfg: &GenConfig,
) -> Result<Vec<CandidateSet>> {
    cfg.validate()?;
    corpus
        .documents()
        .par_iter()
        .map(|d| {
            let hyps = if cfg.groups > 1 {
                diverse_beam_search(lm, &d.source, cfg)?
            } else {
                beam_search(lm, &d.source, cfg)?
            };
            CandidateSet::new(d.id.clone(), hyps)
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cfg(beams: usize, groups: usize, k: usize) -> GenConfig {
        GenConfig {
            beams,
            groups,
            diversity_weight: 0.0,
            max_len: 4,
            k,
        }
    }

    #[test]
    fn config_invariants() {
        assert!(cfg(8, 4, 8).validate().is_ok());
        assert!(cfg(0, 1, 1).validate().is_err());
        assert!(cfg(8, 3, 8).validate().is_err());
        assert!(cfg(4, 2, 5).validate().is_err());
        let mut c = cfg(4, 2, 4);
        c.diversity_weight = -0.1;
        assert!(c.validate().is_err());
        c.diversity_weight = 0.0;
        c.max_len = 0;
        assert!(c.validate().is_err());
    }

    #[test]
    fn candidate_set_rejects_duplicates() {
        let h = |s: &str| Hypothesis {
            tokens: TokenSeq::from_words(s),
            logprob: -1.0,
            finished: true,
        };
        assert!(CandidateSet::new("d", vec![h("a b"), h("a")]).is_ok());
        assert!(CandidateSet::new("d", vec![h("a b"), h("a b")]).is_err());
        assert!(CandidateSet::new("d", vec![]).is_err());
    }
}
