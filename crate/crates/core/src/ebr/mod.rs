//! The energy-based re-ranker.
//!
//! Candidates are described by [`FeatureVector`]s that never look at the
//! reference. A small feed-forward [`EnergyModel`] maps features to an
//! energy (lower is better) and is trained with ListMLE or a pairwise
//! max-margin loss against a metric-induced target order.

mod features;
mod listmle;
mod maxmargin;
mod model;
mod ndcg;
mod train;

use serde::{Deserialize, Serialize};

use crate::corpus::TokenSeq;
use crate::error::{Error, Result};
use crate::generator::{CandidateSet, ConditionalLM};

pub use features::{
    extract_features, FeatureExtractor, FeatureVector, FEATURE_NAMES, N_FEATURES, SOURCE_TRUNCATION,
};
pub use listmle::{
    listmle_gradient, listmle_loss, log_permutation_likelihood, permutation_likelihood,
};
pub use maxmargin::{maxmargin_gradient, maxmargin_loss, sample_pairs};
pub use model::{EnergyModel, Standardization, HIDDEN, MODEL_VERSION, N_PARAMS};
pub use ndcg::ndcg;
pub use train::train;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum LossKind {
    ListMLE,
    MaxMargin,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrainConfig {
    pub tau: f64,
    pub learning_rate: f64,
    pub epochs: usize,
    pub batch_size: usize,
    pub seed: u64,
    pub loss: LossKind,
    pub margin_scale: f64,
    pub pairs_per_list: usize,
}

impl Default for TrainConfig {
    fn default() -> Self {
        TrainConfig {
            tau: 1.0,
            learning_rate: 0.01,
            epochs: 200,
            batch_size: 24,
            seed: 0,
            loss: LossKind::ListMLE,
            margin_scale: 1.0,
            pairs_per_list: 4,
        }
    }
}

impl TrainConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.tau > 0.0) || !self.tau.is_finite() {
            return Err(Error::invalid(format!("tau must be positive, got {}", self.tau)));
        }
        if !(self.learning_rate > 0.0) || !self.learning_rate.is_finite() {
            return Err(Error::invalid("learning_rate must be positive"));
        }
        if self.batch_size == 0 {
            return Err(Error::invalid("batch_size must be positive"));
        }
        if self.loss == LossKind::MaxMargin {
            if !(self.margin_scale >= 0.0) || !self.margin_scale.is_finite() {
                return Err(Error::invalid("margin_scale must be non-negative"));
            }
            if self.pairs_per_list == 0 {
                return Err(Error::invalid("pairs_per_list must be positive"));
            }
        }
        Ok(())
    }
}

/// Candidates of one document with their features, target metric scores
/// and the best-first target order.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RankedList {
    pub doc_id: String,
    pub features: Vec<FeatureVector>,
    /// Target metric value per candidate.
    pub scores: Vec<f64>,
    /// Generator log-probability per candidate, used for tie-breaking.
    pub logprobs: Vec<f64>,
    pub target_order: Vec<usize>,
}

impl RankedList {
    /// Sorts by score descending, then logprob descending, then index.
    pub fn new(
        doc_id: impl Into<String>,
        features: Vec<FeatureVector>,
        scores: Vec<f64>,
        logprobs: Vec<f64>,
    ) -> Result<Self> {
        let doc_id = doc_id.into();
        let k = features.len();
        if k == 0 {
            return Err(Error::invalid(format!("document `{doc_id}`: empty ranked list")));
        }
        if scores.len() != k || logprobs.len() != k {
            return Err(Error::invalid(format!(
                "document `{doc_id}`: {k} feature vectors but {} scores and {} logprobs",
                scores.len(),
                logprobs.len()
            )));
        }
        if scores.iter().chain(&logprobs).any(|v| v.is_nan()) {
            return Err(Error::NonFinite(format!("document `{doc_id}`: NaN score")));
        }
        let target_order = order_by(&scores, &logprobs, true);
        Ok(RankedList {
            doc_id,
            features,
            scores,
            logprobs,
            target_order,
        })
    }

    /// Extracts features for a candidate set and pairs them with scores.
    pub fn from_candidates(
        lm: &ConditionalLM,
        x: &TokenSeq,
        candidates: &CandidateSet,
        scores: Vec<f64>,
        max_len: usize,
    ) -> Result<Self> {
        let ex = FeatureExtractor::new(lm, x, max_len)?;
        let features = candidates
            .candidates
            .iter()
            .map(|c| ex.extract(c))
            .collect::<Result<Vec<_>>>()?;
        let logprobs = candidates.candidates.iter().map(|c| c.logprob).collect();
        RankedList::new(candidates.doc_id.clone(), features, scores, logprobs)
    }

    pub fn len(&self) -> usize {
        self.features.len()
    }

    pub fn is_empty(&self) -> bool {
        self.features.is_empty()
    }
}

/// Indices sorted by `primary` (descending when `descending`, ascending
/// otherwise), then `logprobs` descending, then index ascending.
pub(crate) fn order_by(primary: &[f64], logprobs: &[f64], descending: bool) -> Vec<usize> {
    let mut idx: Vec<usize> = (0..primary.len()).collect();
    idx.sort_by(|&a, &b| {
        let p = primary[a].total_cmp(&primary[b]);
        let p = if descending { p.reverse() } else { p };
        p.then_with(|| logprobs[b].total_cmp(&logprobs[a]))
            .then(a.cmp(&b))
    });
    idx
}

/// Candidate indices best-first under the model: energy ascending, then
/// logprob descending, then index.
pub fn energy_order(energies: &[f64], logprobs: &[f64]) -> Vec<usize> {
    order_by(energies, logprobs, false)
}
