//! Candidate-count, diversity and cross-generator experiments.

use std::fmt::Write as _;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::{choose_random, document, evaluate_choices, mean, SystemReport};
use crate::corpus::Corpus;
use crate::ebr::{energy_order, order_by, EnergyModel};
use crate::error::{Error, Result};
use crate::generator::{generate_candidates, CandidateSet, ConditionalLM, GenConfig};
use crate::metrics::{self, AlignerKind, MetricKind};
use crate::rerank::{candidate_energies, rerank_by_energies, RerankResult};

/// Energies, target metric values and logprobs of one document's candidates.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScoredDoc {
    pub doc_id: String,
    pub energies: Vec<f64>,
    pub scores: Vec<f64>,
    pub logprobs: Vec<f64>,
}

impl ScoredDoc {
    /// Target metric of the lowest-energy candidate among the first `k`.
    pub fn ebr(&self, k: usize) -> f64 {
        let k = k.min(self.scores.len());
        self.scores[energy_order(&self.energies[..k], &self.logprobs[..k])[0]]
    }

    /// Best target metric among the first `k`.
    pub fn oracle(&self, k: usize) -> f64 {
        let k = k.min(self.scores.len());
        self.scores[order_by(&self.scores[..k], &self.logprobs[..k], true)[0]]
    }

    pub fn top_beam(&self) -> f64 {
        self.scores[0]
    }
}

/// Scores every candidate with the energy model (features under
/// `feature_lm`) and with `kind`.
pub fn score_documents(
    model: &EnergyModel,
    feature_lm: &ConditionalLM,
    corpus: &Corpus,
    sets: &[CandidateSet],
    kind: MetricKind,
    aligner: AlignerKind,
) -> Result<Vec<ScoredDoc>> {
    sets.par_iter()
        .map(|s| {
            let d = document(corpus, &s.doc_id)?;
            let energies = candidate_energies(model, &d.source, s, feature_lm)?;
            let scores = s
                .candidates
                .iter()
                .map(|c| metrics::score(kind, &d.source, Some(&d.reference), &c.tokens, aligner).map(|m| m.value))
                .collect::<Result<Vec<_>>>()?;
            Ok(ScoredDoc {
                doc_id: s.doc_id.clone(),
                energies,
                scores,
                logprobs: s.candidates.iter().map(|c| c.logprob).collect(),
            })
        })
        .collect()
}

/// One row of a sweep table, with the per-document values behind each mean.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepRow {
    /// Candidate count or diversity weight.
    pub setting: f64,
    pub ebr_mean: f64,
    pub oracle_mean: f64,
    pub top_beam_mean: f64,
    pub ebr: Vec<f64>,
    pub oracle: Vec<f64>,
    pub top_beam: Vec<f64>,
}

impl SweepRow {
    fn new(setting: f64, ebr: Vec<f64>, oracle: Vec<f64>, top_beam: Vec<f64>) -> Self {
        SweepRow {
            setting,
            ebr_mean: mean(&ebr),
            oracle_mean: mean(&oracle),
            top_beam_mean: mean(&top_beam),
            ebr,
            oracle,
            top_beam,
        }
    }
}

pub const MAX_SWEEP_K: usize = 32;

/// EBR, oracle and top-beam means over nested top-`k` prefixes of one
/// decoder run.
pub fn candidate_sweep(
    model: &EnergyModel,
    lm: &ConditionalLM,
    corpus: &Corpus,
    sets: &[CandidateSet],
    kind: MetricKind,
    aligner: AlignerKind,
    k_values: &[usize],
) -> Result<Vec<SweepRow>> {
    if let Some(k) = k_values.iter().find(|k| **k == 0 || **k > MAX_SWEEP_K) {
        return Err(Error::invalid(format!("sweep k must lie in 1..={MAX_SWEEP_K}, got {k}")));
    }
    let docs = score_documents(model, lm, corpus, sets, kind, aligner)?;
    Ok(k_values
        .iter()
        .map(|&k| {
            SweepRow::new(
                k as f64,
                docs.iter().map(|d| d.ebr(k)).collect(),
                docs.iter().map(|d| d.oracle(k)).collect(),
                docs.iter().map(ScoredDoc::top_beam).collect(),
            )
        })
        .collect())
}

/// Re-decodes `corpus` at each diversity weight and reports EBR and oracle
/// choices among the `base.k` candidates.
pub fn diversity_sweep(
    lm: &ConditionalLM,
    corpus: &Corpus,
    base: &GenConfig,
    weights: &[f64],
    model: &EnergyModel,
    kind: MetricKind,
    aligner: AlignerKind,
) -> Result<Vec<SweepRow>> {
    if let Some(w) = weights.iter().find(|w| !(**w >= 0.0) || !w.is_finite()) {
        return Err(Error::invalid(format!("diversity weight must be non-negative, got {w}")));
    }
    weights
        .iter()
        .map(|&w| {
            let cfg = GenConfig {
                diversity_weight: w,
                ..*base
            };
            let sets = generate_candidates(lm, corpus, &cfg)?;
            let docs = score_documents(model, lm, corpus, &sets, kind, aligner)?;
            Ok(SweepRow::new(
                w,
                docs.iter().map(|d| d.ebr(base.k)).collect(),
                docs.iter().map(|d| d.oracle(base.k)).collect(),
                docs.iter().map(ScoredDoc::top_beam).collect(),
            ))
        })
        .collect()
}

/// CSV with one row per setting.
pub fn sweep_csv(setting_name: &str, rows: &[SweepRow]) -> String {
    let mut out = format!("{setting_name},ebr,oracle,top_beam\n");
    for r in rows {
        writeln!(
            out,
            "{},{:.4},{:.4},{:.4}",
            r.setting, r.ebr_mean, r.oracle_mean, r.top_beam_mean
        )
        .unwrap();
    }
    out
}

/// Generator B's top beam against EBR re-ranking of B's candidates.
#[derive(Debug, Clone, PartialEq)]
pub struct CrossModelReport {
    pub top_beam: SystemReport,
    pub ebr: SystemReport,
    /// Seeded random choice among B's candidates, for significance testing.
    pub random: SystemReport,
    pub ebr_choices: Vec<RerankResult>,
    pub candidates: Vec<CandidateSet>,
}

impl CrossModelReport {
    /// The two compared systems.
    pub fn rows(&self) -> [&SystemReport; 2] {
        [&self.top_beam, &self.ebr]
    }
}

/// Re-ranks generator B's candidates with a model trained on generator A.
/// Features are computed under `lm_a`, the generator the model was trained
/// with.
#[allow(clippy::too_many_arguments)]
pub fn cross_model_eval(
    model: &EnergyModel,
    lm_a: &ConditionalLM,
    lm_b: &ConditionalLM,
    gen_b: &GenConfig,
    corpus: &Corpus,
    kinds: &[MetricKind],
    aligner: AlignerKind,
    random_seed: u64,
) -> Result<CrossModelReport> {
    if lm_a.copy_weight() == lm_b.copy_weight() && lm_a.alpha() == lm_b.alpha() {
        log::warn!("generators A and B share their configuration; transfer is degenerate");
    }
    let sets = generate_candidates(lm_b, corpus, gen_b)?;
    let ebr_choices = sets
        .par_iter()
        .map(|s| {
            let d = document(corpus, &s.doc_id)?;
            rerank_by_energies(s, candidate_energies(model, &d.source, s, lm_a)?)
        })
        .collect::<Result<Vec<_>>>()?;
    let top = sets
        .iter()
        .map(crate::rerank::rerank_top_beam)
        .collect::<Result<Vec<_>>>()?;
    let random = choose_random(&sets, random_seed)?;
    Ok(CrossModelReport {
        top_beam: evaluate_choices("B TopBeam", &top, corpus, kinds, aligner)?,
        ebr: evaluate_choices("EBR on B", &ebr_choices, corpus, kinds, aligner)?,
        random: evaluate_choices("B Random", &random, corpus, kinds, aligner)?,
        ebr_choices,
        candidates: sets,
    })
}
