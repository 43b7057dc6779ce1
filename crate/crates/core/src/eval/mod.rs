//! Experiment harness: metric tables, significance, sweeps, histograms and
//! timing.

mod histogram;
mod significance;
mod sweep;
mod timing;

use std::collections::HashMap;
use std::fmt::Write as _;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::corpus::{Corpus, Document, TokenSeq};
use crate::error::{Error, Result};
use crate::generator::CandidateSet;
use crate::metrics::{self, AlignerKind, MetricKind};
use crate::rerank::{rerank_random, RerankResult};

pub use histogram::{energy_histogram, histogram_csv, Histogram};
pub use significance::{
    kendall_tau, permutation_test, permutation_test_exact, permutation_test_resampled,
    SignificanceResult, EXACT_LIMIT,
};
pub use sweep::{
    candidate_sweep, cross_model_eval, diversity_sweep, score_documents, sweep_csv, CrossModelReport,
    ScoredDoc, SweepRow,
};
pub use timing::{timing_csv, timing_report, TimingRow};

/// Per-metric scores of one system over a corpus.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SystemReport {
    pub system: String,
    pub doc_ids: Vec<String>,
    pub kinds: Vec<MetricKind>,
    /// `per_doc[m][d]` is metric `kinds[m]` on document `doc_ids[d]`.
    pub per_doc: Vec<Vec<f64>>,
    pub means: Vec<f64>,
}

pub(crate) fn mean(v: &[f64]) -> f64 {
    if v.is_empty() {
        0.0
    } else {
        v.iter().sum::<f64>() / v.len() as f64
    }
}

impl SystemReport {
    fn position(&self, kind: MetricKind) -> Option<usize> {
        self.kinds.iter().position(|k| *k == kind)
    }

    pub fn mean(&self, kind: MetricKind) -> Option<f64> {
        self.position(kind).map(|i| self.means[i])
    }

    pub fn scores(&self, kind: MetricKind) -> Option<&[f64]> {
        self.position(kind).map(|i| self.per_doc[i].as_slice())
    }
}

fn document<'c>(corpus: &'c Corpus, id: &str) -> Result<&'c Document> {
    corpus
        .get(id)
        .ok_or_else(|| Error::MissingDocument(id.to_owned()))
}

/// Scores chosen summaries against every document of `corpus`.
pub fn evaluate_system(
    system: impl Into<String>,
    choices: &HashMap<String, TokenSeq>,
    corpus: &Corpus,
    kinds: &[MetricKind],
    aligner: AlignerKind,
) -> Result<SystemReport> {
    let rows = corpus
        .documents()
        .par_iter()
        .map(|d| {
            let y = choices
                .get(&d.id)
                .ok_or_else(|| Error::MissingDocument(d.id.clone()))?;
            kinds
                .iter()
                .map(|&k| metrics::score(k, &d.source, Some(&d.reference), y, aligner).map(|s| s.value))
                .collect::<Result<Vec<f64>>>()
        })
        .collect::<Result<Vec<_>>>()?;
    let per_doc: Vec<Vec<f64>> = (0..kinds.len())
        .map(|m| rows.iter().map(|r| r[m]).collect())
        .collect();
    Ok(SystemReport {
        system: system.into(),
        doc_ids: corpus.iter().map(|d| d.id.clone()).collect(),
        kinds: kinds.to_vec(),
        means: per_doc.iter().map(|v| mean(v)).collect(),
        per_doc,
    })
}

/// Report over rerank choices.
pub fn evaluate_choices(
    system: impl Into<String>,
    results: &[RerankResult],
    corpus: &Corpus,
    kinds: &[MetricKind],
    aligner: AlignerKind,
) -> Result<SystemReport> {
    let choices = results
        .iter()
        .map(|r| (r.doc_id.clone(), r.chosen.tokens.clone()))
        .collect();
    evaluate_system(system, &choices, corpus, kinds, aligner)
}

/// Metric value of every candidate. Reference-free kinds never read the
/// reference.
pub fn label_candidates(
    corpus: &Corpus,
    sets: &[CandidateSet],
    kind: MetricKind,
    aligner: AlignerKind,
) -> Result<Vec<Vec<f64>>> {
    sets.par_iter()
        .map(|s| {
            let d = document(corpus, &s.doc_id)?;
            let reference = (!kind.is_reference_free()).then_some(&d.reference);
            s.candidates
                .iter()
                .map(|c| metrics::score(kind, &d.source, reference, &c.tokens, aligner).map(|m| m.value))
                .collect()
        })
        .collect()
}

/// Seeded uniform choice per document, drawn in list order.
pub fn choose_random(sets: &[CandidateSet], seed: u64) -> Result<Vec<RerankResult>> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    sets.iter().map(|s| rerank_random(s, seed, &mut rng)).collect()
}

fn columns(reports: &[SystemReport], kinds: &[MetricKind]) -> Result<Vec<Vec<f64>>> {
    if reports.is_empty() {
        return Err(Error::invalid("no systems to report"));
    }
    reports
        .iter()
        .map(|r| {
            kinds
                .iter()
                .map(|&k| {
                    r.mean(k).ok_or_else(|| {
                        Error::invalid(format!("system `{}` was not scored with {k}", r.system))
                    })
                })
                .collect()
        })
        .collect()
}

/// One row per system, one column per requested metric.
pub fn report_csv(reports: &[SystemReport], kinds: &[MetricKind]) -> Result<String> {
    let rows = columns(reports, kinds)?;
    let mut out = String::from("system");
    for k in kinds {
        write!(out, ",{}", k.label()).unwrap();
    }
    out.push('\n');
    for (r, means) in reports.iter().zip(rows) {
        out.push_str(&r.system);
        for m in means {
            write!(out, ",{m:.4}").unwrap();
        }
        out.push('\n');
    }
    Ok(out)
}

pub fn report_markdown(reports: &[SystemReport], kinds: &[MetricKind]) -> Result<String> {
    let rows = columns(reports, kinds)?;
    let mut out = String::from("| System |");
    for k in kinds {
        write!(out, " {} |", k.label()).unwrap();
    }
    out.push_str("\n|---|");
    out.push_str(&"---:|".repeat(kinds.len()));
    out.push('\n');
    for (r, means) in reports.iter().zip(rows) {
        write!(out, "| {} |", r.system).unwrap();
        for m in means {
            write!(out, " {m:.4} |").unwrap();
        }
        out.push('\n');
    }
    Ok(out)
}
