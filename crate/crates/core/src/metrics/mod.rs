//! Summary quality metrics.
//!
//! ROUGE-1/2/L compare a candidate with the reference. Consistency and
//! relevance are built on a token aligner: `align(a → b)` gives, for every
//! token of `a`, a confidence in `[0, 1]` that it is grounded in `b`.
//!
//! * consistency(x, ŷ) = mean(align(ŷ → x))
//! * relevance(x, y, ŷ) = mean(align(ŷ → x)) · mean(align(y → ŷ))
//!
//! All metrics are total: degenerate inputs score 0.

mod align;
mod rouge;

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::corpus::TokenSeq;
use crate::error::{Error, Result};

pub use align::{align, char_gram_jaccard, AlignerKind, SourceIndex};
pub use rouge::{lcs_len, rouge_l, rouge_n};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum MetricKind {
    R1,
    R2,
    RL,
    Consistency,
    Relevance,
    ConsPlusRel,
}

impl MetricKind {
    pub const ALL: [MetricKind; 6] = [
        MetricKind::R1,
        MetricKind::R2,
        MetricKind::RL,
        MetricKind::Consistency,
        MetricKind::Relevance,
        MetricKind::ConsPlusRel,
    ];

    pub fn is_reference_free(self) -> bool {
        matches!(self, MetricKind::Consistency)
    }

    /// Upper end of the value range.
    pub fn max_value(self) -> f64 {
        match self {
            MetricKind::ConsPlusRel => 2.0,
            _ => 1.0,
        }
    }

    /// Short column label.
    pub fn label(self) -> &'static str {
        match self {
            MetricKind::R1 => "R1",
            MetricKind::R2 => "R2",
            MetricKind::RL => "RL",
            MetricKind::Consistency => "Cons",
            MetricKind::Relevance => "Rel",
            MetricKind::ConsPlusRel => "Cons+Rel",
        }
    }
}

impl fmt::Display for MetricKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.label())
    }
}

impl FromStr for MetricKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Ok(match s {
            "R1" => MetricKind::R1,
            "R2" => MetricKind::R2,
            "RL" => MetricKind::RL,
            "Cons" | "Consistency" => MetricKind::Consistency,
            "Rel" | "Relevance" => MetricKind::Relevance,
            "Cons+Rel" | "ConsPlusRel" => MetricKind::ConsPlusRel,
            other => return Err(Error::invalid(format!("unknown metric `{other}`"))),
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MetricScore {
    pub value: f64,
    pub kind: MetricKind,
}

impl MetricScore {
    fn new(kind: MetricKind, value: f64) -> Self {
        MetricScore { value, kind }
    }
}

fn mean(v: &[f64]) -> f64 {
    if v.is_empty() {
        0.0
    } else {
        v.iter().sum::<f64>() / v.len() as f64
    }
}

/// Mean alignment of the candidate onto the source.
pub fn consistency(x: &TokenSeq, candidate: &TokenSeq, aligner: AlignerKind) -> MetricScore {
    MetricScore::new(
        MetricKind::Consistency,
        mean(&align(candidate, x, aligner)),
    )
}

/// Consistency times the mean alignment of the reference onto the candidate.
pub fn relevance(
    x: &TokenSeq,
    reference: &TokenSeq,
    candidate: &TokenSeq,
    aligner: AlignerKind,
) -> MetricScore {
    let value = if x.is_empty() || reference.is_empty() || candidate.is_empty() {
        0.0
    } else {
        mean(&align(candidate, x, aligner)) * mean(&align(reference, candidate, aligner))
    };
    MetricScore::new(MetricKind::Relevance, value)
}

/// Dispatches on `kind`. `reference` may be `None` only for reference-free
/// metrics.
pub fn score(
    kind: MetricKind,
    x: &TokenSeq,
    reference: Option<&TokenSeq>,
    candidate: &TokenSeq,
    aligner: AlignerKind,
) -> Result<MetricScore> {
    if kind.is_reference_free() {
        return Ok(consistency(x, candidate, aligner));
    }
    let reference = reference.ok_or_else(|| Error::MissingReference(kind.to_string()))?;
    Ok(match kind {
        MetricKind::R1 => rouge_n(candidate, reference, 1),
        MetricKind::R2 => rouge_n(candidate, reference, 2),
        MetricKind::RL => rouge_l(candidate, reference),
        MetricKind::Relevance => relevance(x, reference, candidate, aligner),
        MetricKind::ConsPlusRel => {
            let c = consistency(x, candidate, aligner).value;
            let r = relevance(x, reference, candidate, aligner).value;
            MetricScore::new(MetricKind::ConsPlusRel, c + r)
        }
        MetricKind::Consistency => unreachable!("handled above"),
    })
}
