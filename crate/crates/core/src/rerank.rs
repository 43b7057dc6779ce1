//! Selection rules over a candidate set.

use std::fmt;
use std::str::FromStr;

use rand::Rng;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::corpus::TokenSeq;
use crate::ebr::{energy_order, EnergyModel, FeatureExtractor};
use crate::error::{Error, Result};
use crate::generator::{CandidateSet, ConditionalLM, Hypothesis};
use crate::metrics::{self, AlignerKind, MetricKind};

/// How a candidate was chosen.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Method {
    EBR,
    Oracle(MetricKind),
    RefFree(MetricKind),
    TopBeam,
    Random(u64),
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Method::EBR => f.write_str("EBR"),
            Method::Oracle(k) => write!(f, "Oracle[{k}]"),
            Method::RefFree(k) => write!(f, "RefFree[{k}]"),
            Method::TopBeam => f.write_str("TopBeam"),
            Method::Random(s) => write!(f, "Random[{s}]"),
        }
    }
}

impl FromStr for Method {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let bad = || Error::invalid(format!("unknown method `{s}`"));
        match s {
            "EBR" => return Ok(Method::EBR),
            "TopBeam" => return Ok(Method::TopBeam),
            _ => {}
        }
        let (head, arg) = s
            .strip_suffix(']')
            .and_then(|r| r.split_once('['))
            .ok_or_else(bad)?;
        match head {
            "Oracle" => Ok(Method::Oracle(arg.parse()?)),
            "RefFree" => Ok(Method::RefFree(arg.parse()?)),
            "Random" => Ok(Method::Random(arg.parse().map_err(|_| bad())?)),
            _ => Err(bad()),
        }
    }
}

impl Serialize for Method {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for Method {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RerankResult {
    pub doc_id: String,
    pub method: Method,
    pub chosen_index: usize,
    pub chosen: Hypothesis,
    /// Energies for EBR, metric values for Oracle/RefFree, generator
    /// logprobs for TopBeam and Random.
    pub scores: Vec<f64>,
}

fn logprobs(candidates: &CandidateSet) -> Vec<f64> {
    candidates.candidates.iter().map(|c| c.logprob).collect()
}

fn result(candidates: &CandidateSet, method: Method, chosen_index: usize, scores: Vec<f64>) -> RerankResult {
    RerankResult {
        doc_id: candidates.doc_id.clone(),
        method,
        chosen_index,
        chosen: candidates.candidates[chosen_index].clone(),
        scores,
    }
}

fn non_empty(candidates: &CandidateSet) -> Result<()> {
    if candidates.is_empty() {
        Err(Error::invalid(format!("document `{}`: no candidates", candidates.doc_id)))
    } else {
        Ok(())
    }
}

/// Chooses the lowest energy among precomputed per-candidate energies.
pub fn rerank_by_energies(candidates: &CandidateSet, energies: Vec<f64>) -> Result<RerankResult> {
    non_empty(candidates)?;
    if energies.len() != candidates.len() {
        return Err(Error::invalid("one energy per candidate required"));
    }
    let best = energy_order(&energies, &logprobs(candidates))[0];
    Ok(result(candidates, Method::EBR, best, energies))
}

/// Energy of every candidate.
pub fn candidate_energies(
    model: &EnergyModel,
    x: &TokenSeq,
    candidates: &CandidateSet,
    lm: &ConditionalLM,
) -> Result<Vec<f64>> {
    let ex = FeatureExtractor::new(lm, x, model.feature_max_len)?;
    candidates
        .candidates
        .iter()
        .map(|c| model.energy(&ex.extract(c)?))
        .collect()
}

/// Picks the candidate with the lowest energy.
pub fn rerank_ebr(
    model: &EnergyModel,
    x: &TokenSeq,
    candidates: &CandidateSet,
    lm: &ConditionalLM,
) -> Result<RerankResult> {
    non_empty(candidates)?;
    let e = candidate_energies(model, x, candidates, lm)?;
    rerank_by_energies(candidates, e)
}

/// Highest metric value, then highest logprob, then lowest index.
fn argmax(scores: &[f64], logprobs: &[f64]) -> usize {
    crate::ebr::order_by(scores, logprobs, true)[0]
}

/// Picks the candidate maximizing `kind` against the reference.
pub fn rerank_oracle(
    kind: MetricKind,
    x: &TokenSeq,
    reference: Option<&TokenSeq>,
    candidates: &CandidateSet,
    aligner: AlignerKind,
) -> Result<RerankResult> {
    non_empty(candidates)?;
    let scores = candidates
        .candidates
        .iter()
        .map(|c| metrics::score(kind, x, reference, &c.tokens, aligner).map(|s| s.value))
        .collect::<Result<Vec<_>>>()?;
    let best = argmax(&scores, &logprobs(candidates));
    Ok(result(candidates, Method::Oracle(kind), best, scores))
}

/// Picks the candidate maximizing a reference-free metric.
pub fn rerank_reference_free(
    kind: MetricKind,
    x: &TokenSeq,
    candidates: &CandidateSet,
    aligner: AlignerKind,
) -> Result<RerankResult> {
    if !kind.is_reference_free() {
        return Err(Error::invalid(format!("{kind} needs a reference")));
    }
    non_empty(candidates)?;
    let scores: Vec<f64> = candidates
        .candidates
        .iter()
        .map(|c| metrics::consistency(x, &c.tokens, aligner).value)
        .collect();
    let best = argmax(&scores, &logprobs(candidates));
    Ok(result(candidates, Method::RefFree(kind), best, scores))
}

/// The decoder's first candidate.
pub fn rerank_top_beam(candidates: &CandidateSet) -> Result<RerankResult> {
    non_empty(candidates)?;
    Ok(result(candidates, Method::TopBeam, 0, logprobs(candidates)))
}

/// A uniformly random candidate; `seed` is only recorded in the method tag.
pub fn rerank_random<R: Rng>(candidates: &CandidateSet, seed: u64, rng: &mut R) -> Result<RerankResult> {
    non_empty(candidates)?;
    let i = rng.random_range(0..candidates.len());
    Ok(result(candidates, Method::Random(seed), i, logprobs(candidates)))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn set(words: &[&str]) -> CandidateSet {
        CandidateSet::new(
            "d",
            words
                .iter()
                .enumerate()
                .map(|(i, w)| Hypothesis {
                    tokens: TokenSeq::from_words(w),
                    logprob: -(i as f64),
                    finished: true,
                })
                .collect(),
        )
        .unwrap()
    }

    #[test]
    fn argmin_energy() {
        let c = set(&["a", "b", "c"]);
        assert_eq!(rerank_by_energies(&c, vec![2.0, -1.0, 0.5]).unwrap().chosen_index, 1);
        assert_eq!(rerank_by_energies(&c, vec![12.0, 9.0, 10.5]).unwrap().chosen_index, 1);
        let one = set(&["a"]);
        assert_eq!(rerank_by_energies(&one, vec![3.0]).unwrap().chosen_index, 0);
    }

    #[test]
    fn energy_ties_prefer_logprob() {
        let c = set(&["a", "b", "c"]);
        assert_eq!(rerank_by_energies(&c, vec![1.0, 0.0, 0.0]).unwrap().chosen_index, 1);
    }

    #[test]
    fn oracle_finds_reference() {
        let x = TokenSeq::from_words("the cat sat on the mat");
        let r = TokenSeq::from_words("cat sat");
        let c = set(&["the mat", "cat sat", "cat"]);
        let res = rerank_oracle(MetricKind::RL, &x, Some(&r), &c, AlignerKind::Exact).unwrap();
        assert_eq!(res.chosen_index, 1);
        assert_eq!(res.scores[1], 1.0);
        assert!(rerank_oracle(MetricKind::RL, &x, None, &c, AlignerKind::Exact).is_err());
    }

    #[test]
    fn reference_free_rules() {
        let x = TokenSeq::from_words("the cat sat on the mat");
        let c = set(&["dog sat", "cat sat", "cat flew"]);
        let res = rerank_reference_free(MetricKind::Consistency, &x, &c, AlignerKind::Exact).unwrap();
        assert_eq!(res.chosen_index, 1);
        assert!(rerank_reference_free(MetricKind::RL, &x, &c, AlignerKind::Exact).is_err());
    }

    #[test]
    fn method_round_trip() {
        for m in [
            Method::EBR,
            Method::TopBeam,
            Method::Random(7),
            Method::Oracle(MetricKind::ConsPlusRel),
            Method::RefFree(MetricKind::Consistency),
        ] {
            assert_eq!(m.to_string().parse::<Method>().unwrap(), m);
            let j = serde_json::to_string(&m).unwrap();
            assert_eq!(serde_json::from_str::<Method>(&j).unwrap(), m);
        }
    }
}
