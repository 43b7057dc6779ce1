//! Wall-clock comparison of the reference-free scorers.

use std::fmt::Write as _;
use std::hint::black_box;
use std::time::Instant;

use serde::{Deserialize, Serialize};

use crate::corpus::TokenSeq;
use crate::ebr::{extract_features, EnergyModel};
use crate::error::{Error, Result};
use crate::generator::{ConditionalLM, Hypothesis};
use crate::metrics::{consistency, AlignerKind};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TimingRow {
    pub scorer: String,
    /// Best total over the measured rounds.
    pub seconds: f64,
    /// `seconds` divided by the EBR time.
    pub relative: f64,
}

fn best_of<F: FnMut() -> Result<()>>(rounds: usize, mut f: F) -> Result<f64> {
    let mut best = f64::INFINITY;
    for _ in 0..rounds {
        let t = Instant::now();
        f()?;
        best = best.min(t.elapsed().as_secs_f64());
    }
    Ok(best.max(f64::MIN_POSITIVE))
}

/// Times each scorer over all pairs, one pair at a time on the calling
/// thread. EBR time covers feature extraction and the forward pass.
pub fn timing_report(
    model: &EnergyModel,
    lm: &ConditionalLM,
    pairs: &[(TokenSeq, Hypothesis)],
    rounds: usize,
) -> Result<Vec<TimingRow>> {
    if pairs.is_empty() {
        return Err(Error::invalid("timing needs at least one pair"));
    }
    let rounds = rounds.max(1);
    let ebr = best_of(rounds, || {
        for (x, y) in pairs {
            let f = extract_features(x, y, lm, model.feature_max_len)?;
            black_box(model.energy(&f)?);
        }
        Ok(())
    })?;
    let cons = |aligner| {
        best_of(rounds, || {
            for (x, y) in pairs {
                black_box(consistency(black_box(x), &y.tokens, aligner));
            }
            Ok(())
        })
    };
    let rows = [
        ("EBR", ebr),
        ("Cons[Exact]", cons(AlignerKind::Exact)?),
        ("Cons[SoftChar]", cons(AlignerKind::SoftChar)?),
    ];
    Ok(rows
        .into_iter()
        .map(|(name, s)| TimingRow {
            scorer: name.to_owned(),
            seconds: s,
            relative: s / ebr,
        })
        .collect())
}

pub fn timing_csv(rows: &[TimingRow]) -> String {
    let mut out = String::from("scorer,seconds,relative\n");
    for r in rows {
        writeln!(out, "{},{:.6},{:.2}", r.scorer, r.seconds, r.relative).unwrap();
    }
    out
}
