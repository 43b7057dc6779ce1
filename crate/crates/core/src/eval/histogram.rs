//! Histograms of chosen-candidate energies.

use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::rerank::{Method, RerankResult};

/// Equal-width bins over `[low, high]` plus out-of-range counters.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Histogram {
    pub low: f64,
    pub high: f64,
    pub counts: Vec<u64>,
    pub underflow: u64,
    pub overflow: u64,
}

impl Histogram {
    pub fn new(n_bins: usize, low: f64, high: f64) -> Result<Self> {
        if n_bins == 0 {
            return Err(Error::invalid("histogram needs at least one bin"));
        }
        if !(low < high) || !low.is_finite() || !high.is_finite() {
            return Err(Error::invalid(format!("invalid histogram range [{low}, {high}]")));
        }
        Ok(Histogram {
            low,
            high,
            counts: vec![0; n_bins],
            underflow: 0,
            overflow: 0,
        })
    }

    pub fn add(&mut self, v: f64) {
        if v < self.low {
            self.underflow += 1;
        } else if v > self.high || v.is_nan() {
            self.overflow += 1;
        } else {
            let n = self.counts.len();
            let i = ((v - self.low) / (self.high - self.low) * n as f64) as usize;
            self.counts[i.min(n - 1)] += 1;
        }
    }

    pub fn total(&self) -> u64 {
        self.underflow + self.overflow + self.counts.iter().sum::<u64>()
    }

    pub fn bin_edges(&self, i: usize) -> (f64, f64) {
        let w = (self.high - self.low) / self.counts.len() as f64;
        (self.low + w * i as f64, self.low + w * (i + 1) as f64)
    }
}

/// Histogram of the energy of each EBR choice.
pub fn energy_histogram(results: &[RerankResult], n_bins: usize, range: (f64, f64)) -> Result<Histogram> {
    let mut h = Histogram::new(n_bins, range.0, range.1)?;
    for r in results {
        if r.method != Method::EBR {
            return Err(Error::invalid(format!(
                "document `{}`: {} result carries no energies",
                r.doc_id, r.method
            )));
        }
        h.add(r.scores[r.chosen_index]);
    }
    Ok(h)
}

/// `bin_low,bin_high,<column>...` with underflow and overflow rows first
/// and last. All histograms must share their binning.
pub fn histogram_csv(columns: &[(&str, &Histogram)]) -> Result<String> {
    let (_, first) = columns
        .first()
        .ok_or_else(|| Error::invalid("no histograms to write"))?;
    if columns.iter().any(|(_, h)| {
        h.low != first.low || h.high != first.high || h.counts.len() != first.counts.len()
    }) {
        return Err(Error::invalid("histograms use different bins"));
    }
    let mut out = String::from("bin_low,bin_high");
    for (name, _) in columns {
        write!(out, ",{name}").unwrap();
    }
    out.push('\n');
    let row = |out: &mut String, lo: f64, hi: f64, pick: &dyn Fn(&Histogram) -> u64| {
        write!(out, "{lo},{hi}").unwrap();
        for (_, h) in columns {
            write!(out, ",{}", pick(h)).unwrap();
        }
        out.push('\n');
    };
    row(&mut out, f64::NEG_INFINITY, first.low, &|h| h.underflow);
    for i in 0..first.counts.len() {
        let (lo, hi) = first.bin_edges(i);
        row(&mut out, lo, hi, &|h| h.counts[i]);
    }
    row(&mut out, first.high, f64::INFINITY, &|h| h.overflow);
    Ok(out)
}
