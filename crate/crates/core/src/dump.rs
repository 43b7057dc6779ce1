//! Line-delimited JSON artifacts: candidates, labels and rerank choices.

use std::io::{BufRead, BufReader};
use std::path::Path;

use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::metrics::MetricKind;
use crate::rerank::{Method, RerankResult};

/// Metric values of one document's candidates, in candidate order.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LabelRecord {
    pub doc_id: String,
    pub kind: MetricKind,
    pub scores: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RerankRecord {
    pub doc_id: String,
    pub method: Method,
    pub chosen_index: usize,
    pub scores: Vec<f64>,
}

impl From<&RerankResult> for RerankRecord {
    fn from(r: &RerankResult) -> Self {
        RerankRecord {
            doc_id: r.doc_id.clone(),
            method: r.method,
            chosen_index: r.chosen_index,
            scores: r.scores.clone(),
        }
    }
}

/// One compact JSON object per line.
pub fn to_jsonl<T: Serialize>(items: &[T]) -> Result<String> {
    let mut out = String::new();
    for item in items {
        out.push_str(&serde_json::to_string(item)?);
        out.push('\n');
    }
    Ok(out)
}

pub fn write_jsonl<T: Serialize>(path: &Path, items: &[T]) -> Result<()> {
    std::fs::write(path, to_jsonl(items)?).map_err(|e| Error::io(path, e))
}

/// Reads one record per non-blank line; errors carry the line number.
pub fn read_jsonl<T: DeserializeOwned>(path: &Path) -> Result<Vec<T>> {
    let file = std::fs::File::open(path).map_err(|e| Error::io(path, e))?;
    let mut out = Vec::new();
    for (idx, line) in BufReader::new(file).lines().enumerate() {
        let line = line.map_err(|e| Error::io(path, e))?;
        if line.trim().is_empty() {
            continue;
        }
        out.push(serde_json::from_str(&line).map_err(|e| Error::MalformedLine {
            path: path.to_owned(),
            line: idx + 1,
            message: e.to_string(),
        })?);
    }
    Ok(out)
}
