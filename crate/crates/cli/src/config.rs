//! Pipeline configuration file.

use std::path::{Path, PathBuf};

use ebrank_core::ebr::TrainConfig;
use ebrank_core::{AlignerKind, GenConfig, MetricKind, SplitSpec};
use serde::{Deserialize, Serialize};

use crate::error::{CliError, Result};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CorpusSource {
    Synthetic { n_docs: usize },
    File { path: PathBuf },
}

/// Mixture parameters of one generator.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LmConfig {
    pub copy_weight: f64,
    pub alpha: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct HistogramConfig {
    pub bins: usize,
    pub low: f64,
    pub high: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SignificanceConfig {
    pub resamples: u64,
    pub alpha: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PipelineConfig {
    /// Drives the synthetic corpus, the split, training and the random
    /// baseline.
    pub seed: u64,
    pub corpus: CorpusSource,
    pub split: SplitFractions,
    /// Generator A, used for training data, test candidates and features.
    pub generator: LmConfig,
    /// Generator B for the transfer experiment.
    pub generator_b: LmConfig,
    /// Decoding of re-ranker training and validation candidates.
    pub train_decoding: GenConfig,
    /// Decoding of test candidates.
    pub test_decoding: GenConfig,
    pub target: MetricKind,
    /// One energy model is trained per entry.
    pub ebr_targets: Vec<MetricKind>,
    pub aligner: AlignerKind,
    pub train: TrainConfig,
    pub sweep_k: Vec<usize>,
    pub sweep_weights: Vec<f64>,
    pub histogram: HistogramConfig,
    pub significance: SignificanceConfig,
    pub timing_pairs: usize,
    pub output_dir: PathBuf,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SplitFractions {
    pub train: f64,
    pub val: f64,
    pub test: f64,
}

impl Default for PipelineConfig {
    fn default() -> Self {
        PipelineConfig {
            seed: 7,
            corpus: CorpusSource::Synthetic { n_docs: 600 },
            split: SplitFractions {
                train: 0.4,
                val: 0.1,
                test: 0.5,
            },
            generator: LmConfig {
                copy_weight: 0.5,
                alpha: 0.01,
            },
            generator_b: LmConfig {
                copy_weight: 0.45,
                alpha: 0.05,
            },
            train_decoding: GenConfig {
                beams: 8,
                groups: 4,
                diversity_weight: 0.8,
                max_len: 24,
                k: 8,
            },
            test_decoding: GenConfig {
                beams: 8,
                groups: 1,
                diversity_weight: 0.0,
                max_len: 24,
                k: 8,
            },
            target: MetricKind::RL,
            ebr_targets: vec![MetricKind::RL, MetricKind::ConsPlusRel],
            aligner: AlignerKind::SoftChar,
            train: TrainConfig {
                learning_rate: 0.003,
                ..TrainConfig::default()
            },
            sweep_k: vec![4, 8, 16, 32],
            sweep_weights: vec![0.0, 0.2, 0.5, 0.8],
            histogram: HistogramConfig {
                bins: 50,
                low: -15.0,
                high: 10.0,
            },
            significance: SignificanceConfig {
                resamples: 10_000,
                alpha: 0.05,
            },
            timing_pairs: 1000,
            output_dir: PathBuf::from("out"),
        }
    }
}

fn bad(msg: impl Into<String>) -> CliError {
    CliError::Config(msg.into())
}

impl PipelineConfig {
    /// Parses a config file; relative paths inside it resolve against the
    /// file's directory.
    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| CliError::io(path, e))?;
        let mut cfg: PipelineConfig = serde_json::from_str(&text)
            .map_err(|e| bad(format!("{}: {e}", path.display())))?;
        let base = path.parent().unwrap_or(Path::new(""));
        if cfg.output_dir.is_relative() {
            cfg.output_dir = base.join(&cfg.output_dir);
        }
        if let CorpusSource::File { path } = &mut cfg.corpus {
            if path.is_relative() {
                *path = base.join(&*path);
            }
        }
        Ok(cfg)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("serializable config")
    }

    pub fn split_spec(&self) -> SplitSpec {
        SplitSpec {
            train_fraction: self.split.train,
            val_fraction: self.split.val,
            test_fraction: self.split.test,
            seed: self.seed,
        }
    }

    pub fn train_config(&self) -> TrainConfig {
        TrainConfig {
            seed: self.seed,
            ..self.train.clone()
        }
    }

    /// Decoder settings of the candidate-count sweep: one run whose nested
    /// prefixes give every swept `k`.
    pub fn sweep_decoding(&self) -> GenConfig {
        let k = self.sweep_k.iter().copied().max().unwrap_or(1);
        GenConfig {
            beams: k,
            groups: 1,
            diversity_weight: 0.0,
            k,
            ..self.test_decoding
        }
    }

    /// Metrics for which candidate labels are written.
    pub fn label_kinds(&self) -> Vec<MetricKind> {
        let mut kinds = self.ebr_targets.clone();
        if !kinds.contains(&self.target) {
            kinds.push(self.target);
        }
        kinds
    }

    /// Checks every invariant that can be checked without touching disk
    /// artifacts.
    pub fn validate(&self) -> Result<()> {
        self.split_spec().validate()?;
        self.train_decoding.validate()?;
        self.test_decoding.validate()?;
        self.train.validate()?;
        for lm in [&self.generator, &self.generator_b] {
            if !(0.0..=1.0).contains(&lm.copy_weight) || !(lm.alpha > 0.0) {
                return Err(bad("copy_weight must lie in [0, 1] and alpha must be positive"));
            }
        }
        if self.train_decoding.max_len != self.test_decoding.max_len {
            return Err(bad("train and test decoding must share max_len (a feature depends on it)"));
        }
        if self.ebr_targets.is_empty() {
            return Err(bad("ebr_targets is empty"));
        }
        if !self.ebr_targets.contains(&self.target) {
            return Err(bad(format!("target {} must be one of ebr_targets", self.target)));
        }
        let mut seen = self.ebr_targets.clone();
        seen.sort();
        seen.dedup();
        if seen.len() != self.ebr_targets.len() {
            return Err(bad("ebr_targets contains duplicates"));
        }
        if self.sweep_k.is_empty() || self.sweep_k.iter().any(|k| *k == 0 || *k > 32) {
            return Err(bad("sweep_k entries must lie in 1..=32"));
        }
        if self.sweep_weights.iter().any(|w| !(*w >= 0.0)) {
            return Err(bad("sweep_weights must be non-negative"));
        }
        if self.histogram.bins == 0 || !(self.histogram.low < self.histogram.high) {
            return Err(bad("histogram needs bins >= 1 and low < high"));
        }
        if !(self.significance.alpha > 0.0 && self.significance.alpha < 1.0) || self.significance.resamples == 0 {
            return Err(bad("significance needs alpha in (0, 1) and resamples >= 1"));
        }
        if self.timing_pairs == 0 {
            return Err(bad("timing_pairs must be positive"));
        }
        if let CorpusSource::File { path } = &self.corpus {
            if !path.exists() {
                return Err(bad(format!("corpus file {} does not exist", path.display())));
            }
        }
        if let CorpusSource::Synthetic { n_docs } = self.corpus {
            if n_docs == 0 {
                return Err(bad("synthetic corpus needs n_docs >= 1"));
            }
        }
        Ok(())
    }
}
