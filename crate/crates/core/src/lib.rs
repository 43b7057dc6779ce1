//! Energy-based re-ranking of generated summaries.
//!
//! The crate covers the whole desk-scale pipeline:
//!
//! * [`corpus`]: tokenization, corpus files and a synthetic corpus with
//!   controllable hallucination.
//! * [`generator`]: a copy-mixture bigram summarizer with beam search and
//!   diverse beam search.
//! * [`metrics`]: ROUGE-1/2/L and alignment-based consistency/relevance.
//! * [`ebr`]: reference-free features, the feed-forward energy net, the
//!   ListMLE objective (plus a max-margin alternative) and training.
//! * [`rerank`]: energy, oracle and reference-free selection rules.
//! * [`eval`]: system reports, permutation tests, sweeps, histograms and
//!   timing.
//! * [`dump`]: line-delimited JSON artifact formats.

// `!(x > 0.0)` style checks are deliberate: they also reject NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod corpus;
pub mod dump;
pub mod ebr;
mod error;
pub mod eval;
pub mod generator;
pub mod metrics;
pub mod rerank;

pub use corpus::{tokenize, Corpus, Document, SplitSpec, TokenSeq};
pub use ebr::{EnergyModel, FeatureVector, LossKind, RankedList, TrainConfig};
pub use error::{Error, Result};
pub use generator::{CandidateSet, ConditionalLM, GenConfig, Hypothesis};
pub use metrics::{AlignerKind, MetricKind, MetricScore};
pub use rerank::{Method, RerankResult};
