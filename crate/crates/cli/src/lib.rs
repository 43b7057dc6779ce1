//! Pipeline orchestration for the `ebrank` binary.
//!
//! Each [`Stage`] reads the artifacts of earlier stages from the output
//! directory and writes its own, then records their hashes in
//! `manifest.json`.

// `!(x > 0.0)` style checks are deliberate: they also reject NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod config;
mod error;
pub mod manifest;
pub mod pipeline;

pub use config::PipelineConfig;
pub use error::{CliError, Result};
pub use pipeline::{Pipeline, Stage};
