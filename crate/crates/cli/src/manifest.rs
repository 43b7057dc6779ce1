//! `manifest.json`: provenance and content hashes of every artifact.

use std::collections::BTreeMap;
use std::path::Path;

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::config::PipelineConfig;
use crate::error::{CliError, Result};

pub const MANIFEST_FILE: &str = "manifest.json";
pub const TOOL_VERSION: &str = env!("CARGO_PKG_VERSION");

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Manifest {
    pub tool: String,
    pub tool_version: String,
    pub config_sha256: String,
    pub seed: u64,
    /// Artifact path (relative to the output directory) to its SHA-256.
    /// Timing output is listed without a hash since wall-clock numbers
    /// differ between runs.
    pub files: BTreeMap<String, Option<String>>,
    /// Stage name to the artifacts it wrote.
    pub stages: BTreeMap<String, Vec<String>>,
}

pub fn sha256_hex(bytes: &[u8]) -> String {
    hex::encode(Sha256::digest(bytes))
}

/// Hash of the config with the output location blanked, so the same
/// experiment written to two directories shares its hash.
pub fn config_hash(cfg: &PipelineConfig) -> String {
    let mut c = cfg.clone();
    c.output_dir = Default::default();
    sha256_hex(c.to_json().as_bytes())
}

impl Manifest {
    fn fresh(cfg: &PipelineConfig) -> Self {
        Manifest {
            tool: "ebrank".into(),
            tool_version: TOOL_VERSION.into(),
            config_sha256: config_hash(cfg),
            seed: cfg.seed,
            files: BTreeMap::new(),
            stages: BTreeMap::new(),
        }
    }

    /// The manifest in `out`, or a fresh one when absent or written for a
    /// different config.
    pub fn load_or_new(out: &Path, cfg: &PipelineConfig) -> Result<Self> {
        let path = out.join(MANIFEST_FILE);
        if !path.exists() {
            return Ok(Self::fresh(cfg));
        }
        let text = std::fs::read_to_string(&path).map_err(|e| CliError::io(&path, e))?;
        match serde_json::from_str::<Manifest>(&text) {
            Ok(m) if m.config_sha256 == config_hash(cfg) && m.tool_version == TOOL_VERSION => Ok(m),
            _ => Ok(Self::fresh(cfg)),
        }
    }

    /// Records the artifacts of one stage, hashing their current contents.
    pub fn record(&mut self, out: &Path, stage: &str, files: &[(String, bool)]) -> Result<()> {
        for (rel, hashed) in files {
            let hash = if *hashed {
                let p = out.join(rel);
                let bytes = std::fs::read(&p).map_err(|e| CliError::io(&p, e))?;
                Some(sha256_hex(&bytes))
            } else {
                None
            };
            self.files.insert(rel.clone(), hash);
        }
        self.stages
            .insert(stage.to_owned(), files.iter().map(|(f, _)| f.clone()).collect());
        Ok(())
    }

    pub fn save(&self, out: &Path) -> Result<()> {
        let path = out.join(MANIFEST_FILE);
        let text = serde_json::to_string_pretty(self).expect("serializable manifest") + "\n";
        std::fs::write(&path, text).map_err(|e| CliError::io(&path, e))
    }
}
