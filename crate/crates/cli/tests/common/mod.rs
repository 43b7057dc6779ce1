#![allow(dead_code)]

use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use ebrank_cli::PipelineConfig;

pub fn bin() -> Command {
    let mut c = Command::new(env!("CARGO_BIN_EXE_ebrank"));
    c.env("RUST_LOG", "warn");
    c
}

pub fn default_config_path() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../../configs/default.json")
}

/// Writes `cfg` to `dir/config.json` and returns the path.
pub fn write_config(dir: &Path, cfg: &PipelineConfig) -> PathBuf {
    let p = dir.join("config.json");
    std::fs::write(&p, cfg.to_json()).unwrap();
    p
}

/// A pipeline small enough to run many times in debug builds.
pub fn small_config(out: &Path) -> PipelineConfig {
    let mut c = PipelineConfig {
        corpus: ebrank_cli::config::CorpusSource::Synthetic { n_docs: 60 },
        ..PipelineConfig::default()
    };
    c.train.epochs = 10;
    c.sweep_k = vec![2, 4];
    c.sweep_weights = vec![0.0, 0.8];
    c.timing_pairs = 20;
    c.significance.resamples = 200;
    c.output_dir = out.to_path_buf();
    c
}

pub fn run(stage: &str, config: &Path, out: &Path) -> Output {
    bin()
        .arg(stage)
        .arg("--config")
        .arg(config)
        .arg("--out")
        .arg(out)
        .output()
        .unwrap()
}

pub fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}
