mod common;

use common::{bin, default_config_path, run, small_config, stderr, write_config};
use ebrank_cli::config::CorpusSource;
use ebrank_cli::manifest::Manifest;
use ebrank_cli::PipelineConfig;
use ebrank_core::MetricKind;

#[test]
fn shipped_config_is_the_default() {
    let loaded = PipelineConfig::load(&default_config_path()).unwrap();
    let d = PipelineConfig {
        output_dir: loaded.output_dir.clone(),
        ..PipelineConfig::default()
    };
    assert_eq!(loaded, d);
    assert!(loaded.output_dir.is_absolute());
}

#[test]
fn report_without_rerank_names_the_dump() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("out");
    let cfg = write_config(dir.path(), &small_config(&out));
    for stage in ["gen-data", "train-lm", "generate"] {
        assert!(run(stage, &cfg, &out).status.success(), "{stage}");
    }
    let o = run("report", &cfg, &out);
    assert_eq!(o.status.code(), Some(1));
    let err = stderr(&o);
    assert!(err.contains("rerank/top_beam.jsonl"), "{err}");
    assert!(!out.join("report.csv").exists());

    let o = run("train-ebr", &cfg, &out);
    assert_eq!(o.status.code(), Some(1));
    assert!(stderr(&o).contains("labels/train.rl.jsonl"));
}

#[test]
fn exit_codes() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("out");
    let cfg = write_config(dir.path(), &small_config(&out));

    let o = run("bogus", &cfg, &out);
    assert_eq!(o.status.code(), Some(1));

    let o = run("gen-data", &dir.path().join("missing.json"), &out);
    assert_eq!(o.status.code(), Some(2), "{}", stderr(&o));

    let mut bad = small_config(&out);
    bad.test_decoding.k = 9;
    let bad_path = dir.path().join("bad.json");
    std::fs::write(&bad_path, bad.to_json()).unwrap();
    let o = run("gen-data", &bad_path, &out);
    assert_eq!(o.status.code(), Some(1));
    assert!(!out.exists(), "nothing may be written for an invalid config");

    let unknown = dir.path().join("unknown.json");
    std::fs::write(&unknown, r#"{"seed": 1, "colour": "red"}"#).unwrap();
    assert_eq!(run("gen-data", &unknown, &out).status.code(), Some(1));

    let mut missing_corpus = small_config(&out);
    missing_corpus.corpus = CorpusSource::File {
        path: dir.path().join("nowhere.jsonl"),
    };
    let p = dir.path().join("file.json");
    std::fs::write(&p, missing_corpus.to_json()).unwrap();
    // Caught by config validation, not at read time.
    assert_eq!(run("gen-data", &p, &out).status.code(), Some(1));

    let o = bin().arg("--help").output().unwrap();
    assert!(o.status.success());
}

#[test]
fn consistency_labels_ignore_references() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("out");
    let mut c = small_config(&out);
    c.target = MetricKind::Consistency;
    c.ebr_targets = vec![MetricKind::Consistency];
    let cfg = write_config(dir.path(), &c);
    for stage in ["gen-data", "train-lm", "generate", "label"] {
        assert!(run(stage, &cfg, &out).status.success(), "{stage}");
    }
    let labels = |split: &str| std::fs::read(out.join(format!("labels/{split}.cons.jsonl"))).unwrap();
    let before: Vec<_> = ["train", "val", "test"].iter().map(|s| labels(s)).collect();
    assert!(!out.join("labels/train.rl.jsonl").exists());

    // Overwrite every reference; consistency labels must not move.
    for split in ["train", "val", "test"] {
        let p = out.join(format!("data/{split}.jsonl"));
        let text = std::fs::read_to_string(&p).unwrap();
        let scrambled: String = text
            .lines()
            .map(|l| {
                let mut v: serde_json::Value = serde_json::from_str(l).unwrap();
                v["reference"] = "unrelated words entirely".into();
                v.to_string() + "\n"
            })
            .collect();
        std::fs::write(&p, scrambled).unwrap();
    }
    assert!(run("label", &cfg, &out).status.success());
    let after: Vec<_> = ["train", "val", "test"].iter().map(|s| labels(s)).collect();
    assert_eq!(before, after);
}

#[test]
fn full_pipeline_is_reproducible() {
    let dir = tempfile::tempdir().unwrap();
    let (a, b) = (dir.path().join("a"), dir.path().join("b"));
    let cfg = write_config(dir.path(), &small_config(&a));
    assert!(run("all", &cfg, &a).status.success());
    let o = run("all", &cfg, &b);
    assert!(o.status.success(), "{}", stderr(&o));

    let ma: Manifest = serde_json::from_slice(&std::fs::read(a.join("manifest.json")).unwrap()).unwrap();
    let mb: Manifest = serde_json::from_slice(&std::fs::read(b.join("manifest.json")).unwrap()).unwrap();
    assert_eq!(ma, mb);
    assert_eq!(ma.seed, 7);
    assert_eq!(ma.stages.len(), 11);
    for (rel, hash) in &ma.files {
        if hash.is_some() {
            assert_eq!(std::fs::read(a.join(rel)).unwrap(), std::fs::read(b.join(rel)).unwrap(), "{rel}");
        }
    }
    assert_eq!(ma.files.get("timing.csv"), Some(&None));

    let report = std::fs::read_to_string(a.join("report.csv")).unwrap();
    let rows: Vec<&str> = report.lines().map(|l| l.split(',').next().unwrap()).collect();
    assert_eq!(rows, ["system", "TopBeam", "Random", "EBR[RL]", "EBR[Cons+Rel]", "Oracle[RL]"]);
    assert_eq!(report.lines().next().unwrap(), "system,R1,R2,RL,Cons,Rel");

    // Re-running a stage rewrites identical bytes.
    let before = std::fs::read(a.join("report_stats.json")).unwrap();
    assert!(run("report", &cfg, &a).status.success());
    assert_eq!(std::fs::read(a.join("report_stats.json")).unwrap(), before);
    let again: Manifest = serde_json::from_slice(&std::fs::read(a.join("manifest.json")).unwrap()).unwrap();
    assert_eq!(again.files, ma.files);

    // A different seed changes the data.
    let o = bin()
        .args(["gen-data", "--config"])
        .arg(&cfg)
        .arg("--out")
        .arg(dir.path().join("c"))
        .args(["--seed", "8"])
        .output()
        .unwrap();
    assert!(o.status.success());
    assert_ne!(
        std::fs::read(dir.path().join("c/data/corpus.jsonl")).unwrap(),
        std::fs::read(a.join("data/corpus.jsonl")).unwrap()
    );
}
