//! Pipeline stages and their on-disk artifacts.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use ebrank_core::corpus::{load_corpus, make_synthetic_corpus, split_corpus};
use ebrank_core::dump::{read_jsonl, to_jsonl, LabelRecord, RerankRecord};
use ebrank_core::ebr::{train, EnergyModel, RankedList};
use ebrank_core::eval::{
    candidate_sweep, choose_random, cross_model_eval, diversity_sweep, energy_histogram,
    evaluate_choices, histogram_csv, kendall_tau, label_candidates, permutation_test, report_csv,
    report_markdown, sweep_csv, timing_csv, timing_report, SignificanceResult, SystemReport,
};
use ebrank_core::generator::{generate_candidates, train_lm};
use ebrank_core::metrics::MetricKind;
use ebrank_core::rerank::{rerank_ebr, rerank_oracle, rerank_top_beam, Method, RerankResult};
use ebrank_core::{CandidateSet, ConditionalLM, Corpus};
use serde::Serialize;

use crate::config::{CorpusSource, PipelineConfig};
use crate::error::{CliError, Result};
use crate::manifest::Manifest;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Stage {
    GenData,
    TrainLm,
    Generate,
    Label,
    TrainEbr,
    Rerank,
    Report,
    SweepK,
    SweepDiv,
    CrossModel,
    Timing,
}

impl Stage {
    /// Every stage in dependency order.
    pub const ALL: [Stage; 11] = [
        Stage::GenData,
        Stage::TrainLm,
        Stage::Generate,
        Stage::Label,
        Stage::TrainEbr,
        Stage::Rerank,
        Stage::Report,
        Stage::SweepK,
        Stage::SweepDiv,
        Stage::CrossModel,
        Stage::Timing,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Stage::GenData => "gen-data",
            Stage::TrainLm => "train-lm",
            Stage::Generate => "generate",
            Stage::Label => "label",
            Stage::TrainEbr => "train-ebr",
            Stage::Rerank => "rerank",
            Stage::Report => "report",
            Stage::SweepK => "sweep-k",
            Stage::SweepDiv => "sweep-div",
            Stage::CrossModel => "cross-model",
            Stage::Timing => "timing",
        }
    }
}

impl FromStr for Stage {
    type Err = CliError;

    fn from_str(s: &str) -> Result<Self> {
        Stage::ALL
            .into_iter()
            .find(|st| st.name() == s)
            .ok_or_else(|| CliError::Config(format!("unknown stage `{s}`")))
    }
}

pub const SPLITS: [&str; 3] = ["train", "val", "test"];

/// File-name fragment for a metric.
pub fn slug(kind: MetricKind) -> &'static str {
    match kind {
        MetricKind::R1 => "r1",
        MetricKind::R2 => "r2",
        MetricKind::RL => "rl",
        MetricKind::Consistency => "cons",
        MetricKind::Relevance => "rel",
        MetricKind::ConsPlusRel => "cons_rel",
    }
}

/// Columns of the main report.
pub const REPORT_COLUMNS: [MetricKind; 5] = [
    MetricKind::R1,
    MetricKind::R2,
    MetricKind::RL,
    MetricKind::Consistency,
    MetricKind::Relevance,
];

/// Artifact paths relative to the output directory.
pub mod layout {
    use super::slug;
    use ebrank_core::MetricKind;

    pub fn corpus() -> String {
        "data/corpus.jsonl".into()
    }
    pub fn split(name: &str) -> String {
        format!("data/{name}.jsonl")
    }
    pub fn lm_a() -> String {
        "models/lm_a.json".into()
    }
    pub fn lm_b() -> String {
        "models/lm_b.json".into()
    }
    pub fn candidates(split: &str) -> String {
        format!("candidates/{split}.jsonl")
    }
    pub fn labels(split: &str, kind: MetricKind) -> String {
        format!("labels/{split}.{}.jsonl", slug(kind))
    }
    pub fn ebr_model(kind: MetricKind) -> String {
        format!("models/ebr.{}.json", slug(kind))
    }
    pub fn ebr_curve(kind: MetricKind) -> String {
        format!("models/ebr.{}.curve.csv", slug(kind))
    }
    pub fn rerank_top_beam() -> String {
        "rerank/top_beam.jsonl".into()
    }
    pub fn rerank_random() -> String {
        "rerank/random.jsonl".into()
    }
    pub fn rerank_ebr(kind: MetricKind) -> String {
        format!("rerank/ebr.{}.jsonl", slug(kind))
    }
    pub fn rerank_oracle(kind: MetricKind) -> String {
        format!("rerank/oracle.{}.jsonl", slug(kind))
    }
    pub const REPORT_CSV: &str = "report.csv";
    pub const REPORT_MD: &str = "report.md";
    pub const REPORT_STATS: &str = "report_stats.json";
    pub const SWEEP_K_CANDIDATES: &str = "candidates/test_sweep.jsonl";
    pub const SWEEP_K_CSV: &str = "sweep_k.csv";
    pub const SWEEP_K_JSON: &str = "sweep_k.json";
    pub const SWEEP_DIV_CSV: &str = "sweep_div.csv";
    pub const SWEEP_DIV_JSON: &str = "sweep_div.json";
    pub const CROSS_CANDIDATES: &str = "candidates/test_b.jsonl";
    pub const CROSS_RERANK: &str = "rerank/ebr_on_b.jsonl";
    pub const CROSS_CSV: &str = "cross_model.csv";
    pub const CROSS_STATS: &str = "cross_model_stats.json";
    pub const HISTOGRAM_CSV: &str = "histogram.csv";
    pub const TIMING_CSV: &str = "timing.csv";
}

/// Runs stages against one output directory and keeps its manifest.
pub struct Pipeline {
    cfg: PipelineConfig,
    out: PathBuf,
    manifest: Manifest,
}

impl Pipeline {
    /// Validates the config; nothing is written before this succeeds.
    pub fn new(cfg: PipelineConfig) -> Result<Self> {
        cfg.validate()?;
        let out = cfg.output_dir.clone();
        std::fs::create_dir_all(&out).map_err(|e| CliError::io(&out, e))?;
        let manifest = Manifest::load_or_new(&out, &cfg)?;
        Ok(Pipeline { cfg, out, manifest })
    }

    pub fn config(&self) -> &PipelineConfig {
        &self.cfg
    }

    pub fn out_dir(&self) -> &Path {
        &self.out
    }

    pub fn run_all(&mut self) -> Result<()> {
        for stage in Stage::ALL {
            self.run(stage)?;
        }
        Ok(())
    }

    pub fn run(&mut self, stage: Stage) -> Result<()> {
        log::info!("stage {}", stage.name());
        let mut w = Writer::default();
        match stage {
            Stage::GenData => self.gen_data(&mut w)?,
            Stage::TrainLm => self.train_lm(&mut w)?,
            Stage::Generate => self.generate(&mut w)?,
            Stage::Label => self.label(&mut w)?,
            Stage::TrainEbr => self.train_ebr(&mut w)?,
            Stage::Rerank => self.rerank(&mut w)?,
            Stage::Report => self.report(&mut w)?,
            Stage::SweepK => self.sweep_k(&mut w)?,
            Stage::SweepDiv => self.sweep_div(&mut w)?,
            Stage::CrossModel => self.cross_model(&mut w)?,
            Stage::Timing => self.timing(&mut w)?,
        }
        w.flush(&self.out)?;
        self.manifest.record(&self.out, stage.name(), &w.recorded())?;
        self.manifest.save(&self.out)
    }

    /// Path of an upstream artifact, or an error naming it.
    fn require(&self, rel: &str, stage: Stage) -> Result<PathBuf> {
        let p = self.out.join(rel);
        if p.is_file() {
            Ok(p)
        } else {
            Err(CliError::MissingArtifact {
                path: p,
                stage: stage.name(),
            })
        }
    }

    fn read_text(&self, rel: &str, stage: Stage) -> Result<String> {
        let p = self.require(rel, stage)?;
        std::fs::read_to_string(&p).map_err(|e| CliError::io(&p, e))
    }

    fn split(&self, name: &str) -> Result<Corpus> {
        Ok(load_corpus(&self.require(&layout::split(name), Stage::GenData)?)?)
    }

    fn lm(&self, rel: &str) -> Result<ConditionalLM> {
        Ok(ConditionalLM::from_json(&self.read_text(rel, Stage::TrainLm)?)?)
    }

    fn candidates(&self, rel: &str, stage: Stage) -> Result<Vec<CandidateSet>> {
        Ok(read_jsonl(&self.require(rel, stage)?)?)
    }

    fn labels(&self, split: &str, kind: MetricKind) -> Result<Vec<LabelRecord>> {
        Ok(read_jsonl(&self.require(&layout::labels(split, kind), Stage::Label)?)?)
    }

    fn ebr_model(&self, kind: MetricKind) -> Result<EnergyModel> {
        Ok(EnergyModel::from_json(
            &self.read_text(&layout::ebr_model(kind), Stage::TrainEbr)?,
        )?)
    }

    /// Rerank dump joined back onto its candidate sets.
    fn rerank_results(&self, rel: &str, sets: &[CandidateSet]) -> Result<Vec<RerankResult>> {
        let records: Vec<RerankRecord> = read_jsonl(&self.require(rel, Stage::Rerank)?)?;
        join_rerank(records, sets)
    }

    fn gen_data(&self, w: &mut Writer) -> Result<()> {
        let corpus = match &self.cfg.corpus {
            CorpusSource::Synthetic { n_docs } => make_synthetic_corpus(*n_docs, self.cfg.seed),
            CorpusSource::File { path } => load_corpus(path)?,
        };
        let (train, val, test) = split_corpus(&corpus, &self.cfg.split_spec())?;
        if train.is_empty() {
            return Err(CliError::Config("the split leaves no training documents".into()));
        }
        w.text(layout::corpus(), corpus.to_jsonl());
        for (name, c) in SPLITS.iter().zip([&train, &val, &test]) {
            w.text(layout::split(name), c.to_jsonl());
        }
        Ok(())
    }

    fn train_lm(&self, w: &mut Writer) -> Result<()> {
        let train = self.split("train")?;
        let (a, b) = (self.cfg.generator, self.cfg.generator_b);
        w.text(layout::lm_a(), train_lm(&train, a.copy_weight, a.alpha)?.to_json());
        w.text(layout::lm_b(), train_lm(&train, b.copy_weight, b.alpha)?.to_json());
        Ok(())
    }

    fn generate(&self, w: &mut Writer) -> Result<()> {
        let lm = self.lm(&layout::lm_a())?;
        for name in SPLITS {
            let corpus = self.split(name)?;
            let dec = if name == "test" {
                &self.cfg.test_decoding
            } else {
                &self.cfg.train_decoding
            };
            w.text(layout::candidates(name), to_jsonl(&generate_candidates(&lm, &corpus, dec)?)?);
        }
        Ok(())
    }

    fn label(&self, w: &mut Writer) -> Result<()> {
        for name in SPLITS {
            let corpus = self.split(name)?;
            let sets = self.candidates(&layout::candidates(name), Stage::Generate)?;
            for kind in self.cfg.label_kinds() {
                let scores = label_candidates(&corpus, &sets, kind, self.cfg.aligner)?;
                let records: Vec<LabelRecord> = sets
                    .iter()
                    .zip(scores)
                    .map(|(s, scores)| LabelRecord {
                        doc_id: s.doc_id.clone(),
                        kind,
                        scores,
                    })
                    .collect();
                w.text(layout::labels(name, kind), to_jsonl(&records)?);
            }
        }
        Ok(())
    }

    fn ranked_lists(&self, lm: &ConditionalLM, name: &str, kind: MetricKind) -> Result<Vec<RankedList>> {
        let corpus = self.split(name)?;
        let sets = self.candidates(&layout::candidates(name), Stage::Generate)?;
        let labels = self.labels(name, kind)?;
        if labels.len() != sets.len() {
            return Err(CliError::Config(format!(
                "labels for {name} do not match its candidates; rerun `label`"
            )));
        }
        sets.iter()
            .zip(labels)
            .map(|(s, l)| {
                if l.doc_id != s.doc_id || l.scores.len() != s.len() {
                    return Err(CliError::Config(format!(
                        "labels for document `{}` do not match its candidates",
                        s.doc_id
                    )));
                }
                let doc = corpus
                    .get(&s.doc_id)
                    .ok_or_else(|| ebrank_core::Error::MissingDocument(s.doc_id.clone()))?;
                Ok(RankedList::from_candidates(
                    lm,
                    &doc.source,
                    s,
                    l.scores,
                    self.cfg.train_decoding.max_len,
                )?)
            })
            .collect()
    }

    fn train_ebr(&self, w: &mut Writer) -> Result<()> {
        let lm = self.lm(&layout::lm_a())?;
        for &kind in &self.cfg.ebr_targets {
            let train_lists = self.ranked_lists(&lm, "train", kind)?;
            let val_lists = self.ranked_lists(&lm, "val", kind)?;
            let (mut model, curve) = train(&train_lists, &val_lists, &self.cfg.train_config())?;
            model.feature_max_len = self.cfg.train_decoding.max_len;
            w.text(layout::ebr_model(kind), model.to_json() + "\n");
            let mut csv = String::from("epoch,val_ndcg\n");
            for (i, v) in curve.iter().enumerate() {
                writeln!(csv, "{},{v:.6}", i + 1).unwrap();
            }
            w.text(layout::ebr_curve(kind), csv);
        }
        Ok(())
    }

    fn rerank(&self, w: &mut Writer) -> Result<()> {
        let lm = self.lm(&layout::lm_a())?;
        let test = self.split("test")?;
        let sets = self.candidates(&layout::candidates("test"), Stage::Generate)?;
        let records = |rs: &[RerankResult]| -> Result<String> {
            Ok(to_jsonl(&rs.iter().map(RerankRecord::from).collect::<Vec<_>>())?)
        };
        let top = sets.iter().map(rerank_top_beam).collect::<ebrank_core::Result<Vec<_>>>()?;
        w.text(layout::rerank_top_beam(), records(&top)?);
        w.text(layout::rerank_random(), records(&choose_random(&sets, self.cfg.seed)?)?);
        for &kind in &self.cfg.ebr_targets {
            let model = self.ebr_model(kind)?;
            let res = sets
                .iter()
                .map(|s| rerank_ebr(&model, &source_of(&test, &s.doc_id)?.source, s, &lm))
                .collect::<ebrank_core::Result<Vec<_>>>()?;
            w.text(layout::rerank_ebr(kind), records(&res)?);
        }
        let target = self.cfg.target;
        let oracle = sets
            .iter()
            .map(|s| {
                let d = source_of(&test, &s.doc_id)?;
                rerank_oracle(target, &d.source, Some(&d.reference), s, self.cfg.aligner)
            })
            .collect::<ebrank_core::Result<Vec<_>>>()?;
        w.text(layout::rerank_oracle(target), records(&oracle)?);
        Ok(())
    }

    /// Systems of the main report, in row order.
    pub fn systems(&self) -> Vec<(String, String)> {
        let mut v = vec![
            ("TopBeam".to_owned(), layout::rerank_top_beam()),
            ("Random".to_owned(), layout::rerank_random()),
        ];
        for &k in &self.cfg.ebr_targets {
            v.push((format!("EBR[{}]", k.label()), layout::rerank_ebr(k)));
        }
        v.push((
            format!("Oracle[{}]", self.cfg.target.label()),
            layout::rerank_oracle(self.cfg.target),
        ));
        v
    }

    fn report(&self, w: &mut Writer) -> Result<()> {
        let test = self.split("test")?;
        let sets = self.candidates(&layout::candidates("test"), Stage::Generate)?;
        let mut reports = Vec::new();
        for (name, rel) in self.systems() {
            let res = self.rerank_results(&rel, &sets)?;
            reports.push(evaluate_choices(name, &res, &test, &MetricKind::ALL, self.cfg.aligner)?);
        }
        w.text(layout::REPORT_CSV, report_csv(&reports, &REPORT_COLUMNS)?);
        w.text(layout::REPORT_MD, report_markdown(&reports, &REPORT_COLUMNS)?);

        let target = self.cfg.target;
        let find = |name: &str| reports.iter().find(|r| r.system == name).expect("system row");
        let ebr_name = format!("EBR[{}]", target.label());
        let sig = self.cfg.significance;
        let test_pair = |a: &SystemReport, b: &SystemReport| -> Result<SignificanceResult> {
            Ok(permutation_test(
                a.scores(target).expect("scored"),
                b.scores(target).expect("scored"),
                sig.resamples,
                sig.alpha,
                self.cfg.seed,
            )?)
        };
        let mut significance = BTreeMap::new();
        for other in ["TopBeam", "Random"] {
            significance.insert(
                format!("{ebr_name} vs {other}"),
                test_pair(find(&ebr_name), find(other))?,
            );
        }
        let mut taus = BTreeMap::new();
        for &kind in &self.cfg.ebr_targets {
            let res = self.rerank_results(&layout::rerank_ebr(kind), &sets)?;
            let labels = self.labels("test", kind)?;
            taus.insert(format!("EBR[{}]", kind.label()), mean_kendall_tau(&res, &labels)?);
        }
        let stats = ReportStats {
            target,
            means: reports
                .iter()
                .map(|r| {
                    let m = r.kinds.iter().zip(&r.means).map(|(k, v)| (k.label().to_owned(), *v));
                    (r.system.clone(), m.collect())
                })
                .collect(),
            significance,
            kendall_tau: taus,
            n_docs: test.len(),
        };
        w.json(layout::REPORT_STATS, &stats)?;
        Ok(())
    }

    fn sweep_k(&self, w: &mut Writer) -> Result<()> {
        let lm = self.lm(&layout::lm_a())?;
        let test = self.split("test")?;
        let model = self.ebr_model(self.cfg.target)?;
        let sets = generate_candidates(&lm, &test, &self.cfg.sweep_decoding())?;
        w.text(layout::SWEEP_K_CANDIDATES, to_jsonl(&sets)?);
        let rows = candidate_sweep(
            &model,
            &lm,
            &test,
            &sets,
            self.cfg.target,
            self.cfg.aligner,
            &self.cfg.sweep_k,
        )?;
        w.text(layout::SWEEP_K_CSV, sweep_csv("k", &rows));
        w.json(layout::SWEEP_K_JSON, &rows)?;
        Ok(())
    }

    fn sweep_div(&self, w: &mut Writer) -> Result<()> {
        let lm = self.lm(&layout::lm_a())?;
        let val = self.split("val")?;
        if val.is_empty() {
            return Err(CliError::Config("diversity sweep needs validation documents".into()));
        }
        let model = self.ebr_model(self.cfg.target)?;
        let rows = diversity_sweep(
            &lm,
            &val,
            &self.cfg.train_decoding,
            &self.cfg.sweep_weights,
            &model,
            self.cfg.target,
            self.cfg.aligner,
        )?;
        w.text(layout::SWEEP_DIV_CSV, sweep_csv("diversity_weight", &rows));
        w.json(layout::SWEEP_DIV_JSON, &rows)?;
        Ok(())
    }

    fn cross_model(&self, w: &mut Writer) -> Result<()> {
        let lm_a = self.lm(&layout::lm_a())?;
        let lm_b = self.lm(&layout::lm_b())?;
        let test = self.split("test")?;
        let target = self.cfg.target;
        let model = self.ebr_model(target)?;
        let cm = cross_model_eval(
            &model,
            &lm_a,
            &lm_b,
            &self.cfg.test_decoding,
            &test,
            &MetricKind::ALL,
            self.cfg.aligner,
            self.cfg.seed,
        )?;
        w.text(layout::CROSS_CANDIDATES, to_jsonl(&cm.candidates)?);
        let recs: Vec<RerankRecord> = cm.ebr_choices.iter().map(RerankRecord::from).collect();
        w.text(layout::CROSS_RERANK, to_jsonl(&recs)?);
        let rows: Vec<SystemReport> = cm.rows().into_iter().cloned().collect();
        w.text(layout::CROSS_CSV, report_csv(&rows, &REPORT_COLUMNS)?);

        let sig = self.cfg.significance;
        let scores = |r: &SystemReport| r.scores(target).expect("scored").to_vec();
        let stats = CrossModelStats {
            target,
            top_beam_mean: cm.top_beam.mean(target).expect("scored"),
            ebr_mean: cm.ebr.mean(target).expect("scored"),
            random_mean: cm.random.mean(target).expect("scored"),
            n_docs: test.len(),
            ebr_vs_random: permutation_test(
                &scores(&cm.ebr),
                &scores(&cm.random),
                sig.resamples,
                sig.alpha,
                self.cfg.seed,
            )?,
            ebr_vs_top_beam: permutation_test(
                &scores(&cm.ebr),
                &scores(&cm.top_beam),
                sig.resamples,
                sig.alpha,
                self.cfg.seed,
            )?,
        };
        w.json(layout::CROSS_STATS, &stats)?;

        let h = self.cfg.histogram;
        let sets_a = self.candidates(&layout::candidates("test"), Stage::Generate)?;
        let res_a = self.rerank_results(&layout::rerank_ebr(target), &sets_a)?;
        let hist_a = energy_histogram(&res_a, h.bins, (h.low, h.high))?;
        let hist_b = energy_histogram(&cm.ebr_choices, h.bins, (h.low, h.high))?;
        w.text(
            layout::HISTOGRAM_CSV,
            histogram_csv(&[("generator_a", &hist_a), ("generator_b", &hist_b)])?,
        );
        Ok(())
    }

    fn timing(&self, w: &mut Writer) -> Result<()> {
        let lm = self.lm(&layout::lm_a())?;
        let test = self.split("test")?;
        let model = self.ebr_model(self.cfg.target)?;
        let sets = self.candidates(&layout::candidates("test"), Stage::Generate)?;
        let mut pairs = Vec::with_capacity(self.cfg.timing_pairs);
        'fill: loop {
            for s in &sets {
                let x = &source_of(&test, &s.doc_id)?.source;
                for c in &s.candidates {
                    if pairs.len() == self.cfg.timing_pairs {
                        break 'fill;
                    }
                    pairs.push((x.clone(), c.clone()));
                }
            }
            if sets.is_empty() {
                return Err(CliError::Config("no test candidates to time".into()));
            }
        }
        let rows = timing_report(&model, &lm, &pairs, 3)?;
        w.unhashed(layout::TIMING_CSV, timing_csv(&rows));
        Ok(())
    }
}

fn source_of<'c>(corpus: &'c Corpus, id: &str) -> ebrank_core::Result<&'c ebrank_core::Document> {
    corpus
        .get(id)
        .ok_or_else(|| ebrank_core::Error::MissingDocument(id.to_owned()))
}

/// Re-attaches chosen hypotheses to rerank records.
pub fn join_rerank(records: Vec<RerankRecord>, sets: &[CandidateSet]) -> Result<Vec<RerankResult>> {
    let by_id: BTreeMap<&str, &CandidateSet> = sets.iter().map(|s| (s.doc_id.as_str(), s)).collect();
    records
        .into_iter()
        .map(|r| {
            let set = by_id
                .get(r.doc_id.as_str())
                .ok_or_else(|| ebrank_core::Error::MissingDocument(r.doc_id.clone()))?;
            let chosen = set.candidates.get(r.chosen_index).cloned().ok_or_else(|| {
                CliError::Config(format!(
                    "document `{}`: chosen index {} out of range",
                    r.doc_id, r.chosen_index
                ))
            })?;
            Ok(RerankResult {
                doc_id: r.doc_id,
                method: r.method,
                chosen_index: r.chosen_index,
                chosen,
                scores: r.scores,
            })
        })
        .collect()
}

/// Mean Kendall τ-b between the energy order (low first) and the label
/// order (high first). Documents where τ is undefined are skipped.
pub fn mean_kendall_tau(results: &[RerankResult], labels: &[LabelRecord]) -> Result<f64> {
    let by_id: BTreeMap<&str, &LabelRecord> = labels.iter().map(|l| (l.doc_id.as_str(), l)).collect();
    let mut taus = Vec::new();
    for r in results {
        if r.method != Method::EBR {
            return Err(CliError::Config(format!("{} results carry no energies", r.method)));
        }
        let l = by_id
            .get(r.doc_id.as_str())
            .ok_or_else(|| ebrank_core::Error::MissingDocument(r.doc_id.clone()))?;
        let neg: Vec<f64> = r.scores.iter().map(|e| -e).collect();
        if let Some(t) = kendall_tau(&neg, &l.scores) {
            taus.push(t);
        }
    }
    Ok(if taus.is_empty() {
        0.0
    } else {
        taus.iter().sum::<f64>() / taus.len() as f64
    })
}

#[derive(Debug, Serialize, serde::Deserialize)]
pub struct ReportStats {
    pub target: MetricKind,
    pub n_docs: usize,
    /// System to metric label to mean.
    pub means: BTreeMap<String, BTreeMap<String, f64>>,
    pub significance: BTreeMap<String, SignificanceResult>,
    pub kendall_tau: BTreeMap<String, f64>,
}

#[derive(Debug, Serialize, serde::Deserialize)]
pub struct CrossModelStats {
    pub target: MetricKind,
    pub n_docs: usize,
    pub top_beam_mean: f64,
    pub ebr_mean: f64,
    pub random_mean: f64,
    pub ebr_vs_random: SignificanceResult,
    pub ebr_vs_top_beam: SignificanceResult,
}

/// Artifacts produced by a stage, written together once it succeeds.
#[derive(Default)]
struct Writer {
    files: Vec<(String, String, bool)>,
}

impl Writer {
    fn text(&mut self, rel: impl Into<String>, body: String) {
        self.files.push((rel.into(), body, true));
    }

    fn unhashed(&mut self, rel: impl Into<String>, body: String) {
        self.files.push((rel.into(), body, false));
    }

    fn json<T: Serialize>(&mut self, rel: &str, value: &T) -> Result<()> {
        let body = serde_json::to_string_pretty(value).map_err(ebrank_core::Error::from)? + "\n";
        self.text(rel, body);
        Ok(())
    }

    fn flush(&self, out: &Path) -> Result<()> {
        for (rel, body, _) in &self.files {
            let p = out.join(rel);
            if let Some(dir) = p.parent() {
                std::fs::create_dir_all(dir).map_err(|e| CliError::io(dir, e))?;
            }
            std::fs::write(&p, body).map_err(|e| CliError::io(&p, e))?;
        }
        Ok(())
    }

    fn recorded(&self) -> Vec<(String, bool)> {
        self.files.iter().map(|(r, _, h)| (r.clone(), *h)).collect()
    }
}
