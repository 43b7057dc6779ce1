//! Benchmark fixtures.

use ebrank_core::corpus::make_synthetic_corpus;
use ebrank_core::ebr::{train, RankedList};
use ebrank_core::eval::label_candidates;
use ebrank_core::generator::{generate_candidates, train_lm};
use ebrank_core::{AlignerKind, CandidateSet, ConditionalLM, Corpus, EnergyModel, GenConfig, MetricKind, TrainConfig};

pub const MAX_LEN: usize = 24;

pub fn decoding(groups: usize, diversity_weight: f64) -> GenConfig {
    GenConfig {
        beams: 8,
        groups,
        diversity_weight,
        max_len: MAX_LEN,
        k: 8,
    }
}

/// A trained generator and re-ranker with labelled candidate lists.
pub struct Fixture {
    pub corpus: Corpus,
    pub lm: ConditionalLM,
    pub sets: Vec<CandidateSet>,
    pub lists: Vec<RankedList>,
    pub model: EnergyModel,
}

impl Fixture {
    pub fn new(n_docs: usize) -> Self {
        let corpus = make_synthetic_corpus(n_docs, 7);
        let lm = train_lm(&corpus, 0.5, 0.01).expect("valid generator settings");
        let sets = generate_candidates(&lm, &corpus, &decoding(4, 0.8)).expect("decodable corpus");
        let labels = label_candidates(&corpus, &sets, MetricKind::RL, AlignerKind::SoftChar).expect("labels");
        let lists: Vec<RankedList> = sets
            .iter()
            .zip(labels)
            .map(|(s, l)| {
                let d = corpus.get(&s.doc_id).expect("document of its own candidates");
                RankedList::from_candidates(&lm, &d.source, s, l, MAX_LEN).expect("features")
            })
            .collect();
        let cfg = TrainConfig {
            epochs: 5,
            ..TrainConfig::default()
        };
        let (mut model, _) = train(&lists, &[], &cfg).expect("training");
        model.feature_max_len = MAX_LEN;
        Fixture {
            corpus,
            lm,
            sets,
            lists,
            model,
        }
    }
}
