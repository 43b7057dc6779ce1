#![allow(dead_code)]

use ebrank_core::ebr::{EnergyModel, FeatureVector, Standardization, N_FEATURES};
use ebrank_core::generator::train_lm;
use ebrank_core::{ConditionalLM, Corpus, Document, RankedList, TokenSeq};
use rand::Rng;

pub fn rng(seed: u64) -> rand_chacha::ChaCha8Rng {
    use rand::SeedableRng;
    rand_chacha::ChaCha8Rng::seed_from_u64(seed)
}

pub fn random_features<R: Rng>(rng: &mut R) -> FeatureVector {
    let mut v = [0.0; N_FEATURES];
    for x in v.iter_mut().take(N_FEATURES - 1) {
        *x = rng.random_range(-2.0..2.0);
    }
    v[N_FEATURES - 1] = 1.0;
    FeatureVector(v)
}

/// Random weights with scale `w` on top of an identity standardization.
pub fn random_model<R: Rng>(rng: &mut R, w: f64) -> EnergyModel {
    let mut m = EnergyModel::zeros(24);
    m.standardization = Standardization::identity();
    for p in m.params_mut() {
        *p = rng.random_range(-w..w);
    }
    m
}

pub fn random_list<R: Rng>(rng: &mut R, k: usize) -> RankedList {
    let features = (0..k).map(|_| random_features(rng)).collect();
    let scores = (0..k).map(|_| rng.random_range(0.0..1.0)).collect();
    let logprobs = (0..k).map(|_| rng.random_range(-10.0..0.0)).collect();
    RankedList::new("d", features, scores, logprobs).unwrap()
}

pub fn corpus(pairs: &[(&str, &str)]) -> Corpus {
    let docs = pairs
        .iter()
        .enumerate()
        .map(|(i, (s, r))| {
            Document::new(format!("d{i}"), TokenSeq::from_words(s), TokenSeq::from_words(r)).unwrap()
        })
        .collect();
    Corpus::new("test", docs).unwrap()
}

/// Random document over the first `vocab` letters.
pub fn random_words<R: Rng>(rng: &mut R, vocab: usize, len: usize) -> String {
    (0..len)
        .map(|_| ((b'a' + rng.random_range(0..vocab as u8)) as char).to_string())
        .collect::<Vec<_>>()
        .join(" ")
}

/// LM whose vocabulary is exactly the first `vocab` letters.
pub fn letter_lm<R: Rng>(rng: &mut R, vocab: usize, copy_weight: f64, alpha: f64) -> ConditionalLM {
    let all = (0..vocab)
        .map(|i| ((b'a' + i as u8) as char).to_string())
        .collect::<Vec<_>>()
        .join(" ");
    let mut pairs = vec![(all.clone(), all)];
    for _ in 0..6 {
        let (ls, lr) = (rng.random_range(3..8), rng.random_range(1..4));
        let s = random_words(rng, vocab, ls);
        let r = random_words(rng, vocab, lr);
        pairs.push((s, r));
    }
    let refs: Vec<(&str, &str)> = pairs.iter().map(|(a, b)| (a.as_str(), b.as_str())).collect();
    train_lm(&corpus(&refs), copy_weight, alpha).unwrap()
}

/// All permutations of `0..k` by Heap's algorithm.
pub fn permutations(k: usize) -> Vec<Vec<usize>> {
    fn heap(n: usize, a: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if n <= 1 {
            out.push(a.clone());
            return;
        }
        for i in 0..n - 1 {
            heap(n - 1, a, out);
            if n.is_multiple_of(2) {
                a.swap(i, n - 1);
            } else {
                a.swap(0, n - 1);
            }
        }
        heap(n - 1, a, out);
    }
    let mut a: Vec<usize> = (0..k).collect();
    let mut out = Vec::new();
    heap(k, &mut a, &mut out);
    out
}

pub struct Fixture {
    pub lm: ConditionalLM,
    pub train: Corpus,
    pub test: Corpus,
    pub model: EnergyModel,
    pub test_sets: Vec<ebrank_core::CandidateSet>,
}

pub fn gen_cfg(groups: usize, w: f64, k: usize) -> ebrank_core::GenConfig {
    ebrank_core::GenConfig {
        beams: 8.max(k),
        groups,
        diversity_weight: w,
        max_len: 24,
        k,
    }
}

/// Small trained pipeline on the synthetic corpus.
pub fn fixture(seed: u64) -> Fixture {
    use ebrank_core::corpus::{make_synthetic_corpus, split_corpus};
    use ebrank_core::eval::label_candidates;
    use ebrank_core::generator::generate_candidates;
    use ebrank_core::{AlignerKind, MetricKind, SplitSpec, TrainConfig};

    let c = make_synthetic_corpus(160, seed);
    let spec = SplitSpec {
        train_fraction: 0.5,
        val_fraction: 0.0,
        test_fraction: 0.5,
        seed,
    };
    let (train, _, test) = split_corpus(&c, &spec).unwrap();
    let lm = train_lm(&train, 0.5, 0.01).unwrap();
    let sets = generate_candidates(&lm, &train, &gen_cfg(4, 0.8, 8)).unwrap();
    let labels = label_candidates(&train, &sets, MetricKind::RL, AlignerKind::SoftChar).unwrap();
    let lists: Vec<RankedList> = sets
        .iter()
        .zip(labels)
        .map(|(s, l)| {
            let d = train.get(&s.doc_id).unwrap();
            RankedList::from_candidates(&lm, &d.source, s, l, 24).unwrap()
        })
        .collect();
    let cfg = TrainConfig {
        epochs: 40,
        learning_rate: 0.003,
        seed,
        ..TrainConfig::default()
    };
    let (mut model, _) = ebrank_core::ebr::train(&lists, &[], &cfg).unwrap();
    model.feature_max_len = 24;
    let test_sets = generate_candidates(&lm, &test, &gen_cfg(1, 0.0, 8)).unwrap();
    Fixture {
        lm,
        train,
        test,
        model,
        test_sets,
    }
}
