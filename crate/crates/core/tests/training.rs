mod common;

use common::{random_features, random_list, random_model, rng};
use ebrank_core::ebr::{
    energy_order, maxmargin_gradient, maxmargin_loss, ndcg, sample_pairs, train, EnergyModel, FeatureVector,
    Standardization, N_PARAMS,
};
use ebrank_core::{LossKind, RankedList, TrainConfig};
use proptest::prelude::*;
use rand::{Rng, SeedableRng};

/// Direct DCG/IDCG with 1-based discounts `log2(position + 1)`.
fn ndcg_oracle(order: &[usize], gains: &[f64]) -> f64 {
    let dcg = |o: &[usize]| -> f64 {
        o.iter()
            .enumerate()
            .map(|(p, &i)| gains[i] / ((p + 2) as f64).log2())
            .sum()
    };
    let mut ideal: Vec<usize> = (0..gains.len()).collect();
    ideal.sort_by(|a, b| gains[*b].total_cmp(&gains[*a]));
    let idcg = dcg(&ideal);
    if idcg == 0.0 {
        1.0
    } else {
        dcg(order) / idcg
    }
}

#[test]
fn ndcg_examples() {
    let gains = [3.0, 2.0, 1.0];
    let rev = ndcg(&[2, 1, 0], &gains).unwrap();
    let want = ndcg_oracle(&[2, 1, 0], &gains);
    assert!((rev - want).abs() < 1e-15);
    assert!((rev - 0.789_998_0).abs() < 1e-6, "{rev}");
    assert_eq!(ndcg(&[0, 1, 2], &gains).unwrap(), 1.0);
    assert_eq!(ndcg(&[2, 0, 1], &[0.4; 3]).unwrap(), 1.0);
    assert_eq!(ndcg(&[1, 0], &[0.0, 0.0]).unwrap(), 1.0);
    assert!(ndcg(&[0, 1], &[1.0, -0.1]).is_err());
    assert!(ndcg(&[0, 0], &[1.0, 0.5]).is_err());
}

proptest! {
    #[test]
    fn ndcg_agrees_with_oracle(gains in prop::collection::vec(0.0f64..1.0, 1..9), seed in 0u64..1000) {
        let mut order: Vec<usize> = (0..gains.len()).collect();
        use rand::seq::SliceRandom;
        order.shuffle(&mut rng(seed));
        let v = ndcg(&order, &gains).unwrap();
        prop_assert!((v - ndcg_oracle(&order, &gains)).abs() < 1e-12);
        prop_assert!((0.0..=1.0 + 1e-12).contains(&v));
    }
}

/// Lists whose target score is a strictly increasing function of feature 3.
fn separable_lists(n: usize, seed: u64) -> Vec<RankedList> {
    let mut r = rng(seed);
    (0..n)
        .map(|i| {
            let k = 8;
            let features: Vec<FeatureVector> = (0..k).map(|_| random_features(&mut r)).collect();
            let scores = features.iter().map(|f| (f.0[3] * 0.7).exp()).collect();
            RankedList::new(format!("s{i}"), features, scores, vec![0.0; k]).unwrap()
        })
        .collect()
}

fn energies(m: &EnergyModel, l: &RankedList) -> Vec<f64> {
    l.features.iter().map(|f| m.energy(f).unwrap()).collect()
}

fn mean_ndcg(m: &EnergyModel, lists: &[RankedList]) -> f64 {
    lists
        .iter()
        .map(|l| ndcg_oracle(&energy_order(&energies(m, l), &l.logprobs), &l.scores))
        .sum::<f64>()
        / lists.len() as f64
}

#[test]
fn separable_data_is_learned() {
    let tr = separable_lists(60, 1);
    let va = separable_lists(20, 2);
    for loss in [LossKind::ListMLE, LossKind::MaxMargin] {
        let cfg = TrainConfig {
            epochs: 60,
            learning_rate: 0.01,
            batch_size: 8,
            seed: 3,
            loss,
            ..TrainConfig::default()
        };
        let (m, curve) = train(&tr, &va, &cfg).unwrap();
        assert_eq!(curve.len(), 60);
        let best = curve.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
        let got = mean_ndcg(&m, &va);
        assert!((got - best).abs() < 1e-12, "selected model must be the best epoch");
        assert!(got >= 0.99, "{loss:?}: {got}");
    }
}

#[test]
fn zero_epochs_return_the_initialization() {
    let tr = separable_lists(5, 4);
    let cfg = TrainConfig { epochs: 0, seed: 9, ..TrainConfig::default() };
    let (m, curve) = train(&tr, &[], &cfg).unwrap();
    assert!(curve.is_empty());
    let st = Standardization::fit(tr.iter().flat_map(|l| &l.features));
    let init = EnergyModel::init(9, st, 0);
    assert_eq!(m.params(), init.params());
    assert!(m.params().iter().all(|p| p.abs() <= 0.1));
    assert!(m.params().iter().any(|p| *p != 0.0));
}

#[test]
fn training_is_deterministic() {
    let tr = separable_lists(30, 5);
    let va = separable_lists(10, 6);
    for loss in [LossKind::ListMLE, LossKind::MaxMargin] {
        let cfg = TrainConfig { epochs: 15, seed: 2, loss, ..TrainConfig::default() };
        let (a, ca) = train(&tr, &va, &cfg).unwrap();
        let (b, cb) = train(&tr, &va, &cfg).unwrap();
        assert_eq!(a.to_json(), b.to_json());
        assert_eq!(ca, cb);
        let other = TrainConfig { seed: 3, ..cfg };
        assert_ne!(train(&tr, &va, &other).unwrap().0.params(), a.params());
    }
}

#[test]
fn invalid_configs_rejected() {
    let tr = separable_lists(2, 7);
    assert!(train(&tr, &[], &TrainConfig { tau: 0.0, ..TrainConfig::default() }).is_err());
    assert!(train(&[], &[], &TrainConfig::default()).is_err());
}

/// Two candidates with energies `e` (offset by 1 through the output bias)
/// and scores `s`.
fn pair_list(e: [f64; 2], s: [f64; 2]) -> (EnergyModel, RankedList) {
    let mut m = EnergyModel::zeros(24);
    m.params_mut()[0] = 1.0;
    m.params_mut()[N_PARAMS - 1 - 16] = 1.0;
    m.params_mut()[N_PARAMS - 1] = 1.0;
    let features = e
        .iter()
        .map(|v| {
            let mut f = [0.0; 12];
            f[0] = (v - 1.0).atanh();
            f[11] = 1.0;
            FeatureVector(f)
        })
        .collect();
    (m, RankedList::new("p", features, s.to_vec(), vec![0.0; 2]).unwrap())
}

#[test]
fn hinge_examples() {
    let cfg = TrainConfig { loss: LossKind::MaxMargin, ..TrainConfig::default() };
    let (m, l) = pair_list([1.0, 1.1], [0.7, 0.5]);
    assert!((maxmargin_loss(&m, &l, &cfg).unwrap() - 0.1).abs() < 1e-12);
    let (m, l) = pair_list([1.0, 1.5], [0.7, 0.5]);
    assert_eq!(maxmargin_loss(&m, &l, &cfg).unwrap(), 0.0);
    let zero = TrainConfig { margin_scale: 0.0, ..cfg.clone() };
    let (m, l) = pair_list([1.3, 1.1], [0.7, 0.5]);
    assert!((maxmargin_loss(&m, &l, &zero).unwrap() - 0.2).abs() < 1e-12);
    let (m, l) = pair_list([1.3, 1.1], [0.5, 0.5]);
    assert_eq!(maxmargin_loss(&m, &l, &cfg).unwrap(), 0.0);
}

#[test]
fn pairs_point_from_better_to_worse() {
    let mut r = rng(8);
    let scores = [0.3, 0.9, 0.3, 0.1];
    let pairs = sample_pairs(&scores, 200, &mut r);
    assert_eq!(pairs.len(), 200);
    assert!(pairs.iter().all(|&(i, j)| scores[i] > scores[j]));
    assert!(sample_pairs(&[0.2; 3], 5, &mut r).is_empty());
}

#[test]
fn maxmargin_gradient_matches_central_differences() {
    let mut r = rng(9);
    let mut worst: f64 = 0.0;
    for draw in 0..100 {
        let m = random_model(&mut r, 0.6);
        let k = r.random_range(2..=8);
        let list = random_list(&mut r, k);
        let cfg = TrainConfig {
            loss: LossKind::MaxMargin,
            seed: draw,
            margin_scale: 2.0,
            pairs_per_list: 6,
            ..TrainConfig::default()
        };
        let mut pr = rand_chacha::ChaCha8Rng::seed_from_u64(draw);
        let (loss, g) = maxmargin_gradient(&m, &list, &cfg, &mut pr).unwrap();
        assert!((loss - maxmargin_loss(&m, &list, &cfg).unwrap()).abs() < 1e-12);
        let h = 1e-5;
        let mut probe = m.clone();
        #[allow(clippy::needless_range_loop)]
        for i in 0..N_PARAMS {
            let base = probe.params()[i];
            probe.params_mut()[i] = base + h;
            let up = maxmargin_loss(&probe, &list, &cfg).unwrap();
            probe.params_mut()[i] = base - h;
            let down = maxmargin_loss(&probe, &list, &cfg).unwrap();
            probe.params_mut()[i] = base;
            let n = (up - down) / (2.0 * h);
            worst = worst.max((g[i] - n).abs() / g[i].abs().max(n.abs()).max(1e-5));
        }
    }
    assert!(worst <= 1e-4, "{worst}");
}
