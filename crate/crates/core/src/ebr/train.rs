//! Mini-batch training with Adam and NDCG-based epoch selection.

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use super::model::{EnergyModel, Standardization, N_PARAMS};
use super::{energy_order, listmle, maxmargin, ndcg, LossKind, RankedList, TrainConfig};
use crate::error::{Error, Result};

const BETA1: f64 = 0.9;
const BETA2: f64 = 0.999;
const EPS: f64 = 1e-8;

struct Adam {
    m: Vec<f64>,
    v: Vec<f64>,
    t: i32,
}

impl Adam {
    fn new() -> Self {
        Adam {
            m: vec![0.0; N_PARAMS],
            v: vec![0.0; N_PARAMS],
            t: 0,
        }
    }

    fn step(&mut self, params: &mut [f64], grad: &[f64], lr: f64) {
        self.t += 1;
        let c1 = 1.0 - BETA1.powi(self.t);
        let c2 = 1.0 - BETA2.powi(self.t);
        for i in 0..params.len() {
            self.m[i] = BETA1 * self.m[i] + (1.0 - BETA1) * grad[i];
            self.v[i] = BETA2 * self.v[i] + (1.0 - BETA2) * grad[i] * grad[i];
            params[i] -= lr * (self.m[i] / c1) / ((self.v[i] / c2).sqrt() + EPS);
        }
    }
}

/// Mean NDCG of the energy-induced order against the list scores.
pub(crate) fn mean_ndcg(model: &EnergyModel, lists: &[RankedList]) -> Result<f64> {
    let mut total = 0.0;
    for l in lists {
        let e = l
            .features
            .iter()
            .map(|f| model.energy(f))
            .collect::<Result<Vec<_>>>()?;
        total += ndcg(&energy_order(&e, &l.logprobs), &l.scores)?;
    }
    Ok(total / lists.len() as f64)
}

/// Trains an energy model and returns it with the per-epoch validation
/// NDCG curve. The returned model is the one from the best epoch (earliest
/// on ties). Without validation lists the training lists are used for
/// selection.
///
/// The returned model's `feature_max_len` is 0; callers set it to the
/// generator `max_len` the features were extracted with.
pub fn train(
    train_lists: &[RankedList],
    val_lists: &[RankedList],
    cfg: &TrainConfig,
) -> Result<(EnergyModel, Vec<f64>)> {
    cfg.validate()?;
    if train_lists.is_empty() {
        return Err(Error::invalid("no training lists"));
    }
    let st = Standardization::fit(train_lists.iter().flat_map(|l| &l.features));
    let mut model = EnergyModel::init(cfg.seed, st, 0);
    model.train_config = Some(cfg.clone());
    let select_on = if val_lists.is_empty() { train_lists } else { val_lists };

    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    rng.set_stream(1);
    let mut adam = Adam::new();
    let mut order: Vec<usize> = (0..train_lists.len()).collect();
    let mut curve = Vec::with_capacity(cfg.epochs);
    let mut best: Option<(f64, EnergyModel)> = None;
    let mut grad = vec![0.0; N_PARAMS];

    for epoch in 0..cfg.epochs {
        order.shuffle(&mut rng);
        let mut epoch_loss = 0.0;
        for batch in order.chunks(cfg.batch_size) {
            grad.iter_mut().for_each(|g| *g = 0.0);
            let mut used = 0usize;
            for &i in batch {
                let list = &train_lists[i];
                if list.len() < 2 {
                    log::warn!("document `{}`: singleton list skipped", list.doc_id);
                    continue;
                }
                used += 1;
                epoch_loss += match cfg.loss {
                    LossKind::ListMLE => listmle::accumulate(&model, list, cfg.tau, &mut grad)?,
                    LossKind::MaxMargin => {
                        maxmargin::accumulate(&model, list, cfg, &mut rng, &mut grad)?
                    }
                };
            }
            if used == 0 {
                continue;
            }
            grad.iter_mut().for_each(|g| *g /= used as f64);
            adam.step(model.params_mut(), &grad, cfg.learning_rate);
        }
        let score = mean_ndcg(&model, select_on)?;
        log::debug!(
            "epoch {epoch}: train loss {:.4}, selection ndcg {score:.4}",
            epoch_loss / train_lists.len() as f64
        );
        curve.push(score);
        if best.as_ref().is_none_or(|(b, _)| score > *b) {
            best = Some((score, model.clone()));
        }
    }
    Ok((best.map_or(model, |(_, m)| m), curve))
}
