//! Pairwise max-margin loss with a metric-scaled margin.

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use super::model::{EnergyModel, N_PARAMS};
use super::{RankedList, TrainConfig};
use crate::error::{Error, Result};

/// Draws `n` pairs `(better, worse)` with `scores[better] > scores[worse]`,
/// uniformly with replacement. Empty when all scores are equal.
pub fn sample_pairs<R: Rng>(scores: &[f64], n: usize, rng: &mut R) -> Vec<(usize, usize)> {
    let mut valid = Vec::new();
    for (i, si) in scores.iter().enumerate() {
        for (j, sj) in scores.iter().enumerate() {
            if si > sj {
                valid.push((i, j));
            }
        }
    }
    if valid.is_empty() {
        return valid;
    }
    (0..n).map(|_| valid[rng.random_range(0..valid.len())]).collect()
}

fn hinge(margin_scale: f64, gap: f64, e_better: f64, e_worse: f64) -> f64 {
    (margin_scale * gap - (e_worse - e_better)).max(0.0)
}

/// Loss with pairs drawn from an RNG seeded by `cfg.seed`.
pub fn maxmargin_loss(model: &EnergyModel, list: &RankedList, cfg: &TrainConfig) -> Result<f64> {
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let pairs = sample_pairs(&list.scores, cfg.pairs_per_list, &mut rng);
    if pairs.is_empty() {
        return Ok(0.0);
    }
    let mut total = 0.0;
    for &(i, j) in &pairs {
        let ei = model.energy(&list.features[i])?;
        let ej = model.energy(&list.features[j])?;
        total += hinge(cfg.margin_scale, list.scores[i] - list.scores[j], ei, ej);
    }
    Ok(total / pairs.len() as f64)
}

/// Loss and gradient over pairs drawn from `rng`.
pub fn maxmargin_gradient<R: Rng>(
    model: &EnergyModel,
    list: &RankedList,
    cfg: &TrainConfig,
    rng: &mut R,
) -> Result<(f64, Vec<f64>)> {
    let mut grad = vec![0.0; N_PARAMS];
    let loss = accumulate(model, list, cfg, rng, &mut grad)?;
    Ok((loss, grad))
}

pub(crate) fn accumulate<R: Rng>(
    model: &EnergyModel,
    list: &RankedList,
    cfg: &TrainConfig,
    rng: &mut R,
    grad: &mut [f64],
) -> Result<f64> {
    if list.len() < 2 {
        log::warn!("document `{}`: singleton list skipped", list.doc_id);
        return Ok(0.0);
    }
    if list.features.iter().any(|f| !f.is_finite()) {
        return Err(Error::NonFinite(format!("document `{}` features", list.doc_id)));
    }
    let pairs = sample_pairs(&list.scores, cfg.pairs_per_list, rng);
    if pairs.is_empty() {
        return Ok(0.0);
    }
    let w = 1.0 / pairs.len() as f64;
    let mut total = 0.0;
    for &(i, j) in &pairs {
        let fi = model.forward(&list.features[i]);
        let fj = model.forward(&list.features[j]);
        let h = hinge(cfg.margin_scale, list.scores[i] - list.scores[j], fi.energy, fj.energy);
        if h > 0.0 {
            total += h;
            model.backward(&fi, w, grad);
            model.backward(&fj, -w, grad);
        }
    }
    Ok(total * w)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn hinge_substitution() {
        assert!((hinge(1.0, 0.2, 1.0, 1.1) - 0.1).abs() < 1e-12);
        assert_eq!(hinge(1.0, 0.2, 1.0, 1.5), 0.0);
        assert!((hinge(0.0, 0.2, 1.3, 1.0) - 0.3).abs() < 1e-12);
    }

    #[test]
    fn pairs_respect_scores() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let scores = [0.1, 0.5, 0.5, 0.9];
        for (i, j) in sample_pairs(&scores, 50, &mut rng) {
            assert!(scores[i] > scores[j]);
        }
        assert!(sample_pairs(&[0.3, 0.3], 4, &mut rng).is_empty());
    }
}
