//! Normalized discounted cumulative gain for model selection.

use crate::error::{Error, Result};

fn dcg(order: impl Iterator<Item = f64>) -> f64 {
    order
        .enumerate()
        .map(|(pos, g)| g / (pos as f64 + 2.0).log2())
        .sum()
}

/// NDCG of `predicted_order` (best-first candidate indices) with raw gains.
/// Returns 1 when every gain is zero.
pub fn ndcg(predicted_order: &[usize], gains: &[f64]) -> Result<f64> {
    let k = gains.len();
    if predicted_order.len() != k {
        return Err(Error::invalid("predicted order length differs from gains"));
    }
    let mut seen = vec![false; k];
    for &i in predicted_order {
        if i >= k || seen[i] {
            return Err(Error::invalid("predicted order is not a permutation"));
        }
        seen[i] = true;
    }
    if let Some(g) = gains.iter().find(|g| !(**g >= 0.0) || !g.is_finite()) {
        return Err(Error::invalid(format!("gains must be finite and non-negative, got {g}")));
    }
    let mut ideal = gains.to_vec();
    ideal.sort_by(|a, b| b.total_cmp(a));
    let idcg = dcg(ideal.into_iter());
    if idcg == 0.0 {
        return Ok(1.0);
    }
    let v = dcg(predicted_order.iter().map(|&i| gains[i])) / idcg;
    Ok(v.min(1.0))
}
