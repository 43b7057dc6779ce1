//! ListMLE: negative log Plackett-Luce likelihood of the target order.

use super::model::{EnergyModel, N_PARAMS};
use super::RankedList;
use crate::error::{Error, Result};

fn check_tau(tau: f64) -> Result<()> {
    if tau > 0.0 && tau.is_finite() {
        Ok(())
    } else {
        Err(Error::invalid(format!("tau must be positive, got {tau}")))
    }
}

/// `log(Σ exp(s_j))` for every suffix `s[i..]`.
fn suffix_logsumexp(s: &[f64]) -> Vec<f64> {
    let k = s.len();
    let mut out = vec![0.0; k];
    let mut acc = f64::NEG_INFINITY;
    for i in (0..k).rev() {
        let m = acc.max(s[i]);
        acc = m + ((acc - m).exp() + (s[i] - m).exp()).ln();
        out[i] = acc;
    }
    out
}

/// Log-probability that the candidates are drawn in the given order,
/// with energies listed best-first.
pub fn log_permutation_likelihood(energies: &[f64], tau: f64) -> Result<f64> {
    check_tau(tau)?;
    if energies.is_empty() {
        return Err(Error::invalid("permutation likelihood of an empty list"));
    }
    if energies.iter().any(|e| !e.is_finite()) {
        return Err(Error::NonFinite("energy".into()));
    }
    let s: Vec<f64> = energies.iter().map(|e| -e / tau).collect();
    let lse = suffix_logsumexp(&s);
    Ok(s.iter().zip(&lse).map(|(si, li)| si - li).sum())
}

pub fn permutation_likelihood(energies: &[f64], tau: f64) -> Result<f64> {
    log_permutation_likelihood(energies, tau).map(f64::exp)
}

fn target_energies(model: &EnergyModel, list: &RankedList) -> Result<Vec<f64>> {
    list.target_order
        .iter()
        .map(|&i| model.energy(&list.features[i]))
        .collect()
}

/// Returns 0 (with a warning) for lists with fewer than two candidates.
pub fn listmle_loss(model: &EnergyModel, list: &RankedList, tau: f64) -> Result<f64> {
    check_tau(tau)?;
    if list.len() < 2 {
        log::warn!("document `{}`: singleton list skipped", list.doc_id);
        return Ok(0.0);
    }
    let e = target_energies(model, list)?;
    Ok(-log_permutation_likelihood(&e, tau)?)
}

/// Loss and its gradient with respect to the flat model parameters.
pub fn listmle_gradient(model: &EnergyModel, list: &RankedList, tau: f64) -> Result<(f64, Vec<f64>)> {
    let mut grad = vec![0.0; N_PARAMS];
    let loss = accumulate(model, list, tau, &mut grad)?;
    Ok((loss, grad))
}

/// Adds the gradient of one list into `grad` and returns its loss.
pub(crate) fn accumulate(
    model: &EnergyModel,
    list: &RankedList,
    tau: f64,
    grad: &mut [f64],
) -> Result<f64> {
    check_tau(tau)?;
    if list.len() < 2 {
        log::warn!("document `{}`: singleton list skipped", list.doc_id);
        return Ok(0.0);
    }
    let mut fws = Vec::with_capacity(list.len());
    for &i in &list.target_order {
        let f = &list.features[i];
        if !f.is_finite() {
            return Err(Error::NonFinite(format!("document `{}` features", list.doc_id)));
        }
        fws.push(model.forward(f));
    }
    let s: Vec<f64> = fws.iter().map(|f| -f.energy / tau).collect();
    let lse = suffix_logsumexp(&s);
    let loss: f64 = lse.iter().zip(&s).map(|(l, si)| l - si).sum();

    // dL/ds_j = -1 + Σ_{i ≤ j} softmax over suffix i, evaluated at j
    for (j, fw) in fws.iter().enumerate() {
        let p: f64 = lse[..=j].iter().map(|li| (s[j] - li).exp()).sum();
        let d_s = p - 1.0;
        model.backward(fw, -d_s / tau, grad);
    }
    Ok(loss)
}
