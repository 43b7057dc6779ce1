//! Paired sign-flip permutation test and Kendall's τ-b.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Largest sample size that is tested by full enumeration.
pub const EXACT_LIMIT: usize = 20;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SignificanceResult {
    pub p_value: f64,
    pub significant: bool,
    pub alpha: f64,
    /// Sign assignments evaluated (all `2^n` when exact).
    pub n_resamples: u64,
    pub exact: bool,
}

struct Prepared {
    d: Vec<f64>,
    observed: f64,
    tol: f64,
}

impl Prepared {
    fn new(a: &[f64], b: &[f64], alpha: f64) -> Result<Self> {
        if a.len() != b.len() {
            return Err(Error::invalid(format!(
                "paired samples differ in length: {} vs {}",
                a.len(),
                b.len()
            )));
        }
        if a.len() < 2 {
            return Err(Error::invalid("permutation test needs at least two pairs"));
        }
        if !(alpha > 0.0 && alpha < 1.0) {
            return Err(Error::invalid(format!("alpha must lie in (0, 1), got {alpha}")));
        }
        let d: Vec<f64> = a.iter().zip(b).map(|(x, y)| x - y).collect();
        if d.iter().any(|v| !v.is_finite()) {
            return Err(Error::NonFinite("paired score".into()));
        }
        let observed = d.iter().sum::<f64>().abs();
        // Sums of the same terms in different sign patterns can differ by
        // rounding alone.
        let tol = 1e-9 * d.iter().map(|v| v.abs()).sum::<f64>().max(f64::MIN_POSITIVE);
        Ok(Prepared { d, observed, tol })
    }

    fn extreme(&self, s: f64) -> bool {
        s.abs() >= self.observed - self.tol
    }
}

fn result(p_value: f64, alpha: f64, n_resamples: u64, exact: bool) -> SignificanceResult {
    SignificanceResult {
        p_value,
        significant: p_value < alpha,
        alpha,
        n_resamples,
        exact,
    }
}

/// Two-sided paired test of `mean(a) == mean(b)` using sign flips of the
/// per-item differences. Enumerates all `2^n` flips when
/// `n <= EXACT_LIMIT`, otherwise draws `n_resamples` of them.
pub fn permutation_test(
    a: &[f64],
    b: &[f64],
    n_resamples: u64,
    alpha: f64,
    seed: u64,
) -> Result<SignificanceResult> {
    if a.len() <= EXACT_LIMIT {
        permutation_test_exact(a, b, alpha)
    } else {
        permutation_test_resampled(a, b, n_resamples, alpha, seed)
    }
}

/// Full enumeration; `p` is the fraction of sign patterns at least as
/// extreme as the observed one.
pub fn permutation_test_exact(a: &[f64], b: &[f64], alpha: f64) -> Result<SignificanceResult> {
    let p = Prepared::new(a, b, alpha)?;
    let n = p.d.len();
    if n > EXACT_LIMIT {
        return Err(Error::invalid(format!(
            "exact test limited to {EXACT_LIMIT} pairs, got {n}"
        )));
    }
    let total = 1u64 << n;
    let mut count = 0u64;
    for mask in 0..total {
        let s: f64 = p
            .d
            .iter()
            .enumerate()
            .map(|(i, v)| if mask >> i & 1 == 1 { -v } else { *v })
            .sum();
        if p.extreme(s) {
            count += 1;
        }
    }
    Ok(result(count as f64 / total as f64, alpha, total, true))
}

/// Seeded random sign flips with add-one smoothing,
/// `p = (c + 1) / (n_resamples + 1)`.
pub fn permutation_test_resampled(
    a: &[f64],
    b: &[f64],
    n_resamples: u64,
    alpha: f64,
    seed: u64,
) -> Result<SignificanceResult> {
    let p = Prepared::new(a, b, alpha)?;
    if n_resamples == 0 {
        return Err(Error::invalid("n_resamples must be positive"));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut count = 0u64;
    for _ in 0..n_resamples {
        let s: f64 = p
            .d
            .iter()
            .map(|v| if rng.random::<bool>() { -v } else { *v })
            .sum();
        if p.extreme(s) {
            count += 1;
        }
    }
    Ok(result(
        (count + 1) as f64 / (n_resamples + 1) as f64,
        alpha,
        n_resamples,
        false,
    ))
}

/// Kendall's τ-b between two score lists; `None` when either list is
/// constant (or shorter than two).
pub fn kendall_tau(a: &[f64], b: &[f64]) -> Option<f64> {
    if a.len() != b.len() || a.len() < 2 {
        return None;
    }
    let (mut conc, mut disc, mut ties_a, mut ties_b) = (0i64, 0i64, 0i64, 0i64);
    for i in 0..a.len() {
        for j in i + 1..a.len() {
            let da = a[i] - a[j];
            let db = b[i] - b[j];
            if da == 0.0 && db == 0.0 {
                continue;
            } else if da == 0.0 {
                ties_a += 1;
            } else if db == 0.0 {
                ties_b += 1;
            } else if (da > 0.0) == (db > 0.0) {
                conc += 1;
            } else {
                disc += 1;
            }
        }
    }
    let n0 = (conc + disc + ties_a) as f64;
    let n1 = (conc + disc + ties_b) as f64;
    if n0 == 0.0 || n1 == 0.0 {
        return None;
    }
    Some((conc - disc) as f64 / (n0 * n1).sqrt())
}
