use std::collections::HashMap;

use crate::corpus::TokenSeq;

use super::{MetricKind, MetricScore};

fn f1(overlap: usize, cand_total: usize, ref_total: usize) -> f64 {
    if overlap == 0 {
        return 0.0;
    }
    let p = overlap as f64 / cand_total as f64;
    let r = overlap as f64 / ref_total as f64;
    2.0 * p * r / (p + r)
}

/// ROUGE-N F1 with clipped n-gram counts, `n` ∈ {1, 2}.
///
/// Sequences shorter than `n` score 0.
pub fn rouge_n(candidate: &TokenSeq, reference: &TokenSeq, n: usize) -> MetricScore {
    assert!(n == 1 || n == 2, "rouge_n supports n in {{1, 2}}, got {n}");
    let kind = if n == 1 { MetricKind::R1 } else { MetricKind::R2 };
    if candidate.len() < n || reference.len() < n {
        return MetricScore { value: 0.0, kind };
    }
    let mut ref_counts: HashMap<&[String], usize> = HashMap::new();
    for g in reference.windows(n) {
        *ref_counts.entry(g).or_default() += 1;
    }
    let mut overlap = 0;
    for g in candidate.windows(n) {
        if let Some(c) = ref_counts.get_mut(g) {
            if *c > 0 {
                *c -= 1;
                overlap += 1;
            }
        }
    }
    let value = f1(overlap, candidate.len() + 1 - n, reference.len() + 1 - n);
    MetricScore { value, kind }
}

/// Length of the longest common subsequence.
pub fn lcs_len(a: &[String], b: &[String]) -> usize {
    if a.is_empty() || b.is_empty() {
        return 0;
    }
    let mut prev = vec![0usize; b.len() + 1];
    let mut cur = vec![0usize; b.len() + 1];
    for x in a {
        for (j, y) in b.iter().enumerate() {
            cur[j + 1] = if x == y {
                prev[j] + 1
            } else {
                cur[j].max(prev[j + 1])
            };
        }
        std::mem::swap(&mut prev, &mut cur);
    }
    prev[b.len()]
}

/// ROUGE-L F1 from the LCS length.
pub fn rouge_l(candidate: &TokenSeq, reference: &TokenSeq) -> MetricScore {
    let lcs = lcs_len(candidate, reference);
    MetricScore {
        value: f1(lcs, candidate.len(), reference.len()),
        kind: MetricKind::RL,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn t(s: &str) -> TokenSeq {
        TokenSeq::from_words(s)
    }

    #[test]
    fn rouge_n_examples() {
        assert_eq!(rouge_n(&t("a b c"), &t("a b c"), 1).value, 1.0);
        // bigrams {ab, bc} vs {ab, bd}: overlap 1, P = R = 1/2
        assert!((rouge_n(&t("a b c"), &t("a b d"), 2).value - 0.5).abs() < 1e-12);
        assert_eq!(rouge_n(&t(""), &t("a b"), 1).value, 0.0);
        assert_eq!(rouge_n(&t("a"), &t("a b"), 2).value, 0.0);
        // clipping: candidate "a a a" vs reference "a b": overlap 1, P = 1/3, R = 1/2
        assert!((rouge_n(&t("a a a"), &t("a b"), 1).value - 0.4).abs() < 1e-12);
    }

    #[test]
    fn rouge_l_examples() {
        assert_eq!(rouge_l(&t("x y z"), &t("x y z")).value, 1.0);
        let v = rouge_l(&t("the cat sat on mat"), &t("the cat on the mat")).value;
        assert!((v - 0.8).abs() < 1e-12);
        assert_eq!(rouge_l(&t("a b"), &t("c d")).value, 0.0);
        assert_eq!(rouge_l(&t(""), &t("c d")).value, 0.0);
    }
}
