use std::collections::HashMap;

use ebrank_core::corpus::make_synthetic_corpus;
use ebrank_core::metrics::{align, consistency, relevance, rouge_l, rouge_n, score};
use ebrank_core::{AlignerKind, MetricKind, TokenSeq};
use proptest::prelude::*;

fn seq(s: &str) -> TokenSeq {
    TokenSeq::from_words(s)
}

fn f1(overlap: f64, c: f64, r: f64) -> f64 {
    if overlap == 0.0 {
        return 0.0;
    }
    let (p, rc) = (overlap / c, overlap / r);
    2.0 * p * rc / (p + rc)
}

/// Clipped n-gram overlap F1 from explicit multisets.
fn rouge_n_oracle(c: &[String], r: &[String], n: usize) -> f64 {
    if c.len() < n || r.len() < n {
        return 0.0;
    }
    let grams = |s: &[String]| {
        let mut m: HashMap<Vec<String>, usize> = HashMap::new();
        for w in s.windows(n) {
            *m.entry(w.to_vec()).or_default() += 1;
        }
        m
    };
    let (gc, gr) = (grams(c), grams(r));
    let overlap: usize = gc.iter().map(|(g, k)| (*k).min(*gr.get(g).unwrap_or(&0))).sum();
    f1(overlap as f64, (c.len() + 1 - n) as f64, (r.len() + 1 - n) as f64)
}

fn is_subsequence(a: &[&String], b: &[String]) -> bool {
    let mut it = b.iter();
    a.iter().all(|t| it.any(|u| u == *t))
}

/// LCS by trying every subset of the candidate.
fn lcs_brute(c: &[String], r: &[String]) -> usize {
    let mut best = 0;
    for mask in 0u32..(1 << c.len()) {
        let sub: Vec<&String> = (0..c.len()).filter(|i| mask >> i & 1 == 1).map(|i| &c[i]).collect();
        if sub.len() > best && is_subsequence(&sub, r) {
            best = sub.len();
        }
    }
    best
}

#[test]
fn rouge_examples() {
    assert_eq!(rouge_n(&seq("a b c"), &seq("a b c"), 1).value, 1.0);
    let v = rouge_n(&seq("a b c"), &seq("a b d"), 2).value;
    assert!((v - rouge_n_oracle(seq("a b c").tokens(), seq("a b d").tokens(), 2)).abs() < 1e-15);
    assert!((v - 0.5).abs() < 1e-15);
    assert_eq!(rouge_n(&seq(""), &seq("a b"), 1).value, 0.0);

    let c = seq("the cat sat on mat");
    let r = seq("the cat on the mat");
    assert_eq!(lcs_brute(c.tokens(), r.tokens()), 4);
    assert!((rouge_l(&c, &r).value - 0.8).abs() < 1e-15);
    assert_eq!(rouge_l(&seq("a b"), &seq("a b")).value, 1.0);
    assert_eq!(rouge_l(&seq("a b"), &seq("c d")).value, 0.0);
}

#[test]
fn alignment_examples() {
    assert_eq!(align(&seq("x y"), &seq("x z"), AlignerKind::Exact), vec![1.0, 0.0]);
    assert_eq!(align(&seq("running"), &seq("running"), AlignerKind::SoftChar), vec![1.0]);
    assert!(align(&seq(""), &seq("a"), AlignerKind::SoftChar).is_empty());
    let x = seq("a b c d");
    assert!((consistency(&x, &seq("a b zz c"), AlignerKind::Exact).value - 0.75).abs() < 1e-15);
    assert_eq!(consistency(&x, &seq("a zz"), AlignerKind::Exact).value, 0.5);
    assert_eq!(relevance(&x, &seq("b c"), &seq("b c"), AlignerKind::Exact).value, 1.0);
    assert_eq!(relevance(&x, &seq("b c"), &seq("q r"), AlignerKind::Exact).value, 0.0);
    // 0.75 * 0.5
    let v = relevance(&x, &seq("a q"), &seq("a b zz c"), AlignerKind::Exact).value;
    assert!((v - 0.375).abs() < 1e-15);
}

#[test]
fn cons_plus_rel_is_a_sum() {
    let x = seq("a b c d e");
    let y = seq("a b q");
    let c = seq("a b c zz");
    let cons = consistency(&x, &c, AlignerKind::Exact).value;
    let rel = relevance(&x, &y, &c, AlignerKind::Exact).value;
    let both = score(MetricKind::ConsPlusRel, &x, Some(&y), &c, AlignerKind::Exact).unwrap().value;
    assert!((both - (cons + rel)).abs() < 1e-15);
    assert!(score(MetricKind::Consistency, &x, None, &c, AlignerKind::Exact).is_ok());
    assert!(score(MetricKind::RL, &x, None, &c, AlignerKind::Exact).is_err());
}

#[test]
fn synthetic_references_are_fully_grounded() {
    let corpus = make_synthetic_corpus(600, 7);
    for d in corpus.iter() {
        // "and" only joins two facts; it is template, not content.
        let content = TokenSeq::new(d.reference.tokens().iter().filter(|t| *t != "and").cloned());
        let c = consistency(&d.source, &content, AlignerKind::Exact).value;
        assert_eq!(c, 1.0, "{}: {}", d.id, d.reference);
    }
}

fn token_seq(max: usize) -> impl Strategy<Value = TokenSeq> {
    prop::collection::vec(prop::sample::select(vec!["a", "b", "c", "dd", "eeee", "eeef", "run", "running", "."]), 0..max)
        .prop_map(TokenSeq::new)
}

fn aligner() -> impl Strategy<Value = AlignerKind> {
    prop_oneof![Just(AlignerKind::Exact), Just(AlignerKind::SoftChar)]
}

proptest! {
    #[test]
    fn scores_within_declared_ranges(x in token_seq(12), y in token_seq(8), c in token_seq(8), al in aligner()) {
        prop_assume!(!x.is_empty());
        for kind in MetricKind::ALL {
            let v = score(kind, &x, Some(&y), &c, al).unwrap().value;
            let hi = if kind == MetricKind::ConsPlusRel { 2.0 } else { 1.0 };
            prop_assert!((0.0..=hi).contains(&v), "{:?} {}", kind, v);
        }
        for v in align(&c, &x, al) {
            prop_assert!((0.0..=1.0).contains(&v));
        }
        prop_assert_eq!(align(&c, &x, al).len(), c.len());
    }

    #[test]
    fn rouge_matches_oracles(c in token_seq(8), r in token_seq(8)) {
        for n in [1, 2] {
            let want = rouge_n_oracle(c.tokens(), r.tokens(), n);
            prop_assert!((rouge_n(&c, &r, n).value - want).abs() < 1e-12);
        }
        let lcs = lcs_brute(c.tokens(), r.tokens()) as f64;
        let want = if c.is_empty() || r.is_empty() { 0.0 } else { f1(lcs, c.len() as f64, r.len() as f64) };
        prop_assert!((rouge_l(&c, &r).value - want).abs() < 1e-12);
    }

    #[test]
    fn rouge_is_symmetric(c in token_seq(10), r in token_seq(10)) {
        for n in [1, 2] {
            prop_assert!((rouge_n(&c, &r, n).value - rouge_n(&r, &c, n).value).abs() < 1e-12);
        }
        prop_assert!((rouge_l(&c, &r).value - rouge_l(&r, &c).value).abs() < 1e-12);
    }

    #[test]
    fn relevance_bounded_by_consistency(x in token_seq(12), y in token_seq(8), c in token_seq(8), al in aligner()) {
        let cons = consistency(&x, &c, al).value;
        prop_assert!(relevance(&x, &y, &c, al).value <= cons + 1e-15);
    }

    #[test]
    fn contained_candidates_are_consistent(x in token_seq(12), picks in prop::collection::vec(0usize..100, 1..6)) {
        prop_assume!(!x.is_empty());
        let c = TokenSeq::new(picks.iter().map(|i| x.tokens()[i % x.len()].clone()));
        prop_assert_eq!(consistency(&x, &c, AlignerKind::Exact).value, 1.0);
    }

    #[test]
    fn appending_absent_token_never_helps(x in token_seq(12), c in token_seq(8)) {
        let before = consistency(&x, &c, AlignerKind::Exact).value;
        let mut t = c.tokens().to_vec();
        t.push("zzz".into());
        let after = consistency(&x, &TokenSeq::new(t), AlignerKind::Exact).value;
        prop_assert!(after <= before);
    }
}
