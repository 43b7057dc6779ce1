use std::cmp::Ordering;

use crate::corpus::TokenSeq;
use crate::error::Result;

use super::lm::{ConditionalLM, DecodeContext, TokenId, EOS};
use super::{GenConfig, Hypothesis};

#[derive(Debug, Clone)]
struct Beam {
    ids: Vec<TokenId>,
    logprob: f64,
}

#[derive(Debug, Clone)]
struct Finished {
    ids: Vec<TokenId>,
    logprob: f64,
    finished: bool,
}

#[derive(Debug, Clone, Copy)]
struct Expansion {
    parent: usize,
    token: TokenId,
    logprob: f64,
}

/// Plain length-bounded beam search. `cfg.groups` and
/// `cfg.diversity_weight` are ignored.
pub fn beam_search(lm: &ConditionalLM, x: &TokenSeq, cfg: &GenConfig) -> Result<Vec<Hypothesis>> {
    cfg.validate()?;
    let ctx = lm.context(x)?;
    Ok(run(&ctx, cfg.beams, 1, 0.0, cfg.max_len, cfg.k))
}

/// Group-wise diverse beam search.
///
/// At every step the live beams are expanded once; the groups then pick
/// their `beams / groups` continuations in turn from that shared pool,
/// scoring each expansion as its log-probability minus `diversity_weight`
/// times the number of times its token was already picked at this step by
/// earlier groups. With a zero weight the groups partition exactly the
/// selection plain beam search makes.
pub fn diverse_beam_search(
    lm: &ConditionalLM,
    x: &TokenSeq,
    cfg: &GenConfig,
) -> Result<Vec<Hypothesis>> {
    cfg.validate()?;
    let ctx = lm.context(x)?;
    Ok(run(
        &ctx,
        cfg.beams,
        cfg.groups,
        cfg.diversity_weight,
        cfg.max_len,
        cfg.k,
    ))
}

/// Picks the most likely next token until EOS or `max_len`.
pub fn greedy_decode(lm: &ConditionalLM, x: &TokenSeq, max_len: usize) -> Result<Hypothesis> {
    let ctx = lm.context(x)?;
    let mut ids = Vec::new();
    let mut logprob = 0.0;
    while ids.len() < max_len {
        let dist = ctx.next_token_dist(&ids);
        let mut best: Option<(TokenId, f64)> = None;
        for (id, &p) in dist.iter().enumerate().skip(1) {
            let id = id as TokenId;
            if p <= 0.0 || (id == EOS && ids.is_empty()) {
                continue;
            }
            let better = match best {
                None => true,
                Some((b, bp)) => {
                    p > bp || (p == bp && cmp_seq(&ctx, &ids, id, &ids, b) == Ordering::Less)
                }
            };
            if better {
                best = Some((id, p));
            }
        }
        let (id, p) = best.expect("smoothing keeps every vocabulary token reachable");
        logprob += p.ln();
        if id == EOS {
            return Ok(Hypothesis {
                tokens: ctx.decode(&ids),
                logprob,
                finished: true,
            });
        }
        ids.push(id);
    }
    Ok(Hypothesis {
        tokens: ctx.decode(&ids),
        logprob,
        finished: false,
    })
}

/// Lexicographic order of `a ++ [ta]` vs `b ++ [tb]` on token strings; EOS
/// sorts before every real token.
fn cmp_seq(ctx: &DecodeContext<'_>, a: &[TokenId], ta: TokenId, b: &[TokenId], tb: TokenId) -> Ordering {
    let key = |id: TokenId| if id == EOS { "" } else { ctx.token_str(id) };
    let left = a.iter().copied().chain(std::iter::once(ta)).map(key);
    let right = b.iter().copied().chain(std::iter::once(tb)).map(key);
    left.cmp(right)
}

fn cmp_finished(ctx: &DecodeContext<'_>, a: &Finished, b: &Finished) -> Ordering {
    b.logprob.total_cmp(&a.logprob).then_with(|| {
        let key = |id: &TokenId| ctx.token_str(*id);
        a.ids.iter().map(key).cmp(b.ids.iter().map(key))
    })
}

fn run(
    ctx: &DecodeContext<'_>,
    beams: usize,
    groups: usize,
    diversity: f64,
    max_len: usize,
    k: usize,
) -> Vec<Hypothesis> {
    let group_size = beams / groups;
    let mut live = vec![Beam {
        ids: Vec::new(),
        logprob: 0.0,
    }];
    let mut pool: Vec<Finished> = Vec::new();

    for step in 0..max_len {
        let mut expansions = Vec::with_capacity(live.len() * ctx.dist_len());
        for (parent, beam) in live.iter().enumerate() {
            let dist = ctx.next_token_dist(&beam.ids);
            for (id, &p) in dist.iter().enumerate().skip(1) {
                let token = id as TokenId;
                // No empty summaries.
                if p <= 0.0 || (token == EOS && step == 0) {
                    continue;
                }
                expansions.push(Expansion {
                    parent,
                    token,
                    logprob: beam.logprob + p.ln(),
                });
            }
        }

        let mut taken = vec![false; expansions.len()];
        let mut picked_tokens: Vec<TokenId> = Vec::new();
        let mut next_live: Vec<Beam> = Vec::with_capacity(beams);
        for _ in 0..groups {
            let penalty = |e: &Expansion| {
                let n = picked_tokens.iter().filter(|&&t| t == e.token).count();
                e.logprob - diversity * n as f64
            };
            let mut scored: Vec<(f64, usize)> = expansions
                .iter()
                .enumerate()
                .filter(|(i, _)| !taken[*i])
                .map(|(i, e)| (penalty(e), i))
                .collect();
            let cmp = |a: &(f64, usize), b: &(f64, usize)| {
                b.0.total_cmp(&a.0).then_with(|| {
                    let (ea, eb) = (&expansions[a.1], &expansions[b.1]);
                    cmp_seq(ctx, &live[ea.parent].ids, ea.token, &live[eb.parent].ids, eb.token)
                })
            };
            // A group stops after `group_size` live picks; at most one EOS per
            // parent can be walked past before that.
            let horizon = (group_size + live.len()).min(scored.len());
            if horizon < scored.len() && horizon > 0 {
                scored.select_nth_unstable_by(horizon - 1, cmp);
                scored.truncate(horizon);
            }
            scored.sort_by(cmp);

            let mut filled = 0;
            let mut group_tokens = Vec::new();
            for &(_, i) in &scored {
                if filled == group_size {
                    break;
                }
                taken[i] = true;
                let e = expansions[i];
                group_tokens.push(e.token);
                let mut ids = live[e.parent].ids.clone();
                if e.token == EOS {
                    pool.push(Finished {
                        ids,
                        logprob: e.logprob,
                        finished: true,
                    });
                } else {
                    ids.push(e.token);
                    next_live.push(Beam {
                        ids,
                        logprob: e.logprob,
                    });
                    filled += 1;
                }
            }
            picked_tokens.extend(group_tokens);
        }
        live = next_live;
        if live.is_empty() {
            break;
        }

        // Log-probabilities only decrease, so once the best live beam falls
        // strictly below the k-th finished hypothesis nothing can change.
        if pool.len() >= k {
            pool.sort_by(|a, b| cmp_finished(ctx, a, b));
            let kth = pool[k - 1].logprob;
            let best_live = live.iter().map(|b| b.logprob).fold(f64::NEG_INFINITY, f64::max);
            if best_live < kth {
                live.clear();
                break;
            }
        }
    }

    pool.extend(live.into_iter().map(|b| Finished {
        ids: b.ids,
        logprob: b.logprob,
        finished: false,
    }));
    pool.sort_by(|a, b| cmp_finished(ctx, a, b));
    pool.dedup_by(|a, b| a.ids == b.ids);
    pool.truncate(k);
    pool.into_iter()
        .map(|f| Hypothesis {
            tokens: ctx.decode(&f.ids),
            logprob: f.logprob,
            finished: f.finished,
        })
        .collect()
}
