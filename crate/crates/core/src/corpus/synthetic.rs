//! Templated news-like corpus with known ground truth.
//!
//! Every document is about one main entity. The source states two or three
//! facts about it, repeats the lead fact's entity and place in a follow-up
//! sentence, and mixes in one to three distractor facts about other
//! entities. The reference renders a compressed version of the first one or
//! two facts, so every reference token occurs in the source. Pools are much
//! larger than a single document, which lets a generator hallucinate tokens
//! that are absent from a given source.

use rand::seq::{IndexedRandom, SliceRandom};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::{Corpus, Document, TokenSeq};

const ENTITIES: &[&str] = &[
    "alvarez", "bennett", "castillo", "dorsey", "eriksen", "fontaine", "garrido", "halvorsen", "ibarra", "jansen", "kowalski", "lindqvist", "moreau", "nakamura", "okafor", "petrov",
];

const VERBS: &[&str] = &[
    "opened", "closed", "sold", "bought", "built", "inspected", "funded", "announced",
];

const OBJECTS: &[&str] = &[
    "factory", "bridge", "school", "hospital", "stadium", "library", "harbor", "museum", "warehouse", "clinic", "tunnel", "theater",
];

const PLACES: &[&str] = &[
    "lisbon", "oslo", "nairobi", "lima", "kyoto", "dublin", "quito", "porto", "gdansk", "tunis", "hanoi", "perth", "bergen", "cusco", "malmo", "leeds",
];

const NUMBERS: &[&str] = &[
    "two", "three", "four", "five", "six", "seven", "eight", "nine",
];

const DAYS: &[&str] = &[
    "monday", "tuesday", "wednesday", "thursday", "friday", "saturday", "sunday",
];

#[derive(Debug, Clone, Copy)]
struct Fact {
    entity: &'static str,
    verb: &'static str,
    number: &'static str,
    object: &'static str,
    place: &'static str,
    day: &'static str,
}

impl Fact {
    fn source_sentence(&self, style: usize) -> String {
        let Fact {
            entity: e,
            verb: v,
            number: n,
            object: o,
            place: p,
            day: d,
        } = *self;
        match style % 3 {
            0 => format!("{e} {v} {n} {o} in {p} on {d} ."),
            1 => format!("on {d} , {e} {v} {n} {o} in {p} ."),
            _ => format!("officials said {e} {v} {n} {o} in {p} last {d} ."),
        }
    }

    fn reference_sentence(&self) -> String {
        format!(
            "{} {} {} {} in {}",
            self.entity, self.verb, self.number, self.object, self.place
        )
    }
}

fn pick(rng: &mut ChaCha8Rng, pool: &[&'static str]) -> &'static str {
    pool.choose(rng).copied().expect("non-empty pool")
}

fn pick_other(rng: &mut ChaCha8Rng, pool: &[&'static str], avoid: &[&str]) -> &'static str {
    loop {
        let w = pick(rng, pool);
        if !avoid.contains(&w) {
            return w;
        }
    }
}

fn render_doc(rng: &mut ChaCha8Rng) -> (Vec<String>, String) {
    let entity = pick(rng, ENTITIES);
    let n_key = rng.random_range(2..=3usize);
    let mut facts: Vec<Fact> = Vec::with_capacity(n_key);
    let mut used_places = Vec::new();
    let mut used_objects = Vec::new();
    for _ in 0..n_key {
        let place = pick_other(rng, PLACES, &used_places);
        let object = pick_other(rng, OBJECTS, &used_objects);
        used_places.push(place);
        used_objects.push(object);
        facts.push(Fact {
            entity,
            verb: pick(rng, VERBS),
            number: pick(rng, NUMBERS),
            object,
            place,
            day: pick(rng, DAYS),
        });
    }

    let n_distract = rng.random_range(1..=3usize);
    let mut distractors = Vec::with_capacity(n_distract);
    for _ in 0..n_distract {
        let place = pick_other(rng, PLACES, &used_places);
        let object = pick_other(rng, OBJECTS, &used_objects);
        used_places.push(place);
        used_objects.push(object);
        distractors.push(Fact {
            entity: pick_other(rng, ENTITIES, &[entity]),
            verb: pick(rng, VERBS),
            number: pick(rng, NUMBERS),
            object,
            place,
            day: pick(rng, DAYS),
        });
    }

    let lead = facts[0];
    let mut body: Vec<String> = Vec::new();
    for f in &facts[1..] {
        body.push(f.source_sentence(rng.random_range(0..3)));
    }
    for f in &distractors {
        body.push(f.source_sentence(rng.random_range(0..3)));
    }
    body.push(format!(
        "the {} in {} was praised by {} .",
        lead.object, lead.place, lead.entity
    ));
    body.shuffle(rng);

    let mut sentences = vec![lead.source_sentence(rng.random_range(0..3))];
    sentences.extend(body);

    let n_ref = if facts.len() > 1 && rng.random_bool(0.2) { 2 } else { 1 };
    let reference = facts[..n_ref]
        .iter()
        .map(Fact::reference_sentence)
        .collect::<Vec<_>>()
        .join(" and ");
    (sentences, reference)
}

/// Generates `n_docs` documents deterministically from `seed`.
///
/// Sources have 4–8 sentences (1–3 of them distractors); references have
/// 1–2 sentences.
pub fn make_synthetic_corpus(n_docs: usize, seed: u64) -> Corpus {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let width = n_docs.to_string().len();
    let docs = (0..n_docs)
        .map(|i| {
            let (sentences, reference) = render_doc(&mut rng);
            let source = TokenSeq::from_words(&sentences.join(" "));
            let reference = TokenSeq::from_words(&reference);
            Document::new(format!("syn-{seed}-{i:0width$}"), source, reference)
                .expect("templates never render empty text")
        })
        .collect();
    Corpus::new(format!("synthetic-{seed}"), docs).expect("ids are unique by construction")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::corpus::tokenize;

    #[test]
    fn deterministic_in_seed() {
        let a = make_synthetic_corpus(600, 7);
        let b = make_synthetic_corpus(600, 7);
        assert_eq!(a.to_jsonl(), b.to_jsonl());
        let c = make_synthetic_corpus(600, 8);
        assert_ne!(a.to_jsonl(), c.to_jsonl());
    }

    #[test]
    fn single_document() {
        assert_eq!(make_synthetic_corpus(1, 3).len(), 1);
    }

    #[test]
    fn sentence_counts_in_range() {
        for d in make_synthetic_corpus(200, 1).iter() {
            let src = d.source.iter().filter(|t| *t == ".").count();
            let rf = d.reference.iter().filter(|t| *t == "and").count() + 1;
            assert!(!d.reference.contains(&".".to_string()));
            assert!((4..=8).contains(&src), "{src} sentences in {}", d.id);
            assert!((1..=2).contains(&rf), "{rf} reference facts in {}", d.id);
        }
    }

    #[test]
    fn rendered_text_survives_tokenizer() {
        for d in make_synthetic_corpus(50, 5).iter() {
            assert_eq!(tokenize(&d.source.to_string()), d.source);
            assert_eq!(tokenize(&d.reference.to_string()), d.reference);
        }
    }

    #[test]
    fn pools_exceed_any_single_source() {
        // Hallucination needs entities and places that are absent from a source.
        let c = make_synthetic_corpus(20, 9);
        for d in c.iter() {
            let missing = ENTITIES.iter().filter(|e| !d.source.contains(&e.to_string())).count();
            assert!(missing > 8);
        }
    }
}
