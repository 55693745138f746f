use std::sync::Arc;

use proptest::prelude::*;

use flors_core::corpus::{Corpus, Sentence, Token};
use flors_core::features::{build_representations, RepresentationConfig};
use flors_core::pipeline::{train_model, Tagger};
use flors_core::synth::{generate, SyntheticCorpora, SyntheticShiftConfig};
use flors_core::{Error, LogPolicy, Mode, TrainConfig};

fn corpora(seed: u64) -> SyntheticCorpora {
    generate(&SyntheticShiftConfig {
        tags: 6,
        source_vocab: 150,
        target_vocab: 150,
        source_sentences: 80,
        target_sentences: 30,
        seed,
        ..SyntheticShiftConfig::default()
    })
    .unwrap()
}

fn rep() -> RepresentationConfig {
    RepresentationConfig {
        n: 40,
        suffix_min_count: 3,
    }
}

fn quick() -> TrainConfig {
    TrainConfig {
        max_epochs: 4,
        ..TrainConfig::default()
    }
}

fn tagger(c: &SyntheticCorpora) -> Tagger {
    Tagger::build(&c.source, &[&c.source], rep(), &quick()).unwrap().0
}

fn rename(corpus: &Corpus, f: impl Fn(&str) -> String) -> Corpus {
    let sentences = corpus
        .sentences()
        .iter()
        .map(|s| {
            Sentence::new(
                s.tokens()
                    .iter()
                    .map(|t| Token::tagged(t.surface.clone(), f(t.gold_tag.as_deref().unwrap())))
                    .collect(),
            )
            .unwrap()
        })
        .collect();
    Corpus::new(sentences, true).unwrap()
}

#[test]
fn retraining_under_label_permutation_permutes_the_model() {
    let c = corpora(3);
    // T00..T05 -> Z05..Z00 reverses the lexicographic tag order.
    let flipped = rename(&c.source, |t| format!("Z{:02}", 5 - t[1..].parse::<usize>().unwrap()));
    let (lex, store) = build_representations(&[&c.source], rep()).unwrap();
    let (m1, _) = train_model(&c.source, &lex, &store, &quick()).unwrap();
    let (m2, _) = train_model(&flipped, &lex, &store, &quick()).unwrap();
    assert_eq!(m2.tags().tags()[0], "Z00");
    for (i, tag) in m1.tags().tags().iter().enumerate() {
        let other = format!("Z{:02}", 5 - tag[1..].parse::<usize>().unwrap());
        let j = m2.tags().index_of(&other).unwrap();
        let bits = |w: &[f64]| w.iter().map(|v| v.to_bits()).collect::<Vec<_>>();
        assert_eq!(bits(m1.weights(i)), bits(m2.weights(j)), "tag {tag}");
        assert_eq!(m1.bias(i).to_bits(), m2.bias(j).to_bits());
    }
}

#[test]
fn batch_session_misuse_is_rejected() {
    let c = corpora(1);
    let t = tagger(&c);
    let test = c.target.unlabeled();
    let s0 = &test.sentences()[0];

    let mut unprepared = t.session(Mode::Batch).unwrap();
    assert!(matches!(unprepared.tag_sentence(s0), Err(Error::Session(_))));

    let mut twice = t.session(Mode::Batch).unwrap();
    twice.prepare_batch(&test).unwrap();
    assert!(matches!(twice.prepare_batch(&test), Err(Error::Session(_))));

    let mut online = t.session(Mode::Online).unwrap();
    assert!(matches!(online.prepare_batch(&test), Err(Error::Session(_))));
    let mut fixed = t.session(Mode::Static).unwrap();
    assert!(matches!(fixed.prepare_batch(&test), Err(Error::Session(_))));
}

#[test]
fn sessions_share_the_store_until_they_write() {
    let c = corpora(2);
    let t = tagger(&c);
    let mut fixed = t.session(Mode::Static).unwrap();
    fixed.tag_corpus(&c.target).unwrap();
    assert!(Arc::ptr_eq(&fixed.shared_store(), &t.store));

    let mut online = t.session(Mode::Online).unwrap();
    online.tag_corpus(&c.target).unwrap();
    assert!(!Arc::ptr_eq(&online.shared_store(), &t.store));
    // The original store is untouched.
    assert_eq!(t.store.total_tokens_seen(), c.source.token_count() as u64);
}

#[test]
fn stream_matches_sentence_by_sentence() {
    let c = corpora(4);
    let t = tagger(&c);
    let mut a = t.session(Mode::Online).unwrap();
    let streamed: Vec<Vec<String>> = a
        .tag_stream(c.target.sentences().iter().cloned())
        .map(|r| r.unwrap().1)
        .collect();
    let mut b = t.session(Mode::Online).unwrap();
    let direct = b.tag_corpus(&c.target).unwrap();
    assert_eq!(streamed, direct);
    assert_eq!(a.store(), b.store());
    assert_eq!(a.tokens_tagged(), c.target.token_count() as u64);
}

#[test]
fn bounded_log_keeps_prefix() {
    let c = corpora(5);
    let t = tagger(&c);
    let mut s = t.session(Mode::Static).unwrap().with_log_policy(LogPolicy::Bounded(10));
    s.tag_corpus(&c.target).unwrap();
    assert_eq!(s.log().len(), 10);
    assert_eq!(s.dropped_records(), c.target.token_count() as u64 - 10);
    assert_eq!(s.log()[0].surface, c.target.sentences()[0].tokens()[0].surface);
}

#[test]
fn incompatible_model_is_rejected() {
    let a = corpora(6);
    let t = tagger(&a);
    let other = RepresentationConfig {
        n: 30,
        suffix_min_count: 3,
    };
    let (lex, store) = build_representations(&[&a.source], other).unwrap();
    let r = flors_core::TaggerSession::new(
        Arc::clone(&t.model),
        Arc::new(lex),
        Arc::new(store),
        Mode::Static,
    );
    assert!(matches!(r, Err(Error::Incompatible(_))));
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(12))]

    #[test]
    fn online_store_converges_to_batch_store(seed in 0u64..1000, cut in 1usize..30) {
        let c = corpora(seed);
        let t = tagger(&c);
        let test = c.target.unlabeled();
        let mut online = t.session(Mode::Online).unwrap();
        let mut batch = t.session(Mode::Batch).unwrap();
        batch.prepare_batch(&test).unwrap();
        let before = batch.store().clone();
        online.tag_corpus(&test).unwrap();
        batch.tag_corpus(&test).unwrap();
        prop_assert_eq!(online.store(), batch.store());
        prop_assert_eq!(batch.store(), &before);

        // A prefix of the stream gives a strictly smaller store.
        let prefix = Corpus::new(test.sentences()[..cut.min(test.len() - 1)].to_vec(), false).unwrap();
        let mut partial = t.session(Mode::Online).unwrap();
        partial.tag_corpus(&prefix).unwrap();
        prop_assert!(partial.store().total_count() < online.store().total_count());
    }
}
