use std::collections::BTreeMap;

use proptest::prelude::*;

use flors_core::classifier::LinearModel;
use flors_core::corpus::{read_labeled, read_unlabeled, sample_fraction, Corpus, Sentence, TagSet, Token};
use flors_core::eval::{score_log, time_course, Category, CategoryStats, Overlap, TokenCategory};
use flors_core::features::{
    build_representations, tf_weight, CountStore, IndicatorVocab, RepresentationConfig, Side,
    WindowToken,
};
use flors_core::{PredictionRecord, SparseVector};

const WORDS: &[&str] = &[
    "the", "The", "a", "dog", "Dog", "runs", "fast", "12", "3.5", "x-y", "Über", "über", "ran", ".",
];
const TAGS: &[&str] = &["A", "B", "C"];

fn sentence() -> impl Strategy<Value = Sentence> {
    prop::collection::vec((0..WORDS.len(), 0..TAGS.len()), 1..9).prop_map(|toks| {
        Sentence::new(toks.into_iter().map(|(w, t)| Token::tagged(WORDS[w], TAGS[t])).collect()).unwrap()
    })
}

fn corpus() -> impl Strategy<Value = Corpus> {
    prop::collection::vec(sentence(), 1..12).prop_map(|s| Corpus::new(s, true).unwrap())
}

fn store_for(corpus: &Corpus, n: usize) -> (IndicatorVocab, CountStore) {
    let vocab = IndicatorVocab::build([corpus], n).unwrap();
    let store = CountStore::from_corpora(&vocab, [corpus]).unwrap();
    (vocab, store)
}

fn cells(store: &CountStore) -> BTreeMap<(String, char, u32), u64> {
    let mut out = BTreeMap::new();
    for (w, c) in store.sorted_words() {
        for side in [Side::Left, Side::Right] {
            for &(cell, n) in c.side(side).cells() {
                out.insert((w.to_string(), side.code(), cell), n);
            }
        }
    }
    out
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn corpus_round_trips(c in corpus()) {
        let mut buf = Vec::new();
        c.write_labeled(&mut buf).unwrap();
        prop_assert_eq!(read_labeled(&buf[..]).unwrap(), c.clone());
        let mut buf = Vec::new();
        c.write_unlabeled(&mut buf).unwrap();
        prop_assert_eq!(read_unlabeled(&buf[..]).unwrap(), c.unlabeled());
    }

    #[test]
    fn counts_are_symmetric(c in corpus(), n in 1usize..8) {
        let (vocab, store) = store_for(&c, n);
        // Every token has exactly one left and one right neighbour.
        prop_assert_eq!(store.side_total(Side::Left), c.token_count() as u64);
        prop_assert_eq!(store.side_total(Side::Right), c.token_count() as u64);
        for a in vocab.words() {
            for b in vocab.words() {
                let (ia, ib) = (vocab.index_of(a).unwrap(), vocab.index_of(b).unwrap());
                prop_assert_eq!(store.cell(a, Side::Right, ib), store.cell(b, Side::Left, ia));
            }
        }
    }

    #[test]
    fn counts_match_brute_force(c in corpus(), n in 1usize..8) {
        let (vocab, store) = store_for(&c, n);
        let n = vocab.n() as u32;
        let index = |w: Option<&str>| {
            w.and_then(|w| vocab.words().iter().position(|v| *v == w.to_lowercase())).map_or(n, |i| i as u32)
        };
        let mut want = BTreeMap::new();
        for s in c.sentences() {
            let toks: Vec<&str> = s.surfaces().collect();
            for i in 0..toks.len() {
                let left = if i == 0 { None } else { Some(toks[i - 1]) };
                let right = toks.get(i + 1).copied();
                *want.entry((toks[i].to_lowercase(), 'L', index(left))).or_insert(0) += 1;
                *want.entry((toks[i].to_lowercase(), 'R', index(right))).or_insert(0) += 1;
            }
        }
        prop_assert_eq!(cells(&store), want);
    }

    #[test]
    fn updates_are_monotone(c in corpus(), extra in sentence(), n in 1usize..8) {
        let (vocab, mut store) = store_for(&c, n);
        let before = cells(&store);
        let (l, r) = (store.side_total(Side::Left), store.side_total(Side::Right));
        store.accumulate(&vocab, &extra).unwrap();
        let after = cells(&store);
        for (k, v) in &before {
            prop_assert!(after.get(k).copied().unwrap_or(0) >= *v);
        }
        prop_assert_eq!(store.side_total(Side::Left), l + extra.len() as u64);
        prop_assert_eq!(store.side_total(Side::Right), r + extra.len() as u64);
    }

    #[test]
    fn distributional_blocks_are_unit(c in corpus(), n in 1usize..8) {
        let (lex, store) = build_representations(
            &[&c],
            RepresentationConfig { n, suffix_min_count: 1 },
        ).unwrap();
        for (w, _) in store.sorted_words() {
            let rep = lex.word_representation(&store, WindowToken::Word(w));
            for block in [rep.left_block(), rep.right_block()] {
                let norm = block.iter().map(|v| v * v).sum::<f64>().sqrt();
                prop_assert!((norm - 1.0).abs() < 1e-9);
            }
        }
        for (i, _) in c.sentences()[0].tokens().iter().enumerate() {
            let x = lex.token_features(&store, &c.sentences()[0], i).unwrap();
            prop_assert_eq!(x.dim(), lex.feature_dim());
        }
    }

    #[test]
    fn tf_is_monotone(a in 0u64..1_000_000_000, d in 1u64..1000) {
        prop_assert!(tf_weight(a) < tf_weight(a + d));
        prop_assert!(tf_weight(a) >= 0.0);
    }

    // Integer-valued weights keep score arithmetic exact.
    #[test]
    fn argmax_ignores_common_bias_shift(
        w in prop::collection::vec(prop::collection::vec(-5i32..5, 4), 3),
        b in prop::collection::vec(-5i32..5, 3),
        x in prop::collection::vec(-3i32..3, 4),
        shift in -20i32..20,
    ) {
        let tags = TagSet::new(["A", "B", "C"]);
        let weights: Vec<Vec<f64>> = w.iter().map(|r| r.iter().map(|&v| v as f64).collect()).collect();
        let biases: Vec<f64> = b.iter().map(|&v| v as f64).collect();
        let shifted: Vec<f64> = biases.iter().map(|v| v + shift as f64).collect();
        let m1 = LinearModel::new(tags.clone(), weights.clone(), biases, "").unwrap();
        let m2 = LinearModel::new(tags, weights, shifted, "").unwrap();
        let x = SparseVector::from_dense(&x.iter().map(|&v| v as f64).collect::<Vec<_>>());
        prop_assert_eq!(m1.predict_index(&x).unwrap(), m2.predict_index(&x).unwrap());
    }

    #[test]
    fn scores_follow_tag_permutation(
        w in prop::collection::vec(prop::collection::vec(-1.0f64..1.0, 5), 4),
        b in prop::collection::vec(-1.0f64..1.0, 4),
        x in prop::collection::vec(-1.0f64..1.0, 5),
        perm in Just(vec![0usize, 1, 2, 3]).prop_shuffle(),
    ) {
        let names = ["A", "B", "C", "D"];
        let m1 = LinearModel::new(TagSet::new(names), w.clone(), b.clone(), "").unwrap();
        let m2 = LinearModel::new(
            TagSet::from_ordered(perm.iter().map(|&i| names[i].to_string()).collect()).unwrap(),
            perm.iter().map(|&i| w[i].clone()).collect(),
            perm.iter().map(|&i| b[i]).collect(),
            "",
        ).unwrap();
        let x = SparseVector::from_dense(&x);
        let (s1, s2) = (m1.scores(&x).unwrap(), m2.scores(&x).unwrap());
        for (k, &i) in perm.iter().enumerate() {
            prop_assert_eq!(s2[k].to_bits(), s1[i].to_bits());
        }
    }

    #[test]
    fn time_course_concatenates_and_averages(
        outcomes in prop::collection::vec((any::<bool>(), 0usize..3), 1..200),
        width in 1usize..20,
        blocks in 0usize..5,
    ) {
        let overlaps = [Overlap::Known, Overlap::Shifted, Overlap::OutOfVocabulary];
        let log: Vec<PredictionRecord> = outcomes.iter().map(|&(ok, _)| PredictionRecord {
            surface: "w".into(),
            gold: Some("A".into()),
            predicted: if ok { "A" } else { "B" }.into(),
        }).collect();
        let cats: Vec<TokenCategory> = outcomes.iter().map(|&(_, o)| TokenCategory {
            overlap: overlaps[o],
            unseen: o == 2,
            unknown: o == 2,
        }).collect();
        let course = time_course(&log, &cats, width).unwrap();
        let report = score_log(&log, &cats).unwrap();
        for category in Category::ALL {
            match (course.weighted_error(category), report.error(category)) {
                (Some(a), Some(b)) => prop_assert!((a - b).abs() <= 1e-12),
                (None, None) => {}
                other => prop_assert!(false, "{:?}", other),
            }
        }
        // Splitting at a multiple of the width concatenates the ALL curve.
        let cut = (blocks * width).min(log.len());
        if cut % width == 0 && cut > 0 && cut < log.len() {
            let head = time_course(&log[..cut], &cats[..cut], width).unwrap();
            let tail = time_course(&log[cut..], &cats[cut..], width).unwrap();
            let mut joined: Vec<_> = head.curve(Category::All).to_vec();
            joined.extend(tail.curve(Category::All).iter().map(|b| {
                let mut b = *b;
                b.start += cut;
                b.end += cut;
                b
            }));
            prop_assert_eq!(course.curve(Category::All), &joined[..]);
        }
    }

    #[test]
    fn sample_stats_mean_within_range(errors in prop::collection::vec(0.0f64..1.0, 2..40)) {
        let s = CategoryStats::from_errors(&errors).unwrap();
        prop_assert!(s.min <= s.mean && s.mean <= s.max);
        prop_assert!(s.std >= 0.0);
        prop_assert_eq!(s.trials_counted, errors.len());
    }

    #[test]
    fn sampling_keeps_order_and_size(c in corpus(), fraction in 0.01f64..=1.0, seed in any::<u64>()) {
        let s = sample_fraction(&c, fraction, seed).unwrap();
        let want = ((fraction * c.len() as f64).round() as usize).min(c.len());
        prop_assert_eq!(s.len(), want);
        let mut it = c.sentences().iter();
        for picked in s.sentences() {
            prop_assert!(it.any(|x| x == picked));
        }
        prop_assert_eq!(sample_fraction(&c, fraction, seed).unwrap(), s);
    }
}
