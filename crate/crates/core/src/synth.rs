//! Synthetic source/target corpora with a controlled vocabulary shift.
//!
//! Both domains are sampled from hidden Markov processes with the same tag
//! transitions. Each word belongs to exactly one tag. The target emission
//! vocabulary of every tag reuses `overlap` of its types from the source
//! vocabulary of that tag and fills the rest with fresh words, so overlap
//! 1.0 gives a target vocabulary inside the source one and overlap 0.0 a
//! disjoint one.
//!
//! Roughly a third of the tags are "closed": few, very frequent words.
//! Open tags get longer words, and most of their words end in a marker
//! specific to the tag. The first open tag is capitalized and, with at
//! least three open tags, the last one emits numbers.

use std::collections::HashSet;

use rand::distributions::{Distribution, WeightedIndex};
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::corpus::{Corpus, Sentence, Token};
use crate::error::{Error, Result};

const CONSONANTS: &[u8] = b"bcdfghjklmnprstvwz";
const VOWELS: &[u8] = b"aeiou";
const SUCCESSORS: usize = 3;
const SMOOTHING: f64 = 0.05;
const MARKED_FRACTION: f64 = 0.6;
const CLOSED_SHARE: f64 = 0.05;

#[derive(Debug, Clone, PartialEq)]
pub struct SyntheticShiftConfig {
    pub tags: usize,
    pub source_vocab: usize,
    pub target_vocab: usize,
    pub overlap: f64,
    pub source_sentences: usize,
    pub target_sentences: usize,
    /// Unlabeled sentences drawn from each domain, separate from the
    /// labeled ones.
    pub unlabeled_sentences: usize,
    pub min_len: usize,
    pub max_len: usize,
    pub seed: u64,
}

impl Default for SyntheticShiftConfig {
    fn default() -> Self {
        SyntheticShiftConfig {
            tags: 12,
            source_vocab: 2000,
            target_vocab: 2000,
            overlap: 0.5,
            source_sentences: 2000,
            target_sentences: 600,
            unlabeled_sentences: 0,
            min_len: 5,
            max_len: 20,
            seed: 1,
        }
    }
}

impl SyntheticShiftConfig {
    fn validate(&self) -> Result<()> {
        let fail = |m: &str| Err(Error::InvalidArgument(m.to_owned()));
        if self.tags == 0 {
            return fail("synthetic corpus needs at least one tag");
        }
        if self.source_vocab < self.tags || self.target_vocab < self.tags {
            return fail("vocabulary sizes must be at least the number of tags");
        }
        if !(0.0..=1.0).contains(&self.overlap) {
            return fail("overlap must lie in [0, 1]");
        }
        if self.min_len == 0 || self.min_len > self.max_len {
            return fail("need 1 <= min_len <= max_len");
        }
        if self.source_sentences == 0 || self.target_sentences == 0 {
            return fail("sentence counts must be positive");
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SyntheticCorpora {
    pub source: Corpus,
    pub target: Corpus,
    /// Unlabeled text from both domains, when requested.
    pub unlabeled: Option<Corpus>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum TagKind {
    Closed,
    Open,
    Proper,
    Number,
}

struct Emission {
    words: Vec<String>,
    weights: WeightedIndex<f64>,
}

impl Emission {
    fn new(words: Vec<String>) -> Self {
        let weights = WeightedIndex::new((0..words.len()).map(|r| 1.0 / (r as f64 + 1.0)))
            .expect("non-empty word list");
        Emission { words, weights }
    }
}

struct Process<'a> {
    tag_names: &'a [String],
    start: &'a WeightedIndex<f64>,
    transitions: &'a [WeightedIndex<f64>],
    emissions: Vec<Emission>,
}

impl Process<'_> {
    fn sentence(&self, rng: &mut ChaCha8Rng, len: usize) -> Sentence {
        let mut tokens = Vec::with_capacity(len);
        let mut tag = self.start.sample(rng);
        for k in 0..len {
            if k > 0 {
                tag = self.transitions[tag].sample(rng);
            }
            let emission = &self.emissions[tag];
            let word = &emission.words[emission.weights.sample(rng)];
            tokens.push(Token::tagged(word.clone(), self.tag_names[tag].clone()));
        }
        Sentence::new(tokens).expect("non-empty sentence of valid surfaces")
    }

    fn corpus(&self, rng: &mut ChaCha8Rng, sentences: usize, min: usize, max: usize, labeled: bool) -> Corpus {
        let sentences = (0..sentences)
            .map(|_| {
                let len = rng.gen_range(min..=max);
                let s = self.sentence(rng, len);
                if labeled {
                    s
                } else {
                    s.without_tags()
                }
            })
            .collect();
        Corpus::new(sentences, labeled).expect("consistent labels")
    }
}

fn syllable(rng: &mut ChaCha8Rng) -> String {
    let c = CONSONANTS[rng.gen_range(0..CONSONANTS.len())] as char;
    let v = VOWELS[rng.gen_range(0..VOWELS.len())] as char;
    format!("{c}{v}")
}

fn fresh_word(rng: &mut ChaCha8Rng, kind: TagKind, marker: &str, used: &mut HashSet<String>) -> String {
    loop {
        let word = match kind {
            TagKind::Number => {
                let digits = rng.gen_range(1..=4);
                let mut w: String = (0..digits)
                    .map(|_| char::from(b'0' + rng.gen_range(0..10u8)))
                    .collect();
                if rng.gen_bool(0.3) {
                    w.push(if rng.gen_bool(0.5) { '.' } else { ',' });
                    w.push(char::from(b'0' + rng.gen_range(0..10u8)));
                }
                w
            }
            TagKind::Closed => {
                let n = rng.gen_range(1..=2);
                let mut w: String = (0..n).map(|_| syllable(rng)).collect();
                if rng.gen_bool(0.5) {
                    w.pop();
                }
                w
            }
            TagKind::Open | TagKind::Proper => {
                let n = rng.gen_range(2..=3);
                let mut w: String = (0..n).map(|_| syllable(rng)).collect();
                if rng.gen_bool(MARKED_FRACTION) {
                    w.push_str(marker);
                }
                if kind == TagKind::Proper {
                    let mut chars = w.chars();
                    let first = chars.next().expect("non-empty").to_ascii_uppercase();
                    w = std::iter::once(first).chain(chars).collect();
                }
                w
            }
        };
        if used.insert(word.clone()) {
            return word;
        }
    }
}

/// Splits `total` word types over the tags: closed tags share a small
/// slice, open tags the rest. Every tag gets at least one word.
fn allocate(total: usize, kinds: &[TagKind]) -> Vec<usize> {
    let closed = kinds.iter().filter(|k| **k == TagKind::Closed).count();
    let open = kinds.len() - closed;
    let closed_total = if open == 0 {
        total
    } else {
        ((total as f64 * CLOSED_SHARE).round() as usize).clamp(closed, total - open)
    };
    let open_total = total - closed_total;
    let mut sizes = Vec::with_capacity(kinds.len());
    let (mut ci, mut oi) = (0, 0);
    for kind in kinds {
        let size = if *kind == TagKind::Closed {
            let s = closed_total / closed + usize::from(ci < closed_total % closed);
            ci += 1;
            s
        } else {
            let s = open_total / open + usize::from(oi < open_total % open);
            oi += 1;
            s
        };
        sizes.push(size.max(1));
    }
    sizes
}

fn transition_row(rng: &mut ChaCha8Rng, tags: usize) -> WeightedIndex<f64> {
    let mut weights = vec![SMOOTHING; tags];
    let mut order: Vec<usize> = (0..tags).collect();
    order.shuffle(rng);
    for &t in order.iter().take(SUCCESSORS) {
        weights[t] += rng.gen_range(1.0..3.0);
    }
    WeightedIndex::new(weights).expect("positive weights")
}

/// Samples labeled source and target corpora. Deterministic under `seed`.
pub fn generate(config: &SyntheticShiftConfig) -> Result<SyntheticCorpora> {
    config.validate()?;
    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
    let k = config.tags;
    let width = k.to_string().len().max(2);
    let tag_names: Vec<String> = (0..k).map(|t| format!("T{t:0width$}")).collect();

    let closed = if k >= 3 { k.div_ceil(3) } else { 0 };
    let open = k - closed;
    let kinds: Vec<TagKind> = (0..k)
        .map(|t| {
            if t < closed {
                TagKind::Closed
            } else if t == closed && open >= 2 {
                TagKind::Proper
            } else if t == k - 1 && open >= 3 {
                TagKind::Number
            } else {
                TagKind::Open
            }
        })
        .collect();

    let mut markers = HashSet::new();
    let markers: Vec<String> = (0..k)
        .map(|_| loop {
            let c = CONSONANTS[rng.gen_range(0..CONSONANTS.len())] as char;
            let m = format!("{}{c}", VOWELS[rng.gen_range(0..VOWELS.len())] as char);
            if markers.insert(m.clone()) || markers.len() >= VOWELS.len() * CONSONANTS.len() {
                break m;
            }
        })
        .collect();

    let start = transition_row(&mut rng, k);
    let transitions: Vec<WeightedIndex<f64>> = (0..k).map(|_| transition_row(&mut rng, k)).collect();

    let mut used = HashSet::new();
    let source_sizes = allocate(config.source_vocab, &kinds);
    let target_sizes = allocate(config.target_vocab, &kinds);
    let mut source_words = Vec::with_capacity(k);
    let mut target_words = Vec::with_capacity(k);
    for t in 0..k {
        let source: Vec<String> = (0..source_sizes[t])
            .map(|_| fresh_word(&mut rng, kinds[t], &markers[t], &mut used))
            .collect();
        let shared = ((config.overlap * target_sizes[t] as f64).round() as usize).min(source.len());
        let mut target: Vec<String> = source.choose_multiple(&mut rng, shared).cloned().collect();
        while target.len() < target_sizes[t] {
            target.push(fresh_word(&mut rng, kinds[t], &markers[t], &mut used));
        }
        target.shuffle(&mut rng);
        source_words.push(source);
        target_words.push(target);
    }

    let source_process = Process {
        tag_names: &tag_names,
        start: &start,
        transitions: &transitions,
        emissions: source_words.into_iter().map(Emission::new).collect(),
    };
    let target_process = Process {
        tag_names: &tag_names,
        start: &start,
        transitions: &transitions,
        emissions: target_words.into_iter().map(Emission::new).collect(),
    };
    let (min, max) = (config.min_len, config.max_len);
    let source = source_process.corpus(&mut rng, config.source_sentences, min, max, true);
    let target = target_process.corpus(&mut rng, config.target_sentences, min, max, true);
    let unlabeled = (config.unlabeled_sentences > 0).then(|| {
        let mut sentences = source_process
            .corpus(&mut rng, config.unlabeled_sentences, min, max, false)
            .into_sentences();
        sentences.extend(
            target_process
                .corpus(&mut rng, config.unlabeled_sentences, min, max, false)
                .into_sentences(),
        );
        Corpus::new(sentences, false).expect("unlabeled")
    });
    Ok(SyntheticCorpora {
        source,
        target,
        unlabeled,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn small(overlap: f64, seed: u64) -> SyntheticShiftConfig {
        SyntheticShiftConfig {
            tags: 6,
            source_vocab: 200,
            target_vocab: 150,
            overlap,
            source_sentences: 200,
            target_sentences: 100,
            unlabeled_sentences: 0,
            min_len: 3,
            max_len: 9,
            seed,
        }
    }

    #[test]
    fn deterministic_under_seed() {
        assert_eq!(generate(&small(0.5, 4)).unwrap(), generate(&small(0.5, 4)).unwrap());
        assert_ne!(generate(&small(0.5, 4)).unwrap(), generate(&small(0.5, 5)).unwrap());
    }

    #[test]
    fn full_overlap_is_subset() {
        // Few types and many source tokens, so every source type is drawn.
        let mut cfg = small(1.0, 2);
        cfg.source_vocab = 60;
        cfg.target_vocab = 60;
        cfg.source_sentences = 3000;
        let c = generate(&cfg).unwrap();
        let source = c.source.vocabulary();
        assert!(c.target.vocabulary().is_subset(&source));
    }

    #[test]
    fn zero_overlap_is_all_oov() {
        let c = generate(&small(0.0, 2)).unwrap();
        let source = c.source.vocabulary();
        let oov = c.target.tokens().filter(|t| !source.contains(&t.surface)).count();
        assert_eq!(oov, c.target.token_count());
    }

    #[test]
    fn each_word_has_one_tag() {
        let c = generate(&small(0.5, 9)).unwrap();
        let mut all = c.source.sentences().to_vec();
        all.extend(c.target.sentences().iter().cloned());
        let joint = Corpus::new(all, true).unwrap();
        assert!(joint.tag_profile().values().all(|tags| tags.len() == 1));
    }

    #[test]
    fn sizes_and_lengths() {
        let mut cfg = small(0.5, 1);
        cfg.unlabeled_sentences = 10;
        let c = generate(&cfg).unwrap();
        assert_eq!(c.source.len(), 200);
        assert_eq!(c.target.len(), 100);
        assert_eq!(c.unlabeled.unwrap().len(), 20);
        assert!(c
            .source
            .sentences()
            .iter()
            .all(|s| (3..=9).contains(&s.len())));
    }

    #[test]
    fn rejects_degenerate_configs() {
        let mut cfg = small(0.5, 1);
        cfg.tags = 0;
        assert!(generate(&cfg).is_err());
        let mut cfg = small(1.5, 1);
        assert!(generate(&cfg).is_err());
        cfg = small(0.5, 1);
        cfg.min_len = 0;
        assert!(generate(&cfg).is_err());
    }

    #[test]
    fn allocation_covers_total() {
        let kinds = [TagKind::Closed, TagKind::Closed, TagKind::Open, TagKind::Proper, TagKind::Number];
        let sizes = allocate(100, &kinds);
        assert_eq!(sizes.iter().sum::<usize>(), 100);
        assert!(sizes.iter().all(|&s| s >= 1));
        assert_eq!(allocate(3, &[TagKind::Open; 3]), vec![1, 1, 1]);
    }
}
