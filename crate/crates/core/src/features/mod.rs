//! Word representations built from distributional counts, suffixes and
//! shapes, and the windowed token feature vectors the classifier sees.
//!
//! Layout of one word block (`block_dim` columns):
//!
//! ```text
//! [ left counts (n+1) | right counts (n+1) | suffixes (|S|) | shapes (|H|) ]
//! ```
//!
//! A token vector concatenates five word blocks for the window positions
//! `i-2, i-1, i, i+1, i+2`, in that order. Positions outside the sentence
//! use the boundary pseudo-token.

use std::borrow::Cow;

use sha2::{Digest, Sha256};

use crate::corpus::{Corpus, Sentence};
use crate::error::{Error, Result};
use crate::sparse::SparseVector;

mod io;
mod lexicon;
mod store;
mod vocab;

pub use io::{read_representations, write_representations, STORE_FORMAT_VERSION};
pub use lexicon::{ShapeLexicon, SuffixLexicon, DEFAULT_SUFFIX_MIN_COUNT, MAX_SUFFIX_LEN};
pub use store::{ContextCounts, CountStore, Side, WordCounts};
pub use vocab::IndicatorVocab;

pub const DEFAULT_INDICATORS: usize = 500;
pub const WINDOW: usize = 5;
const HALF_WINDOW: isize = 2;

/// Lowercases a surface for distributional lookups, borrowing when the
/// surface has no uppercase characters.
pub fn fold_case(word: &str) -> Cow<'_, str> {
    if word.chars().any(char::is_uppercase) {
        Cow::Owned(word.to_lowercase())
    } else {
        Cow::Borrowed(word)
    }
}

/// `0 ↦ 0`, `x ↦ 1 + ln x`.
pub fn tf_weight(count: u64) -> f64 {
    if count == 0 {
        0.0
    } else {
        1.0 + (count as f64).ln()
    }
}

/// Maps uppercase to `X`, lowercase to `x`, digits to `d`, keeps anything
/// else, then collapses runs of the same symbol.
pub fn shape_of(word: &str) -> String {
    let mut shape = String::with_capacity(word.len());
    let mut last = None;
    for c in word.chars() {
        let sym = if c.is_uppercase() {
            'X'
        } else if c.is_lowercase() {
            'x'
        } else if c.is_numeric() {
            'd'
        } else {
            c
        };
        if last != Some(sym) {
            shape.push(sym);
            last = Some(sym);
        }
    }
    shape
}

/// A window position: a real word or the padding outside the sentence.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum WindowToken<'a> {
    Word(&'a str),
    Boundary,
}

/// `f(w)`: the four blocks of one word, kept sparse.
#[derive(Debug, Clone, PartialEq)]
pub struct WordRepresentation {
    pub n: usize,
    pub suffix_dim: usize,
    pub shape_dim: usize,
    pub left: Vec<(u32, f64)>,
    pub right: Vec<(u32, f64)>,
    pub suffix_columns: Vec<u32>,
    pub shape_column: u32,
}

impl WordRepresentation {
    fn dense(&self, block: &[(u32, f64)]) -> Vec<f64> {
        let mut out = vec![0.0; self.n + 1];
        for &(i, v) in block {
            out[i as usize] = v;
        }
        out
    }

    pub fn left_block(&self) -> Vec<f64> {
        self.dense(&self.left)
    }

    pub fn right_block(&self) -> Vec<f64> {
        self.dense(&self.right)
    }

    pub fn suffix_block(&self) -> Vec<f64> {
        let mut out = vec![0.0; self.suffix_dim];
        for &c in &self.suffix_columns {
            out[c as usize] = 1.0;
        }
        out
    }

    pub fn shape_block(&self) -> Vec<f64> {
        let mut out = vec![0.0; self.shape_dim];
        out[self.shape_column as usize] = 1.0;
        out
    }

    pub fn dim(&self) -> usize {
        2 * (self.n + 1) + self.suffix_dim + self.shape_dim
    }

    /// Writes this block at `offset` into `out`.
    fn append_to(&self, out: &mut SparseVector, offset: u32) {
        let width = self.n as u32 + 1;
        for &(i, v) in &self.left {
            out.push(offset + i, v);
        }
        for &(i, v) in &self.right {
            out.push(offset + width + i, v);
        }
        let base = offset + 2 * width;
        for &c in &self.suffix_columns {
            out.push(base + c, 1.0);
        }
        out.push(base + self.suffix_dim as u32 + self.shape_column, 1.0);
    }
}

/// Frozen parts of the representation: indicator words and the suffix and
/// shape inventories.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Lexicons {
    pub vocab: IndicatorVocab,
    pub suffixes: SuffixLexicon,
    pub shapes: ShapeLexicon,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct RepresentationConfig {
    pub n: usize,
    pub suffix_min_count: u64,
}

impl Default for RepresentationConfig {
    fn default() -> Self {
        RepresentationConfig {
            n: DEFAULT_INDICATORS,
            suffix_min_count: DEFAULT_SUFFIX_MIN_COUNT,
        }
    }
}

/// Builds lexicons and the initial count store from the corpora used for
/// word representations.
pub fn build_representations(
    corpora: &[&Corpus],
    config: RepresentationConfig,
) -> Result<(Lexicons, CountStore)> {
    let vocab = IndicatorVocab::build(corpora.iter().copied(), config.n)?;
    let suffixes = SuffixLexicon::build(corpora.iter().copied(), config.suffix_min_count);
    let shapes = ShapeLexicon::build(corpora.iter().copied());
    let store = CountStore::from_corpora(&vocab, corpora.iter().copied())?;
    Ok((
        Lexicons {
            vocab,
            suffixes,
            shapes,
        },
        store,
    ))
}

impl Lexicons {
    pub fn n(&self) -> usize {
        self.vocab.n()
    }

    /// Width of one word block.
    pub fn block_dim(&self) -> usize {
        2 * (self.n() + 1) + self.suffixes.len() + self.shapes.len()
    }

    /// Width of a token feature vector.
    pub fn feature_dim(&self) -> usize {
        WINDOW * self.block_dim()
    }

    /// SHA-256 of the lexicon contents; ties models to compatible stores.
    pub fn fingerprint(&self) -> String {
        let mut hasher = Sha256::new();
        for (tag, items) in [
            ("vocab", self.vocab.words()),
            ("suffixes", self.suffixes.suffixes()),
            ("shapes", self.shapes.shapes()),
        ] {
            hasher.update(format!("{tag}\t{}\n", items.len()).as_bytes());
            for item in items {
                hasher.update(item.as_bytes());
                hasher.update(b"\n");
            }
        }
        store::hex(&hasher.finalize())
    }

    pub fn word_representation(&self, store: &CountStore, token: WindowToken<'_>) -> WordRepresentation {
        let mut rep = WordRepresentation {
            n: self.n(),
            suffix_dim: self.suffixes.len(),
            shape_dim: self.shapes.len(),
            left: Vec::new(),
            right: Vec::new(),
            suffix_columns: Vec::new(),
            shape_column: ShapeLexicon::BOUNDARY,
        };
        if let WindowToken::Word(word) = token {
            if let Some(counts) = store.counts(word) {
                rep.left = store::weighted_block(&counts.left);
                rep.right = store::weighted_block(&counts.right);
            }
            rep.suffix_columns = self.suffixes.columns(word);
            rep.shape_column = self.shapes.column(word);
        }
        rep
    }

    fn check_store(&self, store: &CountStore) -> Result<()> {
        if store.n() != self.n() {
            return Err(Error::DimensionMismatch {
                expected: self.n(),
                actual: store.n(),
            });
        }
        Ok(())
    }

    /// Feature vector of token `i`: the concatenated representations of the
    /// five window positions around it.
    pub fn token_features(
        &self,
        store: &CountStore,
        sentence: &Sentence,
        i: usize,
    ) -> Result<SparseVector> {
        if i >= sentence.len() {
            return Err(Error::IndexOutOfRange {
                index: i,
                len: sentence.len(),
            });
        }
        self.check_store(store)?;
        let reps: Vec<WordRepresentation> = window(sentence, i)
            .map(|t| self.word_representation(store, t))
            .collect();
        Ok(self.concat(reps.iter()))
    }

    /// Feature vectors of every token; each word is represented once.
    pub fn sentence_features(
        &self,
        store: &CountStore,
        sentence: &Sentence,
    ) -> Result<Vec<SparseVector>> {
        self.check_store(store)?;
        let boundary = self.word_representation(store, WindowToken::Boundary);
        let reps: Vec<WordRepresentation> = sentence
            .surfaces()
            .map(|w| self.word_representation(store, WindowToken::Word(w)))
            .collect();
        let len = reps.len() as isize;
        Ok((0..len)
            .map(|i| {
                self.concat((i - HALF_WINDOW..=i + HALF_WINDOW).map(|j| {
                    if j < 0 || j >= len {
                        &boundary
                    } else {
                        &reps[j as usize]
                    }
                }))
            })
            .collect())
    }

    fn concat<'r>(&self, reps: impl Iterator<Item = &'r WordRepresentation>) -> SparseVector {
        let block = self.block_dim() as u32;
        let mut out = SparseVector::with_dim(self.feature_dim(), 64);
        for (slot, rep) in reps.enumerate() {
            rep.append_to(&mut out, slot as u32 * block);
        }
        out
    }
}

fn window(sentence: &Sentence, i: usize) -> impl Iterator<Item = WindowToken<'_>> {
    let tokens = sentence.tokens();
    let center = i as isize;
    (center - HALF_WINDOW..=center + HALF_WINDOW).map(move |j| {
        if j < 0 || j as usize >= tokens.len() {
            WindowToken::Boundary
        } else {
            WindowToken::Word(&tokens[j as usize].surface)
        }
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::corpus::read_unlabeled;

    #[test]
    fn tf_values() {
        assert_eq!(tf_weight(0), 0.0);
        assert_eq!(tf_weight(1), 1.0);
        assert!((tf_weight(10) - 3.302585092994046).abs() < 1e-12);
    }

    #[test]
    fn shapes() {
        assert_eq!(shape_of("Bush"), "Xx");
        assert_eq!(shape_of("3.1"), "d.d");
        assert_eq!(shape_of("IBM-360"), "X-d");
        assert_eq!(shape_of("dog"), "x");
        assert_eq!(shape_of("--"), "-");
        assert_eq!(shape_of("McDonald's"), "XxXx'x");
    }

    fn lexicons_and_store(text: &str, n: usize, min: u64) -> (Lexicons, CountStore) {
        let corpus = read_unlabeled(text.as_bytes()).unwrap();
        build_representations(
            &[&corpus],
            RepresentationConfig {
                n,
                suffix_min_count: min,
            },
        )
        .unwrap()
    }

    #[test]
    fn unseen_word_gets_suffix_bits_only() {
        let (lex, store) = lexicons_and_store("zzz zzz\nzz z\n", 1, 1);
        let rep = lex.word_representation(&store, WindowToken::Word("xzzz"));
        assert!(rep.left.is_empty() && rep.right.is_empty());
        assert_eq!(rep.suffix_columns.len(), 3);
        assert_eq!(rep.shape_column, lex.shapes.column("x"));
    }

    #[test]
    fn boundary_representation() {
        let (lex, store) = lexicons_and_store("a b c\n", 2, 1);
        let rep = lex.word_representation(&store, WindowToken::Boundary);
        assert!(rep.left.is_empty() && rep.right.is_empty() && rep.suffix_columns.is_empty());
        assert_eq!(rep.shape_column, ShapeLexicon::BOUNDARY);
        let shape = rep.shape_block();
        assert_eq!(shape.iter().sum::<f64>(), 1.0);
        assert_eq!(shape[ShapeLexicon::BOUNDARY as usize], 1.0);
    }

    #[test]
    fn suffix_and_shape_ignore_store() {
        let (lex, store) = lexicons_and_store("the cat sat\nthe dog sat\n", 3, 1);
        let empty = CountStore::new(lex.n());
        for w in ["the", "Cat", "unseen", "sat"] {
            let a = lex.word_representation(&store, WindowToken::Word(w));
            let b = lex.word_representation(&empty, WindowToken::Word(w));
            assert_eq!(a.suffix_columns, b.suffix_columns);
            assert_eq!(a.shape_column, b.shape_column);
        }
    }

    #[test]
    fn one_token_sentence_window() {
        let (lex, store) = lexicons_and_store("a b\n", 2, 1);
        let s = Sentence::from_text("a").unwrap();
        let x = lex.token_features(&store, &s, 0).unwrap();
        assert_eq!(x.dim(), lex.feature_dim());
        let block = lex.block_dim();
        let boundary_col = 2 * (lex.n() + 1) + lex.suffixes.len() + ShapeLexicon::BOUNDARY as usize;
        for slot in [0, 1, 3, 4] {
            let start = slot * block;
            let nz: Vec<u32> = x
                .indices()
                .iter()
                .copied()
                .filter(|&c| (c as usize) >= start && (c as usize) < start + block)
                .collect();
            assert_eq!(nz, vec![(start + boundary_col) as u32]);
        }
    }

    #[test]
    fn dimensionality_arithmetic() {
        let vocab = IndicatorVocab::from_words((0..500).map(|i| format!("w{i}")).collect()).unwrap();
        let suffixes = SuffixLexicon::from_suffixes((0..1000).map(|i| format!("s{i}")).collect()).unwrap();
        let shapes = ShapeLexicon::from_shapes((0..48).map(|i| format!("h{i}")).collect()).unwrap();
        assert_eq!(shapes.len(), 50);
        let lex = Lexicons {
            vocab,
            suffixes,
            shapes,
        };
        assert_eq!(lex.feature_dim(), 10260);
    }

    #[test]
    fn out_of_range() {
        let (lex, store) = lexicons_and_store("a b\n", 2, 1);
        let s = Sentence::from_text("a b").unwrap();
        assert!(matches!(
            lex.token_features(&store, &s, 2),
            Err(Error::IndexOutOfRange { index: 2, len: 2 })
        ));
    }

    #[test]
    fn sentence_features_match_token_features() {
        let (lex, store) = lexicons_and_store("The cat sat on the mat\nA dog sat\n", 4, 1);
        let s = Sentence::from_text("the Dog sat on a hat").unwrap();
        let all = lex.sentence_features(&store, &s).unwrap();
        for (i, x) in all.iter().enumerate() {
            let single = lex.token_features(&store, &s, i).unwrap();
            assert_eq!(&single, x);
            assert_eq!(lex.token_features(&store, &s, i).unwrap(), single);
        }
    }

    #[test]
    fn fingerprint_ignores_counts() {
        let (lex, store) = lexicons_and_store("a b c\n", 2, 1);
        let fp = lex.fingerprint();
        let mut bigger = store.clone();
        bigger
            .accumulate(&lex.vocab, &Sentence::from_text("c b a").unwrap())
            .unwrap();
        assert_eq!(lex.fingerprint(), fp);
        let (other, _) = lexicons_and_store("a b d\n", 2, 1);
        assert_ne!(other.fingerprint(), fp);
    }
}
