use std::collections::{BTreeSet, HashMap};

use super::shape_of;
use crate::corpus::Corpus;
use crate::error::{Error, Result};

pub const MAX_SUFFIX_LEN: usize = 4;
pub const DEFAULT_SUFFIX_MIN_COUNT: u64 = 10;

/// Case-sensitive suffixes (1 to 4 characters) frequent enough in the
/// representation corpora. Columns follow lexicographic order.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SuffixLexicon {
    suffixes: Vec<String>,
    index: HashMap<String, u32>,
}

fn suffixes(word: &str) -> impl Iterator<Item = &str> {
    let starts: Vec<usize> = word.char_indices().map(|(i, _)| i).collect();
    let len = starts.len();
    (1..=MAX_SUFFIX_LEN.min(len)).map(move |k| &word[starts[len - k]..])
}

impl SuffixLexicon {
    /// Keeps every suffix seen at least `min_count` times over all tokens.
    pub fn build<'a, I>(corpora: I, min_count: u64) -> Self
    where
        I: IntoIterator<Item = &'a Corpus>,
    {
        let mut counts: HashMap<&str, u64> = HashMap::new();
        for corpus in corpora {
            for token in corpus.tokens() {
                for suffix in suffixes(&token.surface) {
                    *counts.entry(suffix).or_default() += 1;
                }
            }
        }
        let kept: BTreeSet<&str> = counts
            .into_iter()
            .filter(|&(_, c)| c >= min_count)
            .map(|(s, _)| s)
            .collect();
        SuffixLexicon::from_suffixes(kept.into_iter().map(str::to_owned).collect())
            .expect("sorted set has no duplicates")
    }

    pub fn from_suffixes(mut suffixes: Vec<String>) -> Result<Self> {
        suffixes.sort();
        if suffixes.windows(2).any(|w| w[0] == w[1]) {
            return Err(Error::InvalidArgument("duplicate suffix".into()));
        }
        let index = suffixes
            .iter()
            .enumerate()
            .map(|(i, s)| (s.clone(), i as u32))
            .collect();
        Ok(SuffixLexicon { suffixes, index })
    }

    pub fn len(&self) -> usize {
        self.suffixes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.suffixes.is_empty()
    }

    pub fn suffixes(&self) -> &[String] {
        &self.suffixes
    }

    /// Sorted columns of the word's suffixes that are in the lexicon.
    pub fn columns(&self, word: &str) -> Vec<u32> {
        let mut cols: Vec<u32> = suffixes(word)
            .filter_map(|s| self.index.get(s).copied())
            .collect();
        cols.sort_unstable();
        cols
    }
}

/// Word shapes seen in the representation corpora, plus two reserved
/// columns: [`ShapeLexicon::UNKNOWN`] and [`ShapeLexicon::BOUNDARY`].
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ShapeLexicon {
    shapes: Vec<String>,
    index: HashMap<String, u32>,
}

impl ShapeLexicon {
    pub const UNKNOWN: u32 = 0;
    pub const BOUNDARY: u32 = 1;
    const RESERVED: u32 = 2;

    pub fn build<'a, I>(corpora: I) -> Self
    where
        I: IntoIterator<Item = &'a Corpus>,
    {
        let shapes: BTreeSet<String> = corpora
            .into_iter()
            .flat_map(|c| c.tokens())
            .map(|t| shape_of(&t.surface))
            .collect();
        ShapeLexicon::from_shapes(shapes.into_iter().collect()).expect("sorted set has no duplicates")
    }

    pub fn from_shapes(mut shapes: Vec<String>) -> Result<Self> {
        shapes.sort();
        if shapes.windows(2).any(|w| w[0] == w[1]) {
            return Err(Error::InvalidArgument("duplicate shape".into()));
        }
        let index = shapes
            .iter()
            .enumerate()
            .map(|(i, s)| (s.clone(), i as u32 + Self::RESERVED))
            .collect();
        Ok(ShapeLexicon { shapes, index })
    }

    /// Number of columns, reserved ones included.
    pub fn len(&self) -> usize {
        self.shapes.len() + Self::RESERVED as usize
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    /// Observed shapes, without the reserved columns.
    pub fn shapes(&self) -> &[String] {
        &self.shapes
    }

    pub fn column(&self, word: &str) -> u32 {
        self.index
            .get(&shape_of(word))
            .copied()
            .unwrap_or(Self::UNKNOWN)
    }
}
