use std::collections::HashMap;
use std::fmt::Write as _;

use sha2::{Digest, Sha256};

use super::{fold_case, tf_weight, IndicatorVocab};
use crate::corpus::{Corpus, Sentence};
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Side {
    Left,
    Right,
}

impl Side {
    pub fn code(self) -> char {
        match self {
            Side::Left => 'L',
            Side::Right => 'R',
        }
    }
}

/// Raw counts of one word against the indicator vocabulary, stored as
/// sorted `(cell, count)` pairs. Cell `n` is the omitted-context cell.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct ContextCounts {
    cells: Vec<(u32, u64)>,
}

impl ContextCounts {
    fn increment(&mut self, cell: u32, by: u64) {
        match self.cells.binary_search_by_key(&cell, |&(c, _)| c) {
            Ok(pos) => self.cells[pos].1 += by,
            Err(pos) => self.cells.insert(pos, (cell, by)),
        }
    }

    pub fn get(&self, cell: u32) -> u64 {
        self.cells
            .binary_search_by_key(&cell, |&(c, _)| c)
            .map(|pos| self.cells[pos].1)
            .unwrap_or(0)
    }

    pub fn cells(&self) -> &[(u32, u64)] {
        &self.cells
    }

    pub fn total(&self) -> u64 {
        self.cells.iter().map(|&(_, c)| c).sum()
    }

    pub fn is_empty(&self) -> bool {
        self.cells.is_empty()
    }
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct WordCounts {
    pub left: ContextCounts,
    pub right: ContextCounts,
}

impl WordCounts {
    pub fn side(&self, side: Side) -> &ContextCounts {
        match side {
            Side::Left => &self.left,
            Side::Right => &self.right,
        }
    }

    fn side_mut(&mut self, side: Side) -> &mut ContextCounts {
        match side {
            Side::Left => &mut self.left,
            Side::Right => &mut self.right,
        }
    }
}

/// Mutable left/right bigram counts of every word against the indicator
/// vocabulary. Keys are lowercased surfaces. Counts never decrease.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CountStore {
    n: usize,
    words: HashMap<String, WordCounts>,
    total_tokens_seen: u64,
}

impl CountStore {
    pub fn new(n: usize) -> Self {
        CountStore {
            n,
            words: HashMap::new(),
            total_tokens_seen: 0,
        }
    }

    /// Fresh store holding the counts of every sentence of `corpora`.
    pub fn from_corpora<'a, I>(vocab: &IndicatorVocab, corpora: I) -> Result<Self>
    where
        I: IntoIterator<Item = &'a Corpus>,
    {
        let mut store = CountStore::new(vocab.n());
        for corpus in corpora {
            store.accumulate_corpus(vocab, corpus)?;
        }
        Ok(store)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    /// Index of the omitted-context cell.
    pub fn omitted_cell(&self) -> u32 {
        self.n as u32
    }

    pub fn total_tokens_seen(&self) -> u64 {
        self.total_tokens_seen
    }

    pub fn word_count(&self) -> usize {
        self.words.len()
    }

    /// Adds the bigram counts of one sentence.
    ///
    /// For each adjacent pair `(u, w)` the cell of `u` in `w`'s left counts
    /// and the cell of `w` in `u`'s right counts are incremented; words
    /// outside the vocabulary go to the omitted-context cell. A boundary
    /// pseudo-token before the first and after the last token is counted in
    /// the omitted-context cell only.
    pub fn accumulate(&mut self, vocab: &IndicatorVocab, sentence: &Sentence) -> Result<()> {
        if vocab.n() != self.n {
            return Err(Error::DimensionMismatch {
                expected: self.n,
                actual: vocab.n(),
            });
        }
        let omitted = self.omitted_cell();
        let folded: Vec<_> = sentence.surfaces().map(fold_case).collect();
        let cells: Vec<u32> = folded
            .iter()
            .map(|w| vocab.index_of(w).unwrap_or(omitted))
            .collect();
        let len = folded.len();
        for (i, word) in folded.iter().enumerate() {
            let left = if i == 0 { omitted } else { cells[i - 1] };
            let right = if i + 1 == len { omitted } else { cells[i + 1] };
            let entry = match self.words.get_mut(word.as_ref()) {
                Some(e) => e,
                None => self.words.entry(word.to_string()).or_default(),
            };
            entry.left.increment(left, 1);
            entry.right.increment(right, 1);
        }
        self.total_tokens_seen += len as u64;
        Ok(())
    }

    pub fn accumulate_corpus(&mut self, vocab: &IndicatorVocab, corpus: &Corpus) -> Result<()> {
        for sentence in corpus.sentences() {
            self.accumulate(vocab, sentence)?;
        }
        Ok(())
    }

    /// Counts of a word (case-insensitive lookup).
    pub fn counts(&self, word: &str) -> Option<&WordCounts> {
        self.words.get(fold_case(word).as_ref())
    }

    pub fn cell(&self, word: &str, side: Side, cell: u32) -> u64 {
        self.counts(word).map_or(0, |c| c.side(side).get(cell))
    }

    /// Sum over every cell of every word on one side.
    pub fn side_total(&self, side: Side) -> u64 {
        self.words.values().map(|c| c.side(side).total()).sum()
    }

    /// Sum over every cell of both sides.
    pub fn total_count(&self) -> u64 {
        self.side_total(Side::Left) + self.side_total(Side::Right)
    }

    /// Words in byte order.
    pub fn sorted_words(&self) -> Vec<(&str, &WordCounts)> {
        let mut words: Vec<_> = self.words.iter().map(|(w, c)| (w.as_str(), c)).collect();
        words.sort_unstable_by(|a, b| a.0.cmp(b.0));
        words
    }

    /// L2-normalized tf-weighted sparse block for `word`, as sorted
    /// `(cell, weight)` pairs. Unknown words give an empty block.
    pub fn distributional_block(&self, word: &str, side: Side) -> Vec<(u32, f64)> {
        let Some(counts) = self.counts(word) else {
            return Vec::new();
        };
        weighted_block(counts.side(side))
    }

    /// Dense distributional vector of length `n + 1`.
    pub fn distributional_vector(&self, word: &str, side: Side) -> Vec<f64> {
        let mut out = vec![0.0; self.n + 1];
        for (cell, weight) in self.distributional_block(word, side) {
            out[cell as usize] = weight;
        }
        out
    }

    /// Inserts raw counts; used when loading a serialized store.
    pub(crate) fn insert_counts(&mut self, word: String, side: Side, cells: &[(u32, u64)]) {
        let entry = self.words.entry(word).or_default();
        for &(cell, count) in cells {
            entry.side_mut(side).increment(cell, count);
        }
    }

    pub(crate) fn set_total_tokens_seen(&mut self, total: u64) {
        self.total_tokens_seen = total;
    }

    /// Canonical text of the counts: header line then one line per non-empty
    /// side of every word, in byte order of words.
    pub(crate) fn write_records(&self, out: &mut String) {
        let _ = writeln!(out, "n\t{}", self.n);
        let _ = writeln!(out, "total_tokens\t{}", self.total_tokens_seen);
        let words = self.sorted_words();
        let records: usize = words
            .iter()
            .map(|(_, c)| usize::from(!c.left.is_empty()) + usize::from(!c.right.is_empty()))
            .sum();
        let _ = writeln!(out, "records\t{records}");
        for (word, counts) in words {
            for side in [Side::Left, Side::Right] {
                let cells = counts.side(side);
                if cells.is_empty() {
                    continue;
                }
                let _ = write!(out, "{word}\t{}\t", side.code());
                for (k, (cell, count)) in cells.cells().iter().enumerate() {
                    if k > 0 {
                        out.push(' ');
                    }
                    let _ = write!(out, "{cell}:{count}");
                }
                out.push('\n');
            }
        }
    }

    /// SHA-256 over the canonical count records, as lowercase hex.
    pub fn digest(&self) -> String {
        let mut text = String::new();
        self.write_records(&mut text);
        hex(&Sha256::digest(text.as_bytes()))
    }
}

pub(crate) fn hex(bytes: &[u8]) -> String {
    bytes.iter().fold(String::with_capacity(bytes.len() * 2), |mut s, b| {
        let _ = write!(s, "{b:02x}");
        s
    })
}

pub(crate) fn weighted_block(counts: &ContextCounts) -> Vec<(u32, f64)> {
    let mut block: Vec<(u32, f64)> = counts
        .cells()
        .iter()
        .map(|&(cell, count)| (cell, tf_weight(count)))
        .collect();
    let norm = block.iter().map(|&(_, w)| w * w).sum::<f64>().sqrt();
    if norm > 0.0 {
        block.iter_mut().for_each(|(_, w)| *w /= norm);
    }
    block
}
