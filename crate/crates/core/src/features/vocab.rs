use std::collections::HashMap;

use super::fold_case;
use crate::corpus::Corpus;
use crate::error::{Error, Result};

/// The `n` most frequent lowercased surfaces. Index `i` of the vocabulary
/// is the word of frequency rank `i + 1`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct IndicatorVocab {
    words: Vec<String>,
    index: HashMap<String, u32>,
}

impl IndicatorVocab {
    /// Counts lowercased surfaces over all corpora and keeps the `n` most
    /// frequent. Ties are broken lexicographically.
    pub fn build<'a, I>(corpora: I, n: usize) -> Result<Self>
    where
        I: IntoIterator<Item = &'a Corpus>,
    {
        if n == 0 {
            return Err(Error::InvalidArgument("n must be at least 1".into()));
        }
        let mut counts: HashMap<String, u64> = HashMap::new();
        let mut seen_any = false;
        for corpus in corpora {
            for token in corpus.tokens() {
                seen_any = true;
                *counts.entry(fold_case(&token.surface).into_owned()).or_default() += 1;
            }
        }
        if !seen_any {
            return Err(Error::InvalidArgument(
                "cannot build indicator vocabulary from empty input".into(),
            ));
        }
        let mut ranked: Vec<(String, u64)> = counts.into_iter().collect();
        ranked.sort_by(|a, b| b.1.cmp(&a.1).then_with(|| a.0.cmp(&b.0)));
        ranked.truncate(n);
        IndicatorVocab::from_words(ranked.into_iter().map(|(w, _)| w).collect())
    }

    /// Vocabulary with the given rank order.
    pub fn from_words(words: Vec<String>) -> Result<Self> {
        if words.is_empty() {
            return Err(Error::InvalidArgument("empty indicator vocabulary".into()));
        }
        let mut index = HashMap::with_capacity(words.len());
        for (i, w) in words.iter().enumerate() {
            if index.insert(w.clone(), i as u32).is_some() {
                return Err(Error::InvalidArgument(format!(
                    "duplicate indicator word {w:?}"
                )));
            }
        }
        Ok(IndicatorVocab { words, index })
    }

    /// Number of indicator words; distributional vectors have `n() + 1` cells.
    pub fn n(&self) -> usize {
        self.words.len()
    }

    pub fn words(&self) -> &[String] {
        &self.words
    }

    /// Zero-based cell of an already lowercased word.
    pub fn index_of(&self, folded: &str) -> Option<u32> {
        self.index.get(folded).copied()
    }

    /// One-based frequency rank, case-insensitive.
    pub fn rank(&self, word: &str) -> Option<usize> {
        self.index_of(&fold_case(word)).map(|i| i as usize + 1)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::corpus::read_unlabeled;

    fn vocab(text: &str, n: usize) -> Vec<String> {
        let corpus = read_unlabeled(text.as_bytes()).unwrap();
        IndicatorVocab::build([&corpus], n).unwrap().words().to_vec()
    }

    #[test]
    fn most_frequent_first() {
        assert_eq!(vocab("a b a\n", 2), ["a", "b"]);
    }

    #[test]
    fn smaller_than_n() {
        assert_eq!(vocab("x y\n", 5), ["x", "y"]);
    }

    #[test]
    fn lexicographic_ties() {
        assert_eq!(vocab("a b\n", 1), ["a"]);
        assert_eq!(vocab("c b a\n", 3), ["a", "b", "c"]);
    }

    #[test]
    fn counts_are_case_folded() {
        assert_eq!(vocab("The dog the\nA\n", 1), ["the"]);
    }

    #[test]
    fn spans_corpora() {
        let a = read_unlabeled("x y\n".as_bytes()).unwrap();
        let b = read_unlabeled("y z\n".as_bytes()).unwrap();
        let v = IndicatorVocab::build([&a, &b], 1).unwrap();
        assert_eq!(v.words(), ["y"]);
        assert_eq!(v.rank("Y"), Some(1));
        assert_eq!(v.rank("x"), None);
    }

    #[test]
    fn rejects_empty_and_zero() {
        let a = read_unlabeled("x\n".as_bytes()).unwrap();
        assert!(IndicatorVocab::build([&a], 0).is_err());
        assert!(IndicatorVocab::build(std::iter::empty::<&Corpus>(), 3).is_err());
        assert!(IndicatorVocab::from_words(vec!["a".into(), "a".into()]).is_err());
    }
}
