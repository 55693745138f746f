//! Measurement protocol: token categories, accuracy breakdowns, repeated
//! subsampling, significance tests and time-course curves.

use std::collections::HashSet;
use std::fmt;

use crate::adaptation::{Mode, PredictionRecord};
use crate::corpus::Corpus;
use crate::error::{Error, Result};

mod report;
mod sampling;
mod stats;
mod timecourse;

pub use report::{write_metrics_csv, write_sample_stats_csv, write_time_course_csv};
pub use sampling::{repeated_sampling, CategoryStats, SampleStats};
pub use stats::{equal_proportion_test, mean_and_std, ProportionTest};
pub use timecourse::{occurrence_range_error, time_course, Bin, TimeCourse, DEFAULT_BIN_WIDTH};

/// Position of a test surface relative to the small and big training
/// vocabularies.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Overlap {
    /// In both vocabularies.
    Known,
    /// In the big vocabulary only.
    Shifted,
    /// In neither.
    OutOfVocabulary,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct TokenCategory {
    pub overlap: Overlap,
    /// The word occurs in the test data with a tag never seen with it in
    /// training.
    pub unseen: bool,
    /// The word is absent from the session's training data.
    pub unknown: bool,
}

/// Reporting buckets.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Category {
    All,
    Kn,
    Shft,
    Oov,
    Unknown,
    Unseen,
    Known,
}

impl Category {
    pub const ALL: [Category; 7] = [
        Category::All,
        Category::Kn,
        Category::Shft,
        Category::Oov,
        Category::Unknown,
        Category::Unseen,
        Category::Known,
    ];

    pub fn label(self) -> &'static str {
        match self {
            Category::All => "ALL",
            Category::Kn => "KN",
            Category::Shft => "SHFT",
            Category::Oov => "OOV",
            Category::Unknown => "UNKNOWN",
            Category::Unseen => "UNSEEN",
            Category::Known => "KNOWN",
        }
    }

    pub fn contains(self, token: &TokenCategory) -> bool {
        match self {
            Category::All => true,
            Category::Kn => token.overlap == Overlap::Known,
            Category::Shft => token.overlap == Overlap::Shifted,
            Category::Oov => token.overlap == Overlap::OutOfVocabulary,
            Category::Unknown => token.unknown,
            Category::Unseen => token.unseen,
            Category::Known => !token.unknown,
        }
    }
}

impl fmt::Display for Category {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.label())
    }
}

/// KN / SHFT / OOV for every test token, in corpus order. Lookups are
/// case-sensitive. The unseen and unknown flags start out false; see
/// [`flag_tokens`].
pub fn categorize(
    test: &Corpus,
    vocab_small: &HashSet<String>,
    vocab_big: &HashSet<String>,
) -> Result<Vec<TokenCategory>> {
    if let Some(w) = vocab_small.iter().find(|w| !vocab_big.contains(*w)) {
        return Err(Error::InvalidArgument(format!(
            "small vocabulary is not a subset of the big one ({w:?})"
        )));
    }
    Ok(test
        .tokens()
        .map(|t| {
            let overlap = match (
                vocab_small.contains(&t.surface),
                vocab_big.contains(&t.surface),
            ) {
                (true, _) => Overlap::Known,
                (false, true) => Overlap::Shifted,
                (false, false) => Overlap::OutOfVocabulary,
            };
            TokenCategory {
                overlap,
                unseen: false,
                unknown: false,
            }
        })
        .collect())
}

/// Sets the unknown flag (surface not in `training_vocab`) and the unseen
/// flag (surface in `unseen`) of every token.
pub fn flag_tokens(
    test: &Corpus,
    categories: &mut [TokenCategory],
    training_vocab: &HashSet<String>,
    unseen: &HashSet<String>,
) -> Result<()> {
    if categories.len() != test.token_count() {
        return Err(Error::DimensionMismatch {
            expected: test.token_count(),
            actual: categories.len(),
        });
    }
    for (cat, token) in categories.iter_mut().zip(test.tokens()) {
        cat.unknown = !training_vocab.contains(&token.surface);
        cat.unseen = unseen.contains(&token.surface);
    }
    Ok(())
}

/// Test surfaces with at least one occurrence whose gold tag was never
/// observed with that surface in training.
pub fn unseen_words(train: &Corpus, test: &Corpus) -> Result<HashSet<String>> {
    if !train.is_labeled() || !test.is_labeled() {
        return Err(Error::InvalidArgument(
            "unseen words need labeled corpora".into(),
        ));
    }
    let profile = train.tag_profile();
    Ok(test
        .tokens()
        .filter(|t| {
            let tag = t.gold_tag.as_deref().expect("labeled");
            !profile
                .get(t.surface.as_str())
                .is_some_and(|tags| tags.contains(tag))
        })
        .map(|t| t.surface.clone())
        .collect())
}

/// Labels of the experimental condition a report belongs to.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Default)]
pub struct Condition {
    pub labeled: String,
    pub unlabeled: String,
    pub mode: Option<Mode>,
}

impl Condition {
    pub fn new(labeled: &str, unlabeled: &str, mode: Mode) -> Self {
        Condition {
            labeled: labeled.to_owned(),
            unlabeled: unlabeled.to_owned(),
            mode: Some(mode),
        }
    }

    pub fn mode_label(&self) -> &str {
        self.mode.map_or("", Mode::as_str)
    }
}

impl fmt::Display for Condition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}/{}/{}", self.labeled, self.unlabeled, self.mode_label())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct CategoryCount {
    pub tokens: u64,
    pub correct: u64,
}

impl CategoryCount {
    pub fn accuracy(&self) -> Option<f64> {
        (self.tokens > 0).then(|| self.correct as f64 / self.tokens as f64)
    }

    pub fn error(&self) -> Option<f64> {
        (self.tokens > 0).then(|| (self.tokens - self.correct) as f64 / self.tokens as f64)
    }
}

/// Token and correct counts per category.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct MetricsReport {
    pub condition: Condition,
    counts: [CategoryCount; 7],
}

impl MetricsReport {
    pub fn with_condition(mut self, condition: Condition) -> Self {
        self.condition = condition;
        self
    }

    pub fn count(&self, category: Category) -> CategoryCount {
        self.counts[category as usize]
    }

    pub fn accuracy(&self, category: Category) -> Option<f64> {
        self.count(category).accuracy()
    }

    pub fn error(&self, category: Category) -> Option<f64> {
        self.count(category).error()
    }

    pub fn iter(&self) -> impl Iterator<Item = (Category, CategoryCount)> + '_ {
        Category::ALL.iter().map(|&c| (c, self.count(c)))
    }

    /// KN + SHFT + OOV token counts equal the ALL count.
    pub fn partition_holds(&self) -> bool {
        let parts = [Category::Kn, Category::Shft, Category::Oov];
        let tokens: u64 = parts.iter().map(|&c| self.count(c).tokens).sum();
        let correct: u64 = parts.iter().map(|&c| self.count(c).correct).sum();
        tokens == self.count(Category::All).tokens && correct == self.count(Category::All).correct
    }
}

/// Accuracy breakdown over aligned predictions, gold tags and categories.
pub fn score<P, G>(predictions: &[P], gold: &[G], categories: &[TokenCategory]) -> Result<MetricsReport>
where
    P: AsRef<str>,
    G: AsRef<str>,
{
    if predictions.len() != gold.len() || gold.len() != categories.len() {
        return Err(Error::InvalidArgument(format!(
            "length mismatch: {} predictions, {} gold tags, {} categories",
            predictions.len(),
            gold.len(),
            categories.len()
        )));
    }
    let mut report = MetricsReport::default();
    for ((p, g), cat) in predictions.iter().zip(gold).zip(categories) {
        let correct = p.as_ref() == g.as_ref();
        for c in Category::ALL {
            if c.contains(cat) {
                let count = &mut report.counts[c as usize];
                count.tokens += 1;
                count.correct += u64::from(correct);
            }
        }
    }
    Ok(report)
}

/// [`score`] over a session's prediction log.
pub fn score_log(log: &[PredictionRecord], categories: &[TokenCategory]) -> Result<MetricsReport> {
    let gold = log
        .iter()
        .map(|r| {
            r.gold
                .as_deref()
                .ok_or_else(|| Error::InvalidArgument("prediction log lacks gold tags".into()))
        })
        .collect::<Result<Vec<_>>>()?;
    let predicted: Vec<&str> = log.iter().map(|r| r.predicted.as_str()).collect();
    score(&predicted, &gold, categories)
}
