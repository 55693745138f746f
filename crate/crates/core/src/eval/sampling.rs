use rayon::prelude::*;

use super::{mean_and_std, Category, Condition, MetricsReport};
use crate::corpus::{sample_fraction, Corpus};
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CategoryStats {
    pub mean: f64,
    pub std: f64,
    /// Trials in which the category had at least one token.
    pub trials_counted: usize,
    pub min: f64,
    pub max: f64,
}

impl CategoryStats {
    pub fn from_errors(errors: &[f64]) -> Option<Self> {
        let (mean, std) = mean_and_std(errors)?;
        Some(CategoryStats {
            mean,
            std,
            trials_counted: errors.len(),
            min: errors.iter().copied().fold(f64::INFINITY, f64::min),
            max: errors.iter().copied().fold(f64::NEG_INFINITY, f64::max),
        })
    }
}

/// Per-category error mean and standard deviation over repeated trials.
#[derive(Debug, Clone, PartialEq)]
pub struct SampleStats {
    pub condition: Condition,
    pub trials: usize,
    pub fraction: f64,
    pub seed: u64,
    /// `None` when fewer than two trials had tokens of the category.
    pub categories: Vec<(Category, Option<CategoryStats>)>,
    pub reports: Vec<MetricsReport>,
}

impl SampleStats {
    pub fn from_reports(reports: Vec<MetricsReport>, fraction: f64, seed: u64) -> Result<Self> {
        if reports.len() < 2 {
            return Err(Error::InvalidArgument("need at least 2 trials".into()));
        }
        let categories = Category::ALL
            .iter()
            .map(|&c| {
                let errors: Vec<f64> = reports.iter().filter_map(|r| r.error(c)).collect();
                (c, CategoryStats::from_errors(&errors))
            })
            .collect();
        Ok(SampleStats {
            condition: reports[0].condition.clone(),
            trials: reports.len(),
            fraction,
            seed,
            categories,
            reports,
        })
    }

    pub fn get(&self, category: Category) -> Option<CategoryStats> {
        self.categories
            .iter()
            .find(|(c, _)| *c == category)
            .and_then(|(_, s)| *s)
    }
}

/// Runs `trials` independent trials. Trial `i` samples `fraction` of the
/// corpus with seed `seed + i` and hands the sample and that seed to
/// `runner`, which should build a fresh session. Trials may run in
/// parallel; results are reduced in trial order.
pub fn repeated_sampling<F>(
    corpus: &Corpus,
    runner: F,
    trials: usize,
    fraction: f64,
    seed: u64,
) -> Result<SampleStats>
where
    F: Fn(&Corpus, u64) -> Result<MetricsReport> + Sync,
{
    if trials < 2 {
        return Err(Error::InvalidArgument("need at least 2 trials".into()));
    }
    if corpus.is_empty() {
        return Err(Error::NoSentences);
    }
    let reports = (0..trials as u64)
        .into_par_iter()
        .map(|i| {
            let trial_seed = seed.wrapping_add(i);
            let sample = sample_fraction(corpus, fraction, trial_seed)?;
            runner(&sample, trial_seed)
        })
        .collect::<Result<Vec<_>>>()?;
    SampleStats::from_reports(reports, fraction, seed)
}
