use super::{Category, TokenCategory};
use crate::adaptation::PredictionRecord;
use crate::error::{Error, Result};

pub const DEFAULT_BIN_WIDTH: usize = 500;

/// Occurrences `start..end` of one category, in tagging order.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Bin {
    pub start: usize,
    pub end: usize,
    pub errors: usize,
}

impl Bin {
    pub fn tokens(&self) -> usize {
        self.end - self.start
    }

    pub fn error(&self) -> f64 {
        self.errors as f64 / self.tokens() as f64
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct TimeCourse {
    pub bin_width: usize,
    pub curves: Vec<(Category, Vec<Bin>)>,
}

impl TimeCourse {
    pub fn curve(&self, category: Category) -> &[Bin] {
        self.curves
            .iter()
            .find(|(c, _)| *c == category)
            .map_or(&[], |(_, bins)| bins.as_slice())
    }

    /// Bin errors averaged with bin sizes as weights.
    pub fn weighted_error(&self, category: Category) -> Option<f64> {
        let bins = self.curve(category);
        let tokens: usize = bins.iter().map(Bin::tokens).sum();
        (tokens > 0).then(|| {
            bins.iter()
                .map(|b| b.error() * b.tokens() as f64)
                .sum::<f64>()
                / tokens as f64
        })
    }
}

fn outcomes(
    log: &[PredictionRecord],
    categories: &[TokenCategory],
    category: Category,
) -> Result<Vec<bool>> {
    if log.len() != categories.len() {
        return Err(Error::DimensionMismatch {
            expected: categories.len(),
            actual: log.len(),
        });
    }
    log.iter()
        .zip(categories)
        .filter(|(_, c)| category.contains(c))
        .map(|(r, _)| {
            r.is_correct()
                .ok_or_else(|| Error::InvalidArgument("prediction log lacks gold tags".into()))
        })
        .collect()
}

/// Bins each category's occurrences, in tagging order, into consecutive
/// groups of `bin_width` (the last one may be shorter).
pub fn time_course(
    log: &[PredictionRecord],
    categories: &[TokenCategory],
    bin_width: usize,
) -> Result<TimeCourse> {
    if bin_width == 0 {
        return Err(Error::InvalidArgument("bin width must be positive".into()));
    }
    let mut curves = Vec::with_capacity(Category::ALL.len());
    for category in Category::ALL {
        let outcomes = outcomes(log, categories, category)?;
        let bins = outcomes
            .chunks(bin_width)
            .enumerate()
            .map(|(k, chunk)| Bin {
                start: k * bin_width,
                end: k * bin_width + chunk.len(),
                errors: chunk.iter().filter(|ok| !**ok).count(),
            })
            .collect();
        curves.push((category, bins));
    }
    Ok(TimeCourse { bin_width, curves })
}

/// Error over the occurrences of `category` whose position, as a fraction
/// of all its occurrences, lies in `[from, to)`.
pub fn occurrence_range_error(
    log: &[PredictionRecord],
    categories: &[TokenCategory],
    category: Category,
    from: f64,
    to: f64,
) -> Result<Option<f64>> {
    if !(0.0..=1.0).contains(&from) || !(0.0..=1.0).contains(&to) || from > to {
        return Err(Error::InvalidArgument(format!("invalid range [{from}, {to})")));
    }
    let outcomes = outcomes(log, categories, category)?;
    let n = outcomes.len() as f64;
    let slice = &outcomes[(from * n).floor() as usize..(to * n).floor() as usize];
    Ok((!slice.is_empty())
        .then(|| slice.iter().filter(|ok| !**ok).count() as f64 / slice.len() as f64))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::eval::Overlap;

    fn log(results: &[bool]) -> (Vec<PredictionRecord>, Vec<TokenCategory>) {
        let records = results
            .iter()
            .map(|&ok| PredictionRecord {
                surface: "w".into(),
                gold: Some("A".into()),
                predicted: if ok { "A" } else { "B" }.into(),
            })
            .collect();
        let cats = results
            .iter()
            .map(|_| TokenCategory {
                overlap: Overlap::OutOfVocabulary,
                unseen: false,
                unknown: true,
            })
            .collect();
        (records, cats)
    }

    #[test]
    fn all_correct_is_flat_zero() {
        let (l, c) = log(&[true; 7]);
        let tc = time_course(&l, &c, 3).unwrap();
        let bins = tc.curve(Category::Unknown);
        assert_eq!(bins.len(), 3);
        assert!(bins.iter().all(|b| b.error() == 0.0));
        assert_eq!(bins[2], Bin { start: 6, end: 7, errors: 0 });
        assert!(tc.curve(Category::Kn).is_empty());
    }

    #[test]
    fn wide_bin_equals_category_error() {
        let (l, c) = log(&[true, false, false, true, true]);
        let tc = time_course(&l, &c, 100).unwrap();
        let bins = tc.curve(Category::Oov);
        assert_eq!(bins.len(), 1);
        assert!((bins[0].error() - 0.4).abs() < 1e-15);
    }

    #[test]
    fn quartiles() {
        let (l, c) = log(&[false, false, true, true, true, true, true, true]);
        let first = occurrence_range_error(&l, &c, Category::Unknown, 0.0, 0.25).unwrap();
        let last = occurrence_range_error(&l, &c, Category::Unknown, 0.75, 1.0).unwrap();
        assert_eq!(first, Some(1.0));
        assert_eq!(last, Some(0.0));
        assert_eq!(
            occurrence_range_error(&l, &c, Category::Kn, 0.0, 0.25).unwrap(),
            None
        );
    }

    #[test]
    fn rejects_zero_width_and_mismatch() {
        let (l, c) = log(&[true]);
        assert!(time_course(&l, &c, 0).is_err());
        assert!(time_course(&l, &c[..0], 1).is_err());
    }
}
