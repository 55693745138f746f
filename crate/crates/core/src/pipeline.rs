//! End-to-end helpers: build representations, train, tag and run the
//! full experiment grid.

use std::collections::HashSet;
use std::fmt;
use std::str::FromStr;
use std::sync::Arc;

use crate::adaptation::{LogPolicy, Mode, PredictionRecord, TaggerSession};
use crate::classifier::{self, LinearModel, TrainConfig, TrainReport};
use crate::corpus::{sample_fraction, Corpus};
use crate::error::{Error, Result};
use crate::eval::{
    self, categorize, equal_proportion_test, flag_tokens, repeated_sampling, score_log,
    time_course, unseen_words, Category, Condition, MetricsReport, ProportionTest, SampleStats,
    TimeCourse, TokenCategory,
};
use crate::features::{build_representations, CountStore, Lexicons, RepresentationConfig};

/// Frozen lexicons, the count store built before training, and the model.
#[derive(Debug, Clone)]
pub struct Tagger {
    pub lexicons: Arc<Lexicons>,
    pub store: Arc<CountStore>,
    pub model: Arc<LinearModel>,
}

impl Tagger {
    /// Builds representations from `representation_corpora` and trains on
    /// `train`.
    pub fn build(
        train: &Corpus,
        representation_corpora: &[&Corpus],
        rep_config: RepresentationConfig,
        train_config: &TrainConfig,
    ) -> Result<(Tagger, TrainReport)> {
        let (lexicons, store) = build_representations(representation_corpora, rep_config)?;
        let (model, report) = train_model(train, &lexicons, &store, train_config)?;
        Ok((
            Tagger {
                lexicons: Arc::new(lexicons),
                store: Arc::new(store),
                model: Arc::new(model),
            },
            report,
        ))
    }

    pub fn session(&self, mode: Mode) -> Result<TaggerSession> {
        TaggerSession::new(
            Arc::clone(&self.model),
            Arc::clone(&self.lexicons),
            Arc::clone(&self.store),
            mode,
        )
    }

    /// Tags `test` in a fresh session and returns the prediction log.
    pub fn run(&self, mode: Mode, test: &Corpus) -> Result<(TaggerSession, Vec<PredictionRecord>)> {
        let mut session = self.session(mode)?.with_log_policy(LogPolicy::Unbounded);
        session.tag_corpus(test)?;
        let log = session.take_log();
        Ok((session, log))
    }
}

/// Trains with token features drawn from a frozen store.
pub fn train_model(
    train: &Corpus,
    lexicons: &Lexicons,
    store: &CountStore,
    config: &TrainConfig,
) -> Result<(LinearModel, TrainReport)> {
    classifier::train_corpus(
        train,
        |s| lexicons.sentence_features(store, s),
        config,
        &lexicons.fingerprint(),
    )
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum LabeledSize {
    Small,
    Big,
}

impl LabeledSize {
    pub fn label(self) -> &'static str {
        match self {
            LabeledSize::Small => "l:small",
            LabeledSize::Big => "l:big",
        }
    }
}

impl fmt::Display for LabeledSize {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.label())
    }
}

impl FromStr for LabeledSize {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s.trim() {
            "small" | "l:small" => Ok(LabeledSize::Small),
            "big" | "l:big" => Ok(LabeledSize::Big),
            other => Err(Error::InvalidArgument(format!("unknown labeled size {other:?}"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum UnlabeledSize {
    /// Representations from the labeled training data only.
    None,
    /// Representations from labeled plus unlabeled data.
    Big,
}

impl UnlabeledSize {
    pub fn label(self) -> &'static str {
        match self {
            UnlabeledSize::None => "u:0",
            UnlabeledSize::Big => "u:big",
        }
    }
}

impl FromStr for UnlabeledSize {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s.trim() {
            "0" | "u:0" | "none" => Ok(UnlabeledSize::None),
            "big" | "u:big" => Ok(UnlabeledSize::Big),
            other => Err(Error::InvalidArgument(format!("unknown unlabeled size {other:?}"))),
        }
    }
}

#[derive(Debug, Clone)]
pub struct ExperimentSettings {
    /// The big labeled training set.
    pub train: Corpus,
    /// Extra representation corpora for the u:big condition.
    pub unlabeled: Vec<Corpus>,
    pub test: Corpus,
    /// Share of the big training set forming the small one.
    pub small_fraction: f64,
    pub labeled_sizes: Vec<LabeledSize>,
    pub unlabeled_sizes: Vec<UnlabeledSize>,
    pub modes: Vec<Mode>,
    pub representation: RepresentationConfig,
    pub training: TrainConfig,
    /// Repeated-sampling trials; 0 skips them.
    pub trials: usize,
    pub fraction: f64,
    pub seed: u64,
    pub bin_width: usize,
}

impl ExperimentSettings {
    pub fn new(train: Corpus, test: Corpus) -> Self {
        ExperimentSettings {
            train,
            unlabeled: Vec::new(),
            test,
            small_fraction: 0.1,
            labeled_sizes: vec![LabeledSize::Small, LabeledSize::Big],
            unlabeled_sizes: vec![UnlabeledSize::None],
            modes: Mode::ALL.to_vec(),
            representation: RepresentationConfig::default(),
            training: TrainConfig::default(),
            trials: 20,
            fraction: 0.5,
            seed: 0,
            bin_width: eval::DEFAULT_BIN_WIDTH,
        }
    }
}

/// Two-proportion test between two modes of the same condition.
#[derive(Debug, Clone, PartialEq)]
pub struct ModeComparison {
    pub labeled: String,
    pub unlabeled: String,
    pub category: Category,
    pub mode_a: Mode,
    pub mode_b: Mode,
    pub error_a: f64,
    pub error_b: f64,
    pub tokens: u64,
    pub test: ProportionTest,
}

#[derive(Debug, Clone, Default)]
pub struct ExperimentResults {
    pub reports: Vec<MetricsReport>,
    pub time_courses: Vec<(Condition, TimeCourse)>,
    pub sample_stats: Vec<SampleStats>,
    pub comparisons: Vec<ModeComparison>,
    pub train_reports: Vec<(String, TrainReport)>,
}

/// Categories of every token of `test` for a session trained on `train`.
pub fn token_categories(
    test: &Corpus,
    train: &Corpus,
    vocab_small: &HashSet<String>,
    vocab_big: &HashSet<String>,
) -> Result<Vec<TokenCategory>> {
    let mut cats = categorize(test, vocab_small, vocab_big)?;
    let unseen = unseen_words(train, test)?;
    flag_tokens(test, &mut cats, &train.vocabulary(), &unseen)?;
    Ok(cats)
}

/// Runs every requested labeled × unlabeled × mode combination.
pub fn run_experiment(settings: &ExperimentSettings) -> Result<ExperimentResults> {
    if !settings.test.is_labeled() || !settings.train.is_labeled() {
        return Err(Error::InvalidArgument(
            "experiments need labeled training and test data".into(),
        ));
    }
    if settings.unlabeled_sizes.contains(&UnlabeledSize::Big) && settings.unlabeled.is_empty() {
        return Err(Error::InvalidArgument(
            "u:big requested but no unlabeled corpora given".into(),
        ));
    }
    let small = sample_fraction(&settings.train, settings.small_fraction, settings.seed)?;
    let vocab_small = small.vocabulary();
    let vocab_big = settings.train.vocabulary();
    let mut results = ExperimentResults::default();

    for &labeled in &settings.labeled_sizes {
        let train = match labeled {
            LabeledSize::Small => &small,
            LabeledSize::Big => &settings.train,
        };
        let categories = token_categories(&settings.test, train, &vocab_small, &vocab_big)?;
        for &unlabeled in &settings.unlabeled_sizes {
            let mut corpora = vec![train];
            if unlabeled == UnlabeledSize::Big {
                corpora.extend(settings.unlabeled.iter());
            }
            let (tagger, train_report) =
                Tagger::build(train, &corpora, settings.representation, &settings.training)?;
            results.train_reports.push((
                format!("{}/{}", labeled.label(), unlabeled.label()),
                train_report,
            ));

            let mut by_mode = Vec::new();
            for &mode in &settings.modes {
                let condition = Condition::new(labeled.label(), unlabeled.label(), mode);
                let (_, log) = tagger.run(mode, &settings.test)?;
                let report = score_log(&log, &categories)?.with_condition(condition.clone());
                results
                    .time_courses
                    .push((condition.clone(), time_course(&log, &categories, settings.bin_width)?));
                if settings.trials > 0 {
                    let stats = repeated_sampling(
                        &settings.test,
                        |sample, _| {
                            let cats = token_categories(sample, train, &vocab_small, &vocab_big)?;
                            let (_, log) = tagger.run(mode, sample)?;
                            Ok(score_log(&log, &cats)?.with_condition(condition.clone()))
                        },
                        settings.trials,
                        settings.fraction,
                        settings.seed,
                    )?;
                    results.sample_stats.push(stats);
                }
                by_mode.push(report.clone());
                results.reports.push(report);
            }
            results.comparisons.extend(compare_modes(&by_mode)?);
        }
    }
    Ok(results)
}

/// Online against every other mode, on ALL and OOV.
fn compare_modes(reports: &[MetricsReport]) -> Result<Vec<ModeComparison>> {
    let Some(online) = reports
        .iter()
        .find(|r| r.condition.mode == Some(Mode::Online))
    else {
        return Ok(Vec::new());
    };
    let mut out = Vec::new();
    for other in reports.iter().filter(|r| r.condition.mode != Some(Mode::Online)) {
        for category in [Category::All, Category::Oov, Category::Unknown] {
            let (a, b) = (online.count(category), other.count(category));
            let (Some(error_a), Some(error_b)) = (a.error(), b.error()) else {
                continue;
            };
            out.push(ModeComparison {
                labeled: online.condition.labeled.clone(),
                unlabeled: online.condition.unlabeled.clone(),
                category,
                mode_a: Mode::Online,
                mode_b: other.condition.mode.expect("mode set"),
                error_a,
                error_b,
                tokens: a.tokens,
                test: equal_proportion_test(error_a, a.tokens, error_b, b.tokens)?,
            });
        }
    }
    Ok(out)
}

pub fn write_comparisons_csv<W: std::io::Write>(out: W, comparisons: &[ModeComparison]) -> Result<()> {
    let mut w = csv::WriterBuilder::new()
        .terminator(csv::Terminator::Any(b'\n'))
        .from_writer(out);
    w.write_record([
        "labeled", "unlabeled", "category", "mode_a", "mode_b", "error_a", "error_b", "tokens", "z",
        "significant",
    ])?;
    for c in comparisons {
        w.write_record([
            c.labeled.as_str(),
            c.unlabeled.as_str(),
            c.category.label(),
            c.mode_a.as_str(),
            c.mode_b.as_str(),
            &format!("{:.6}", c.error_a),
            &format!("{:.6}", c.error_b),
            &c.tokens.to_string(),
            &format!("{:.6}", c.test.z),
            if c.test.significant { "true" } else { "false" },
        ])?;
    }
    w.flush()?;
    Ok(())
}
