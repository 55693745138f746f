//! One-vs-rest linear tagger.
//!
//! Each tag gets an independent L2-regularized logistic model (positive =
//! tokens with that gold tag). Decoding takes the argmax of the per-tag
//! scores, with ties going to the tag that comes first in the tag order.

use rayon::prelude::*;

use crate::corpus::{Corpus, Sentence, TagSet};
use crate::error::{Error, Result};
use crate::sparse::SparseVector;

mod io;
pub mod logistic;

pub use io::MODEL_FORMAT_VERSION;
pub use logistic::{BinaryProblem, Dataset};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TrainConfig {
    pub regularization: f64,
    pub tolerance: f64,
    pub max_epochs: usize,
    pub seed: u64,
}

impl Default for TrainConfig {
    fn default() -> Self {
        TrainConfig {
            regularization: 1.0,
            tolerance: 1e-4,
            max_epochs: 50,
            seed: 0,
        }
    }
}

impl TrainConfig {
    fn validate(&self) -> Result<()> {
        if self.regularization.is_nan() || self.regularization <= 0.0 || self.tolerance.is_nan() || self.tolerance <= 0.0 || self.max_epochs == 0 {
            return Err(Error::InvalidArgument(format!(
                "regularization, tolerance and max_epochs must be positive: {self:?}"
            )));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct LinearModel {
    tags: TagSet,
    feature_dim: usize,
    weights: Vec<Vec<f64>>,
    biases: Vec<f64>,
    /// Fingerprint of the lexicons the features were built with.
    lexicon_fingerprint: String,
}

/// Per-tag training trace.
#[derive(Debug, Clone, PartialEq)]
pub struct TagTrace {
    pub tag: String,
    pub epochs: usize,
    pub converged: bool,
    pub losses: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct TrainReport {
    pub examples: usize,
    pub feature_dim: usize,
    /// Set when the training data has a single tag; the model then always
    /// predicts that tag.
    pub single_tag: bool,
    pub traces: Vec<TagTrace>,
}

impl TrainReport {
    pub fn max_epochs(&self) -> usize {
        self.traces.iter().map(|t| t.epochs).max().unwrap_or(0)
    }
}

impl LinearModel {
    pub fn new(
        tags: TagSet,
        weights: Vec<Vec<f64>>,
        biases: Vec<f64>,
        lexicon_fingerprint: impl Into<String>,
    ) -> Result<Self> {
        if tags.is_empty() || weights.len() != tags.len() || biases.len() != tags.len() {
            return Err(Error::InvalidArgument(
                "need one weight vector and bias per tag".into(),
            ));
        }
        let feature_dim = weights[0].len();
        if let Some(w) = weights.iter().find(|w| w.len() != feature_dim) {
            return Err(Error::DimensionMismatch {
                expected: feature_dim,
                actual: w.len(),
            });
        }
        Ok(LinearModel {
            tags,
            feature_dim,
            weights,
            biases,
            lexicon_fingerprint: lexicon_fingerprint.into(),
        })
    }

    pub fn tags(&self) -> &TagSet {
        &self.tags
    }

    pub fn feature_dim(&self) -> usize {
        self.feature_dim
    }

    pub fn weights(&self, tag: usize) -> &[f64] {
        &self.weights[tag]
    }

    pub fn bias(&self, tag: usize) -> f64 {
        self.biases[tag]
    }

    pub fn lexicon_fingerprint(&self) -> &str {
        &self.lexicon_fingerprint
    }

    /// `score_t = w_t · x + b_t`, in `O(nnz(x) · |tags|)`.
    pub fn scores(&self, x: &SparseVector) -> Result<Vec<f64>> {
        if x.dim() != self.feature_dim {
            return Err(Error::DimensionMismatch {
                expected: self.feature_dim,
                actual: x.dim(),
            });
        }
        Ok(self
            .weights
            .iter()
            .zip(&self.biases)
            .map(|(w, b)| x.dot_dense(w) + b)
            .collect())
    }

    /// Index of the best-scoring tag.
    pub fn predict_index(&self, x: &SparseVector) -> Result<usize> {
        Ok(argmax(&self.scores(x)?))
    }

    pub fn predict(&self, x: &SparseVector) -> Result<&str> {
        let i = self.predict_index(x)?;
        Ok(self.tags.get(i).expect("index within tag set"))
    }
}

/// First index holding the maximum.
pub fn argmax(scores: &[f64]) -> usize {
    let mut best = 0;
    for (i, &s) in scores.iter().enumerate().skip(1) {
        if s > scores[best] {
            best = i;
        }
    }
    best
}

/// Fits one binary model per tag. Tags are solved in parallel; results do
/// not depend on the thread count.
pub fn train(
    data: &Dataset,
    tags: &TagSet,
    config: &TrainConfig,
    lexicon_fingerprint: &str,
) -> Result<(LinearModel, TrainReport)> {
    config.validate()?;
    if data.is_empty() {
        return Err(Error::InvalidArgument("no training examples".into()));
    }
    if tags.is_empty() {
        return Err(Error::InvalidArgument("empty tag set".into()));
    }
    if let Some(&bad) = data.labels().iter().find(|&&l| l >= tags.len()) {
        return Err(Error::InvalidArgument(format!("label {bad} outside tag set")));
    }
    let dim = data.dim();
    if tags.len() == 1 {
        let model = LinearModel::new(tags.clone(), vec![vec![0.0; dim]], vec![0.0], lexicon_fingerprint)?;
        let report = TrainReport {
            examples: data.len(),
            feature_dim: dim,
            single_tag: true,
            traces: vec![TagTrace {
                tag: tags.tags()[0].clone(),
                epochs: 0,
                converged: true,
                losses: Vec::new(),
            }],
        };
        return Ok((model, report));
    }

    let solutions: Vec<logistic::Solution> = (0..tags.len())
        .into_par_iter()
        .map(|t| {
            let problem = BinaryProblem::new(data, t, config.regularization, config.seed);
            logistic::minimize(&problem, config.tolerance, config.max_epochs)
        })
        .collect();

    let mut weights = Vec::with_capacity(tags.len());
    let mut biases = Vec::with_capacity(tags.len());
    let mut traces = Vec::with_capacity(tags.len());
    for (tag, mut sol) in tags.tags().iter().zip(solutions) {
        biases.push(sol.params.pop().expect("bias parameter"));
        weights.push(sol.params);
        traces.push(TagTrace {
            tag: tag.clone(),
            epochs: sol.epochs,
            converged: sol.converged,
            losses: sol.losses,
        });
    }
    let model = LinearModel::new(tags.clone(), weights, biases, lexicon_fingerprint)?;
    Ok((
        model,
        TrainReport {
            examples: data.len(),
            feature_dim: dim,
            single_tag: false,
            traces,
        },
    ))
}

/// Featurizes every sentence of a labeled corpus and trains on it.
/// `featurize` returns one vector per token of the sentence.
pub fn train_corpus<F>(
    corpus: &Corpus,
    mut featurize: F,
    config: &TrainConfig,
    lexicon_fingerprint: &str,
) -> Result<(LinearModel, TrainReport)>
where
    F: FnMut(&Sentence) -> Result<Vec<SparseVector>>,
{
    if !corpus.is_labeled() {
        return Err(Error::InvalidArgument("training corpus must be labeled".into()));
    }
    if corpus.is_empty() {
        return Err(Error::NoSentences);
    }
    let tags = TagSet::from_corpus(corpus);
    let mut data: Option<Dataset> = None;
    for sentence in corpus.sentences() {
        let features = featurize(sentence)?;
        if features.len() != sentence.len() {
            return Err(Error::InvalidArgument(format!(
                "featurizer returned {} vectors for {} tokens",
                features.len(),
                sentence.len()
            )));
        }
        for (x, token) in features.iter().zip(sentence.tokens()) {
            let data = data.get_or_insert_with(|| Dataset::new(x.dim()));
            let tag = token.gold_tag.as_deref().expect("labeled corpus");
            data.push(x, tags.index_of(tag).expect("tag from corpus"))?;
        }
    }
    train(&data.expect("non-empty corpus"), &tags, config, lexicon_fingerprint)
}
