//! Tag-time adaptation regimes.
//!
//! All three modes share a trained model and the count store built before
//! training; they differ only in how the store evolves while tagging.

use std::fmt;
use std::str::FromStr;
use std::sync::Arc;

use crate::classifier::LinearModel;
use crate::corpus::{Corpus, Sentence};
use crate::error::{Error, Result};
use crate::features::{CountStore, Lexicons};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Mode {
    /// Counts are never changed.
    Static,
    /// Counts of the whole test set are added once, before tagging.
    Batch,
    /// Counts of each sentence are added right before it is tagged.
    Online,
}

impl Mode {
    pub const ALL: [Mode; 3] = [Mode::Static, Mode::Online, Mode::Batch];

    pub fn as_str(self) -> &'static str {
        match self {
            Mode::Static => "static",
            Mode::Batch => "batch",
            Mode::Online => "online",
        }
    }
}

impl fmt::Display for Mode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Mode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "static" => Ok(Mode::Static),
            "batch" => Ok(Mode::Batch),
            "online" => Ok(Mode::Online),
            other => Err(Error::InvalidArgument(format!("unknown mode {other:?}"))),
        }
    }
}

/// How much of the prediction log a session keeps.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum LogPolicy {
    Disabled,
    #[default]
    Unbounded,
    /// Keep the first `n` records.
    Bounded(usize),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PredictionRecord {
    pub surface: String,
    pub gold: Option<String>,
    pub predicted: String,
}

impl PredictionRecord {
    pub fn is_correct(&self) -> Option<bool> {
        self.gold.as_ref().map(|g| *g == self.predicted)
    }
}

/// A model bound to a count store and an adaptation mode.
///
/// Static sessions can share one store; batch and online sessions get
/// their own copy the first time they write to it.
#[derive(Debug, Clone)]
pub struct TaggerSession {
    model: Arc<LinearModel>,
    lexicons: Arc<Lexicons>,
    store: Arc<CountStore>,
    mode: Mode,
    batch_prepared: bool,
    sentences_tagged: usize,
    tokens_tagged: u64,
    log_policy: LogPolicy,
    log: Vec<PredictionRecord>,
    dropped_records: u64,
}

impl TaggerSession {
    pub fn new(
        model: Arc<LinearModel>,
        lexicons: Arc<Lexicons>,
        store: Arc<CountStore>,
        mode: Mode,
    ) -> Result<Self> {
        if store.n() != lexicons.n() {
            return Err(Error::Incompatible(format!(
                "store has n = {}, lexicons have n = {}",
                store.n(),
                lexicons.n()
            )));
        }
        if model.feature_dim() != lexicons.feature_dim() {
            return Err(Error::Incompatible(format!(
                "model expects {} features, representations give {}",
                model.feature_dim(),
                lexicons.feature_dim()
            )));
        }
        if !model.lexicon_fingerprint().is_empty()
            && model.lexicon_fingerprint() != lexicons.fingerprint()
        {
            return Err(Error::Incompatible(
                "model was trained with different lexicons".into(),
            ));
        }
        Ok(TaggerSession {
            model,
            lexicons,
            store,
            mode,
            batch_prepared: false,
            sentences_tagged: 0,
            tokens_tagged: 0,
            log_policy: LogPolicy::default(),
            log: Vec::new(),
            dropped_records: 0,
        })
    }

    pub fn with_log_policy(mut self, policy: LogPolicy) -> Self {
        self.log_policy = policy;
        self
    }

    pub fn mode(&self) -> Mode {
        self.mode
    }

    pub fn model(&self) -> &LinearModel {
        &self.model
    }

    pub fn lexicons(&self) -> &Lexicons {
        &self.lexicons
    }

    pub fn store(&self) -> &CountStore {
        &self.store
    }

    pub fn shared_store(&self) -> Arc<CountStore> {
        Arc::clone(&self.store)
    }

    pub fn tokens_tagged(&self) -> u64 {
        self.tokens_tagged
    }

    pub fn sentences_tagged(&self) -> usize {
        self.sentences_tagged
    }

    pub fn log(&self) -> &[PredictionRecord] {
        &self.log
    }

    pub fn take_log(&mut self) -> Vec<PredictionRecord> {
        std::mem::take(&mut self.log)
    }

    /// Records not kept because of a [`LogPolicy::Bounded`] limit.
    pub fn dropped_records(&self) -> u64 {
        self.dropped_records
    }

    /// Adds the bigram counts of the whole test corpus. Gold tags are
    /// ignored. Allowed once per batch session, before any tagging.
    pub fn prepare_batch(&mut self, test: &Corpus) -> Result<()> {
        if self.mode != Mode::Batch {
            return Err(Error::Session(format!(
                "prepare_batch on a {} session",
                self.mode
            )));
        }
        if self.batch_prepared {
            return Err(Error::Session("prepare_batch called twice".into()));
        }
        if self.sentences_tagged > 0 {
            return Err(Error::Session("prepare_batch after tagging started".into()));
        }
        let store = Arc::make_mut(&mut self.store);
        store.accumulate_corpus(&self.lexicons.vocab, test)?;
        self.batch_prepared = true;
        Ok(())
    }

    /// Tags one sentence. An online session first folds the sentence's
    /// bigrams into the store, then tags with the updated counts.
    pub fn tag_sentence(&mut self, sentence: &Sentence) -> Result<Vec<String>> {
        match self.mode {
            Mode::Static => {}
            Mode::Batch if !self.batch_prepared => {
                return Err(Error::Session(
                    "batch session used before prepare_batch".into(),
                ));
            }
            Mode::Batch => {}
            Mode::Online => {
                Arc::make_mut(&mut self.store).accumulate(&self.lexicons.vocab, sentence)?;
            }
        }
        let features = self.lexicons.sentence_features(&self.store, sentence)?;
        let mut tags = Vec::with_capacity(features.len());
        for (x, token) in features.iter().zip(sentence.tokens()) {
            let tag = self.model.predict(x)?.to_owned();
            self.record(token.surface.as_str(), token.gold_tag.as_deref(), &tag);
            tags.push(tag);
        }
        self.sentences_tagged += 1;
        self.tokens_tagged += sentence.len() as u64;
        Ok(tags)
    }

    fn record(&mut self, surface: &str, gold: Option<&str>, predicted: &str) {
        let keep = match self.log_policy {
            LogPolicy::Disabled => return,
            LogPolicy::Unbounded => true,
            LogPolicy::Bounded(limit) => self.log.len() < limit,
        };
        if keep {
            self.log.push(PredictionRecord {
                surface: surface.to_owned(),
                gold: gold.map(str::to_owned),
                predicted: predicted.to_owned(),
            });
        } else {
            self.dropped_records += 1;
        }
    }

    /// Lazily tags sentences in input order.
    pub fn tag_stream<I>(&mut self, sentences: I) -> TagStream<'_, I::IntoIter>
    where
        I: IntoIterator<Item = Sentence>,
    {
        TagStream {
            session: self,
            input: sentences.into_iter(),
        }
    }

    /// Tags a whole corpus; a batch session is prepared on it first.
    pub fn tag_corpus(&mut self, corpus: &Corpus) -> Result<Vec<Vec<String>>> {
        if self.mode == Mode::Batch && !self.batch_prepared {
            self.prepare_batch(corpus)?;
        }
        corpus
            .sentences()
            .iter()
            .map(|s| self.tag_sentence(s))
            .collect()
    }
}

pub struct TagStream<'s, I> {
    session: &'s mut TaggerSession,
    input: I,
}

impl<I> Iterator for TagStream<'_, I>
where
    I: Iterator<Item = Sentence>,
{
    type Item = Result<(Sentence, Vec<String>)>;

    fn next(&mut self) -> Option<Self::Item> {
        let sentence = self.input.next()?;
        Some(self.session.tag_sentence(&sentence).map(|tags| (sentence, tags)))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn mode_parsing() {
        assert_eq!("Online".parse::<Mode>().unwrap(), Mode::Online);
        assert_eq!("static".parse::<Mode>().unwrap(), Mode::Static);
        assert!("offline".parse::<Mode>().is_err());
        for m in Mode::ALL {
            assert_eq!(m.to_string().parse::<Mode>().unwrap(), m);
        }
    }
}
