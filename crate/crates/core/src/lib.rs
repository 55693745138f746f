//! Window-based part-of-speech tagging with distributional word
//! representations that can be adapted to a new domain at tag time.
//!
//! A word is represented by four blocks: log-weighted counts of the
//! frequent "indicator" words seen immediately to its left and right,
//! its suffixes, and its orthographic shape. The counts live in a mutable
//! [`CountStore`](features::CountStore), so the representations can be
//! updated while tagging:
//!
//! * [`Mode::Static`](adaptation::Mode) never touches the counts,
//! * [`Mode::Batch`](adaptation::Mode) adds the bigram counts of the whole
//!   test set before tagging starts,
//! * [`Mode::Online`](adaptation::Mode) adds the counts of each sentence
//!   right before tagging it.
//!
//! At the end of a stream the online store is identical to the batch one.

pub mod adaptation;
pub mod classifier;
pub mod cli;
pub mod config;
pub mod corpus;
pub mod error;
pub mod eval;
pub mod features;
pub mod pipeline;
pub mod sparse;
pub mod synth;

pub use adaptation::{LogPolicy, Mode, PredictionRecord, TaggerSession};
pub use classifier::{LinearModel, TrainConfig};
pub use corpus::{Corpus, Sentence, TagSet, Token};
pub use error::{Error, Result};
pub use features::{CountStore, IndicatorVocab, Lexicons, ShapeLexicon, SuffixLexicon};
pub use sparse::SparseVector;
