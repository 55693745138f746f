//! Labeled and unlabeled corpora.
//!
//! Two plain-text formats are supported:
//!
//! * labeled (vertical): one `surface<TAB>tag` pair per line, sentences
//!   separated by a blank line;
//! * unlabeled: one sentence per line, tokens separated by spaces or tabs.
//!
//! Input is expected to be tokenized already. Surfaces are compared by
//! exact code-point equality.

use std::collections::{BTreeSet, HashMap, HashSet};
use std::io::{BufRead, BufReader, Read, Write};

use rand::seq::index;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Token {
    pub surface: String,
    pub gold_tag: Option<String>,
}

impl Token {
    pub fn new(surface: impl Into<String>) -> Self {
        Token {
            surface: surface.into(),
            gold_tag: None,
        }
    }

    pub fn tagged(surface: impl Into<String>, tag: impl Into<String>) -> Self {
        Token {
            surface: surface.into(),
            gold_tag: Some(tag.into()),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Sentence {
    tokens: Vec<Token>,
}

impl Sentence {
    pub fn new(tokens: Vec<Token>) -> Result<Self> {
        if tokens.is_empty() {
            return Err(Error::InvalidArgument("empty sentence".into()));
        }
        if let Some(bad) = tokens
            .iter()
            .find(|t| t.surface.is_empty() || t.surface.chars().any(char::is_whitespace))
        {
            return Err(Error::InvalidArgument(format!(
                "invalid token surface {:?}",
                bad.surface
            )));
        }
        Ok(Sentence { tokens })
    }

    /// Builds an untagged sentence from whitespace-separated text.
    pub fn from_text(text: &str) -> Result<Self> {
        Sentence::new(text.split_whitespace().map(Token::new).collect())
    }

    pub fn tokens(&self) -> &[Token] {
        &self.tokens
    }

    pub fn len(&self) -> usize {
        self.tokens.len()
    }

    pub fn is_empty(&self) -> bool {
        self.tokens.is_empty()
    }

    pub fn surfaces(&self) -> impl Iterator<Item = &str> {
        self.tokens.iter().map(|t| t.surface.as_str())
    }

    /// Copy of the sentence with gold tags removed.
    pub fn without_tags(&self) -> Sentence {
        Sentence {
            tokens: self.surfaces().map(Token::new).collect(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct Corpus {
    sentences: Vec<Sentence>,
    labeled: bool,
}

impl Corpus {
    pub fn new(sentences: Vec<Sentence>, labeled: bool) -> Result<Self> {
        if labeled {
            let untagged = sentences
                .iter()
                .flat_map(|s| s.tokens())
                .any(|t| t.gold_tag.is_none());
            if untagged {
                return Err(Error::InvalidArgument(
                    "labeled corpus contains a token without a tag".into(),
                ));
            }
        }
        Ok(Corpus { sentences, labeled })
    }

    pub fn sentences(&self) -> &[Sentence] {
        &self.sentences
    }

    pub fn into_sentences(self) -> Vec<Sentence> {
        self.sentences
    }

    pub fn is_labeled(&self) -> bool {
        self.labeled
    }

    pub fn len(&self) -> usize {
        self.sentences.len()
    }

    pub fn is_empty(&self) -> bool {
        self.sentences.is_empty()
    }

    pub fn token_count(&self) -> usize {
        self.sentences.iter().map(Sentence::len).sum()
    }

    pub fn tokens(&self) -> impl Iterator<Item = &Token> {
        self.sentences.iter().flat_map(|s| s.tokens())
    }

    /// Set of surfaces occurring in the corpus (case-sensitive).
    pub fn vocabulary(&self) -> HashSet<String> {
        self.tokens().map(|t| t.surface.clone()).collect()
    }

    /// Gold tags observed with each surface.
    pub fn tag_profile(&self) -> HashMap<&str, HashSet<&str>> {
        let mut profile: HashMap<&str, HashSet<&str>> = HashMap::new();
        for token in self.tokens() {
            let tags = profile.entry(token.surface.as_str()).or_default();
            if let Some(tag) = &token.gold_tag {
                tags.insert(tag.as_str());
            }
        }
        profile
    }

    /// Same sentences with gold tags dropped.
    pub fn unlabeled(&self) -> Corpus {
        Corpus {
            sentences: self.sentences.iter().map(Sentence::without_tags).collect(),
            labeled: false,
        }
    }

    pub fn write_labeled<W: Write>(&self, mut out: W) -> Result<()> {
        for sentence in &self.sentences {
            for token in sentence.tokens() {
                let tag = token.gold_tag.as_deref().ok_or_else(|| {
                    Error::InvalidArgument("cannot write untagged token in labeled format".into())
                })?;
                writeln!(out, "{}\t{}", token.surface, tag)?;
            }
            writeln!(out)?;
        }
        Ok(())
    }

    pub fn write_unlabeled<W: Write>(&self, mut out: W) -> Result<()> {
        for sentence in &self.sentences {
            let line: Vec<&str> = sentence.surfaces().collect();
            writeln!(out, "{}", line.join(" "))?;
        }
        Ok(())
    }
}

/// Ordered set of tag symbols. The order is lexicographic and defines the
/// tie-break order used when decoding.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct TagSet {
    tags: Vec<String>,
}

impl TagSet {
    pub fn new<I, S>(tags: I) -> Self
    where
        I: IntoIterator<Item = S>,
        S: Into<String>,
    {
        let set: BTreeSet<String> = tags.into_iter().map(Into::into).collect();
        TagSet {
            tags: set.into_iter().collect(),
        }
    }

    pub fn from_corpus(corpus: &Corpus) -> Self {
        TagSet::new(corpus.tokens().filter_map(|t| t.gold_tag.clone()))
    }

    /// Builds a tag set that keeps `tags` in the given order.
    pub fn from_ordered(tags: Vec<String>) -> Result<Self> {
        let unique: HashSet<&String> = tags.iter().collect();
        if unique.len() != tags.len() {
            return Err(Error::InvalidArgument("duplicate tag in tag set".into()));
        }
        Ok(TagSet { tags })
    }

    pub fn tags(&self) -> &[String] {
        &self.tags
    }

    pub fn len(&self) -> usize {
        self.tags.len()
    }

    pub fn is_empty(&self) -> bool {
        self.tags.is_empty()
    }

    pub fn index_of(&self, tag: &str) -> Option<usize> {
        self.tags.iter().position(|t| t == tag)
    }

    pub fn get(&self, index: usize) -> Option<&str> {
        self.tags.get(index).map(String::as_str)
    }
}

fn read_text<R: Read>(stream: R) -> impl Iterator<Item = Result<(usize, String)>> {
    BufReader::new(stream)
        .lines()
        .enumerate()
        .map(|(i, line)| match line {
            Ok(mut l) => {
                if l.ends_with('\r') {
                    l.pop();
                }
                Ok((i + 1, l))
            }
            Err(e) if e.kind() == std::io::ErrorKind::InvalidData => {
                Err(Error::parse(i + 1, "invalid UTF-8"))
            }
            Err(e) => Err(Error::Io(e)),
        })
}

/// Reads the two-column vertical format.
pub fn read_labeled<R: Read>(stream: R) -> Result<Corpus> {
    let mut sentences = Vec::new();
    let mut current = Vec::new();
    for line in read_text(stream) {
        let (number, line) = line?;
        if line.trim().is_empty() {
            if !current.is_empty() {
                sentences.push(Sentence::new(std::mem::take(&mut current))?);
            }
            continue;
        }
        let fields: Vec<&str> = line.split('\t').collect();
        if fields.len() != 2 {
            return Err(Error::parse(
                number,
                format!("expected 2 tab-separated columns, found {}", fields.len()),
            ));
        }
        let (surface, tag) = (fields[0], fields[1]);
        if surface.is_empty() || surface.chars().any(char::is_whitespace) {
            return Err(Error::parse(number, format!("invalid surface {surface:?}")));
        }
        if tag.is_empty() || tag.chars().any(char::is_whitespace) {
            return Err(Error::parse(number, format!("invalid tag {tag:?}")));
        }
        current.push(Token::tagged(surface, tag));
    }
    if !current.is_empty() {
        sentences.push(Sentence::new(current)?);
    }
    if sentences.is_empty() {
        return Err(Error::NoSentences);
    }
    Corpus::new(sentences, true)
}

/// Reads one sentence per line; blank lines are skipped.
pub fn read_unlabeled<R: Read>(stream: R) -> Result<Corpus> {
    let mut sentences = Vec::new();
    for line in read_text(stream) {
        let (_, line) = line?;
        if line.trim().is_empty() {
            continue;
        }
        sentences.push(Sentence::from_text(&line)?);
    }
    if sentences.is_empty() {
        return Err(Error::NoSentences);
    }
    Corpus::new(sentences, false)
}

/// Keeps `round(fraction * len)` sentences chosen uniformly without
/// replacement, in their original order.
pub fn sample_fraction(corpus: &Corpus, fraction: f64, seed: u64) -> Result<Corpus> {
    if !(fraction > 0.0 && fraction <= 1.0) {
        return Err(Error::InvalidArgument(format!(
            "fraction must be in (0, 1], got {fraction}"
        )));
    }
    let total = corpus.len();
    let keep = ((fraction * total as f64).round() as usize).min(total);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut picked = index::sample(&mut rng, total, keep).into_vec();
    picked.sort_unstable();
    Ok(Corpus {
        sentences: picked
            .into_iter()
            .map(|i| corpus.sentences[i].clone())
            .collect(),
        labeled: corpus.labeled,
    })
}
