//! Text container for lexicons plus count store.
//!
//! ```text
//! flors-store<TAB>1
//! vocab<TAB><k>           followed by k words, one per line, in rank order
//! suffixes<TAB><k>        followed by k suffixes in column order
//! shapes<TAB><k>          followed by k shapes (reserved columns implicit)
//! n<TAB><n>
//! total_tokens<TAB><t>
//! records<TAB><k>         followed by k lines: word<TAB>L|R<TAB>cell:count ...
//! end
//! ```
//!
//! Cells are zero-based; cell `n` is the omitted-context cell. Records are
//! sorted by word (byte order), `L` before `R`, and sides without counts are
//! left out, so equal stores serialize to identical bytes.

use std::io::{BufRead, BufReader, Read, Write};

use super::{CountStore, IndicatorVocab, Lexicons, ShapeLexicon, Side, SuffixLexicon};
use crate::error::{Error, Result};

pub const STORE_FORMAT_VERSION: u32 = 1;
const MAGIC: &str = "flors-store";

pub fn write_representations<W: Write>(
    mut out: W,
    lexicons: &Lexicons,
    store: &CountStore,
) -> Result<()> {
    if lexicons.n() != store.n() {
        return Err(Error::DimensionMismatch {
            expected: lexicons.n(),
            actual: store.n(),
        });
    }
    let mut text = String::new();
    text.push_str(&format!("{MAGIC}\t{STORE_FORMAT_VERSION}\n"));
    for (name, items) in [
        ("vocab", lexicons.vocab.words()),
        ("suffixes", lexicons.suffixes.suffixes()),
        ("shapes", lexicons.shapes.shapes()),
    ] {
        text.push_str(&format!("{name}\t{}\n", items.len()));
        for item in items {
            text.push_str(item);
            text.push('\n');
        }
    }
    store.write_records(&mut text);
    text.push_str("end\n");
    out.write_all(text.as_bytes())?;
    Ok(())
}

struct Lines<R> {
    inner: std::io::Lines<BufReader<R>>,
    number: usize,
}

impl<R: Read> Lines<R> {
    fn next_line(&mut self) -> Result<String> {
        self.number += 1;
        match self.inner.next() {
            Some(Ok(line)) => Ok(line),
            Some(Err(e)) => Err(Error::parse(self.number, e.to_string())),
            None => Err(Error::parse(self.number, "unexpected end of file")),
        }
    }

    fn err(&self, message: impl Into<String>) -> Error {
        Error::parse(self.number, message)
    }

    fn header(&mut self, key: &str) -> Result<String> {
        let line = self.next_line()?;
        match line.split_once('\t') {
            Some((k, v)) if k == key => Ok(v.to_owned()),
            _ => Err(self.err(format!("expected `{key}` header"))),
        }
    }

    fn number<T: std::str::FromStr>(&mut self, key: &str) -> Result<T> {
        let value = self.header(key)?;
        value
            .parse()
            .map_err(|_| self.err(format!("invalid value for `{key}`: {value:?}")))
    }

    fn list(&mut self, key: &str) -> Result<Vec<String>> {
        let k: usize = self.number(key)?;
        (0..k).map(|_| self.next_line()).collect()
    }
}

pub fn read_representations<R: Read>(input: R) -> Result<(Lexicons, CountStore)> {
    let mut lines = Lines {
        inner: BufReader::new(input).lines(),
        number: 0,
    };
    let version: u32 = lines.number(MAGIC)?;
    if version != STORE_FORMAT_VERSION {
        return Err(Error::Incompatible(format!(
            "store format version {version}, expected {STORE_FORMAT_VERSION}"
        )));
    }
    let vocab = IndicatorVocab::from_words(lines.list("vocab")?)?;
    let suffixes = SuffixLexicon::from_suffixes(lines.list("suffixes")?)?;
    let shapes = ShapeLexicon::from_shapes(lines.list("shapes")?)?;
    let n: usize = lines.number("n")?;
    if n != vocab.n() {
        return Err(lines.err(format!("n = {n} but vocabulary has {} words", vocab.n())));
    }
    let mut store = CountStore::new(n);
    store.set_total_tokens_seen(lines.number("total_tokens")?);
    let records: usize = lines.number("records")?;
    for _ in 0..records {
        let line = lines.next_line()?;
        let mut fields = line.split('\t');
        let (Some(word), Some(side), Some(cells), None) =
            (fields.next(), fields.next(), fields.next(), fields.next())
        else {
            return Err(lines.err("malformed count record"));
        };
        let side = match side {
            "L" => Side::Left,
            "R" => Side::Right,
            other => return Err(lines.err(format!("unknown side {other:?}"))),
        };
        let mut parsed = Vec::new();
        for cell in cells.split(' ') {
            let (index, count) = cell
                .split_once(':')
                .and_then(|(i, c)| Some((i.parse::<u32>().ok()?, c.parse::<u64>().ok()?)))
                .ok_or_else(|| lines.err(format!("malformed cell {cell:?}")))?;
            if index as usize > n {
                return Err(lines.err(format!("cell {index} exceeds n = {n}")));
            }
            parsed.push((index, count));
        }
        store.insert_counts(word.to_owned(), side, &parsed);
    }
    if lines.next_line()? != "end" {
        return Err(lines.err("expected `end`"));
    }
    Ok((
        Lexicons {
            vocab,
            suffixes,
            shapes,
        },
        store,
    ))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::corpus::read_unlabeled;
    use crate::features::{build_representations, RepresentationConfig};

    fn sample() -> (Lexicons, CountStore) {
        let corpus =
            read_unlabeled("The cat sat on the mat .\nA dog , 3.5 IBM-360\n".as_bytes()).unwrap();
        build_representations(
            &[&corpus],
            RepresentationConfig {
                n: 3,
                suffix_min_count: 2,
            },
        )
        .unwrap()
    }

    #[test]
    fn round_trip_is_byte_stable() {
        let (lex, store) = sample();
        let mut bytes = Vec::new();
        write_representations(&mut bytes, &lex, &store).unwrap();
        let (lex2, store2) = read_representations(bytes.as_slice()).unwrap();
        assert_eq!(lex2, lex);
        assert_eq!(store2, store);
        let mut again = Vec::new();
        write_representations(&mut again, &lex2, &store2).unwrap();
        assert_eq!(again, bytes);
    }

    #[test]
    fn rejects_other_versions_and_garbage() {
        let (lex, store) = sample();
        let mut bytes = Vec::new();
        write_representations(&mut bytes, &lex, &store).unwrap();
        let text = String::from_utf8(bytes).unwrap();
        let bumped = text.replacen("flors-store\t1", "flors-store\t2", 1);
        assert!(matches!(
            read_representations(bumped.as_bytes()),
            Err(Error::Incompatible(_))
        ));
        let truncated = &text[..text.len() - 4];
        assert!(read_representations(truncated.as_bytes()).is_err());
        assert!(read_representations("hello".as_bytes()).is_err());
    }
}
