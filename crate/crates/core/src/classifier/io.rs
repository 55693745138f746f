//! Model file layout:
//!
//! ```text
//! flors-model<TAB>1
//! fingerprint<TAB><hex or ->
//! feature_dim<TAB><d>
//! tags<TAB><k>            followed by k tags in decoding order
//! weights<TAB><tag index><TAB><bias><TAB><nnz>
//! <col>:<value> ...       one line of non-zero weights for that tag
//! ...                     (one weights header + line per tag)
//! end
//! ```
//!
//! Floats are written in shortest round-trip notation, so a reloaded model
//! is bit-identical.

use std::fmt::Write as _;
use std::io::{BufRead, BufReader, Read, Write};

use super::LinearModel;
use crate::corpus::TagSet;
use crate::error::{Error, Result};

pub const MODEL_FORMAT_VERSION: u32 = 1;
const MAGIC: &str = "flors-model";

impl LinearModel {
    pub fn write<W: Write>(&self, mut out: W) -> Result<()> {
        let mut text = String::new();
        let fingerprint = if self.lexicon_fingerprint.is_empty() {
            "-"
        } else {
            &self.lexicon_fingerprint
        };
        let _ = writeln!(text, "{MAGIC}\t{MODEL_FORMAT_VERSION}");
        let _ = writeln!(text, "fingerprint\t{fingerprint}");
        let _ = writeln!(text, "feature_dim\t{}", self.feature_dim);
        let _ = writeln!(text, "tags\t{}", self.tags.len());
        for tag in self.tags.tags() {
            let _ = writeln!(text, "{tag}");
        }
        for (t, (w, b)) in self.weights.iter().zip(&self.biases).enumerate() {
            let nnz = w.iter().filter(|&&v| v != 0.0).count();
            let _ = writeln!(text, "weights\t{t}\t{b:e}\t{nnz}");
            let mut first = true;
            for (col, &v) in w.iter().enumerate().filter(|(_, &v)| v != 0.0) {
                if !first {
                    text.push(' ');
                }
                first = false;
                let _ = write!(text, "{col}:{v:e}");
            }
            text.push('\n');
        }
        text.push_str("end\n");
        out.write_all(text.as_bytes())?;
        Ok(())
    }

    pub fn read<R: Read>(input: R) -> Result<Self> {
        let mut lines = BufReader::new(input).lines();
        let mut number = 0;
        let mut next = || -> Result<(usize, String)> {
            number += 1;
            match lines.next() {
                Some(Ok(l)) => Ok((number, l)),
                Some(Err(e)) => Err(Error::parse(number, e.to_string())),
                None => Err(Error::parse(number, "unexpected end of file")),
            }
        };
        fn field<'l>(line: &'l str, key: &str, at: usize) -> Result<Vec<&'l str>> {
            let mut parts = line.split('\t');
            if parts.next() != Some(key) {
                return Err(Error::parse(at, format!("expected `{key}`")));
            }
            Ok(parts.collect())
        }
        fn parse<T: std::str::FromStr>(s: &str, at: usize) -> Result<T> {
            s.parse()
                .map_err(|_| Error::parse(at, format!("invalid number {s:?}")))
        }

        let (at, line) = next()?;
        let version: u32 = parse(field(&line, MAGIC, at)?.first().copied().unwrap_or(""), at)?;
        if version != MODEL_FORMAT_VERSION {
            return Err(Error::Incompatible(format!(
                "model format version {version}, expected {MODEL_FORMAT_VERSION}"
            )));
        }
        let (at, line) = next()?;
        let fingerprint = match field(&line, "fingerprint", at)?.as_slice() {
            ["-"] => String::new(),
            [fp] => fp.to_string(),
            _ => return Err(Error::parse(at, "malformed fingerprint")),
        };
        let (at, line) = next()?;
        let dim: usize = parse(field(&line, "feature_dim", at)?.first().copied().unwrap_or(""), at)?;
        let (at, line) = next()?;
        let k: usize = parse(field(&line, "tags", at)?.first().copied().unwrap_or(""), at)?;
        let tags = (0..k).map(|_| next().map(|(_, l)| l)).collect::<Result<Vec<_>>>()?;
        let tags = TagSet::from_ordered(tags)?;

        let mut weights = Vec::with_capacity(k);
        let mut biases = Vec::with_capacity(k);
        for t in 0..k {
            let (at, line) = next()?;
            let header = field(&line, "weights", at)?;
            let [index, bias, nnz] = header.as_slice() else {
                return Err(Error::parse(at, "malformed weights header"));
            };
            if parse::<usize>(index, at)? != t {
                return Err(Error::parse(at, "weights out of order"));
            }
            biases.push(parse::<f64>(bias, at)?);
            let nnz: usize = parse(nnz, at)?;
            let (at, line) = next()?;
            let mut w = vec![0.0; dim];
            let mut seen = 0;
            for cell in line.split(' ').filter(|c| !c.is_empty()) {
                let (col, v) = cell
                    .split_once(':')
                    .ok_or_else(|| Error::parse(at, format!("malformed weight {cell:?}")))?;
                let col: usize = parse(col, at)?;
                if col >= dim {
                    return Err(Error::parse(at, format!("column {col} exceeds dimension {dim}")));
                }
                w[col] = parse(v, at)?;
                seen += 1;
            }
            if seen != nnz {
                return Err(Error::parse(at, format!("expected {nnz} weights, found {seen}")));
            }
            weights.push(w);
        }
        let (at, line) = next()?;
        if line != "end" {
            return Err(Error::parse(at, "expected `end`"));
        }
        if k == 0 {
            return Err(Error::parse(at, "model has no tags"));
        }
        LinearModel::new(tags, weights, biases, fingerprint)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn round_trip_is_exact() {
        let model = LinearModel::new(
            TagSet::from_ordered(vec!["B".into(), "A".into()]).unwrap(),
            vec![vec![0.1, 0.0, -1e-300, 1.0 / 3.0], vec![0.0; 4]],
            vec![-0.0, 2.5e10],
            "abc",
        )
        .unwrap();
        let mut bytes = Vec::new();
        model.write(&mut bytes).unwrap();
        let back = LinearModel::read(bytes.as_slice()).unwrap();
        assert_eq!(back, model);
        assert_eq!(back.tags().tags(), ["B", "A"]);
    }

    #[test]
    fn rejects_version_and_truncation() {
        let model = LinearModel::new(TagSet::new(["A"]), vec![vec![1.0]], vec![0.0], "").unwrap();
        let mut bytes = Vec::new();
        model.write(&mut bytes).unwrap();
        let text = String::from_utf8(bytes).unwrap();
        assert!(matches!(
            LinearModel::read(text.replace("flors-model\t1", "flors-model\t9").as_bytes()),
            Err(Error::Incompatible(_))
        ));
        assert!(LinearModel::read(&text.as_bytes()[..text.len() - 4]).is_err());
    }
}
