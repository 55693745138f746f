//! Flat `key = value` configuration files.
//!
//! One setting per line; `#` starts a comment; blank lines are ignored.
//! Keys use the long flag names with dashes or underscores
//! (`n-indicators` and `n_indicators` are the same key). List values are
//! comma-separated. Command-line flags take precedence over file values.

use std::collections::BTreeMap;
use std::path::Path;
use std::str::FromStr;

use crate::error::{Error, Result};

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Config {
    values: BTreeMap<String, String>,
}

fn normalize(key: &str) -> String {
    key.trim().replace('_', "-")
}

impl Config {
    pub fn parse(text: &str) -> Result<Self> {
        let mut values = BTreeMap::new();
        for (i, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (key, value) = line
                .split_once('=')
                .ok_or_else(|| Error::parse(i + 1, "expected `key = value`"))?;
            let key = normalize(key);
            if key.is_empty() {
                return Err(Error::parse(i + 1, "empty key"));
            }
            if values.insert(key.clone(), value.trim().to_owned()).is_some() {
                return Err(Error::parse(i + 1, format!("duplicate key `{key}`")));
            }
        }
        Ok(Config { values })
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::file(path, e))?;
        Config::parse(&text)
    }

    pub fn get(&self, key: &str) -> Option<&str> {
        self.values.get(&normalize(key)).map(String::as_str)
    }

    pub fn keys(&self) -> impl Iterator<Item = &str> {
        self.values.keys().map(String::as_str)
    }

    /// Fails on keys outside `known`.
    pub fn check_keys(&self, known: &[&str]) -> Result<()> {
        match self.keys().find(|k| !known.contains(k)) {
            Some(k) => Err(Error::InvalidArgument(format!("unknown config key `{k}`"))),
            None => Ok(()),
        }
    }

    /// Flag value if given, else the parsed file value.
    pub fn resolve<T: FromStr>(&self, flag: Option<T>, key: &str) -> Result<Option<T>> {
        if flag.is_some() {
            return Ok(flag);
        }
        self.get(key)
            .map(|v| {
                v.parse()
                    .map_err(|_| Error::InvalidArgument(format!("invalid value for `{key}`: {v:?}")))
            })
            .transpose()
    }

    /// Flag values if any, else the comma-separated file value.
    pub fn resolve_list<T: FromStr>(&self, flag: Vec<T>, key: &str) -> Result<Vec<T>> {
        if !flag.is_empty() {
            return Ok(flag);
        }
        let Some(value) = self.get(key) else {
            return Ok(Vec::new());
        };
        value
            .split(',')
            .map(str::trim)
            .filter(|s| !s.is_empty())
            .map(|v| {
                v.parse()
                    .map_err(|_| Error::InvalidArgument(format!("invalid value for `{key}`: {v:?}")))
            })
            .collect()
    }
}
