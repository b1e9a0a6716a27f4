//! Key-value configuration files.
//!
//! One `key = value` pair per line. Blank lines and lines starting with `#`
//! are ignored, as is anything after a ` #` on a value line. Keys are
//! case-sensitive and may appear once.

use std::collections::BTreeMap;
use std::path::Path;
use std::str::FromStr;

use super::read_to_string;
use crate::error::{Error, Result};

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Config {
    values: BTreeMap<String, String>,
}

impl Config {
    pub fn load(path: &Path) -> Result<Config> {
        read_to_string(path)?.parse()
    }

    pub fn get_str(&self, key: &str) -> Option<&str> {
        self.values.get(key).map(String::as_str)
    }

    pub fn get<T: FromStr>(&self, key: &str) -> Result<Option<T>> {
        self.get_str(key)
            .map(|v| {
                v.parse()
                    .map_err(|_| Error::InvalidParameter(format!("config key `{key}` has invalid value `{v}`")))
            })
            .transpose()
    }

    pub fn keys(&self) -> impl Iterator<Item = &str> {
        self.values.keys().map(String::as_str)
    }

    /// Fails on the first key not in `allowed`.
    pub fn check_keys(&self, allowed: &[&str]) -> Result<()> {
        match self.keys().find(|k| !allowed.contains(k)) {
            Some(k) => Err(Error::InvalidParameter(format!("unknown config key `{k}`"))),
            None => Ok(()),
        }
    }
}

impl FromStr for Config {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let mut values = BTreeMap::new();
        for (i, raw) in s.lines().enumerate() {
            let line = raw.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let bad = |message: String| Error::Parse { line: i + 1, message };
            let (key, value) = line.split_once('=').ok_or_else(|| bad("expected `key = value`".into()))?;
            let value = value.split(" #").next().unwrap_or_default().trim();
            let key = key.trim();
            if key.is_empty() {
                return Err(bad("empty key".into()));
            }
            if values.insert(key.to_owned(), value.to_owned()).is_some() {
                return Err(bad(format!("duplicate key `{key}`")));
            }
        }
        Ok(Config { values })
    }
}
