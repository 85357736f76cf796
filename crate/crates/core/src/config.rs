//! Plain-text `key = value` configuration with `#` comments.

use crate::error::{Error, Result};
use sha2::{Digest, Sha256};
use std::collections::BTreeMap;
use std::path::Path;
use std::str::FromStr;

#[derive(Debug, Clone, Default, PartialEq)]
pub struct Config {
    entries: BTreeMap<String, String>,
    lines: BTreeMap<String, usize>,
}

impl Config {
    pub fn parse(text: &str) -> Result<Self> {
        let mut cfg = Config::default();
        for (i, raw) in text.lines().enumerate() {
            let line = i + 1;
            let content = raw.split('#').next().unwrap_or("").trim();
            if content.is_empty() {
                continue;
            }
            let (k, v) = content.split_once('=').ok_or_else(|| Error::Parse {
                line,
                message: format!("expected key = value, found {content:?}"),
            })?;
            let k = k.trim();
            if k.is_empty() {
                return Err(Error::Parse {
                    line,
                    message: "empty key".into(),
                });
            }
            if cfg.entries.insert(k.to_string(), v.trim().to_string()).is_some() {
                return Err(Error::Parse {
                    line,
                    message: format!("duplicate key {k:?}"),
                });
            }
            cfg.lines.insert(k.to_string(), line);
        }
        Ok(cfg)
    }

    pub fn from_file(path: &Path) -> Result<Self> {
        Self::parse(&std::fs::read_to_string(path)?)
    }

    pub fn set(&mut self, key: &str, value: impl ToString) {
        self.entries.insert(key.to_string(), value.to_string());
    }

    pub fn get(&self, key: &str) -> Option<&str> {
        self.entries.get(key).map(String::as_str)
    }

    pub fn require(&self, key: &str) -> Result<&str> {
        self.get(key)
            .ok_or_else(|| Error::arg(format!("missing config key {key:?}")))
    }

    fn bad(&self, key: &str, value: &str) -> Error {
        let message = format!("invalid value {value:?} for {key:?}");
        match self.lines.get(key) {
            Some(&line) => Error::Parse { line, message },
            None => Error::arg(message),
        }
    }

    pub fn parsed<T: FromStr>(&self, key: &str) -> Result<Option<T>> {
        self.get(key)
            .map(|v| v.parse().map_err(|_| self.bad(key, v)))
            .transpose()
    }

    pub fn parsed_or<T: FromStr>(&self, key: &str, default: T) -> Result<T> {
        Ok(self.parsed(key)?.unwrap_or(default))
    }

    /// Comma-separated list.
    pub fn list<T: FromStr>(&self, key: &str) -> Result<Option<Vec<T>>> {
        self.get(key)
            .map(|v| {
                v.split(',')
                    .map(|s| s.trim().parse().map_err(|_| self.bad(key, v)))
                    .collect()
            })
            .transpose()
    }

    /// Canonical `key=value` lines, sorted by key.
    pub fn canonical(&self) -> String {
        self.entries.iter().map(|(k, v)| format!("{k}={v}\n")).collect()
    }

    /// SHA-256 of the canonical form, hex encoded.
    pub fn hash(&self) -> String {
        sha256_hex(self.canonical().as_bytes())
    }
}

/// Hex-encoded SHA-256 of `bytes`.
pub fn sha256_hex(bytes: &[u8]) -> String {
    Sha256::digest(bytes).iter().map(|b| format!("{b:02x}")).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_comments_and_lists() {
        let cfg = Config::parse("# family\nfamily = fibonacci\nn = 5, 6,7 # sizes\n\nr=2\n").unwrap();
        assert_eq!(cfg.get("family"), Some("fibonacci"));
        assert_eq!(cfg.list::<u32>("n").unwrap(), Some(vec![5, 6, 7]));
        assert_eq!(cfg.parsed::<u32>("r").unwrap(), Some(2));
        assert_eq!(cfg.parsed_or("seed", 9u64).unwrap(), 9);
    }

    #[test]
    fn errors_name_lines() {
        match Config::parse("a=1\nbroken\n") {
            Err(Error::Parse { line, .. }) => assert_eq!(line, 2),
            other => panic!("{other:?}"),
        }
        let cfg = Config::parse("a=1\nr = two\n").unwrap();
        match cfg.parsed::<u32>("r") {
            Err(Error::Parse { line, .. }) => assert_eq!(line, 2),
            other => panic!("{other:?}"),
        }
        assert!(Config::parse("a=1\na=2").is_err());
    }

    #[test]
    fn hash_ignores_layout() {
        let a = Config::parse("x = 1\ny=2\n").unwrap();
        let b = Config::parse("# c\ny=2\n\n x=1 \n").unwrap();
        assert_eq!(a.hash(), b.hash());
        assert_eq!(a.hash().len(), 64);
        assert_ne!(a.hash(), Config::parse("x=1\ny=3").unwrap().hash());
        // sha256("") prefix
        assert!(Config::default().hash().starts_with("e3b0c442"));
    }
}
