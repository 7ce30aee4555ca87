//! Flat INI-style configuration: `key = value` lines, `[section]` headers
//! prefixing the keys that follow (`section.key`), `#`/`;` comments.

use std::cell::RefCell;
use std::collections::{BTreeMap, BTreeSet};
use std::path::Path;
use std::str::FromStr;

use sha2::{Digest, Sha256};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Default)]
pub struct Config {
    entries: BTreeMap<String, String>,
    used: RefCell<BTreeSet<String>>,
}

impl Config {
    pub fn parse(text: &str) -> Result<Config> {
        let mut entries = BTreeMap::new();
        let mut section = String::new();
        for (no, raw) in text.lines().enumerate() {
            let line = raw.split(['#', ';']).next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            if let Some(name) = line.strip_prefix('[') {
                let name = name.strip_suffix(']').ok_or_else(|| {
                    Error::config(format!("line {}: unterminated section header", no + 1))
                })?;
                section = name.trim().to_string();
                continue;
            }
            let (k, v) = line
                .split_once('=')
                .ok_or_else(|| Error::config(format!("line {}: expected key = value", no + 1)))?;
            let k = k.trim();
            if k.is_empty() {
                return Err(Error::config(format!("line {}: empty key", no + 1)));
            }
            let key = if section.is_empty() {
                k.to_string()
            } else {
                format!("{section}.{k}")
            };
            if entries.insert(key.clone(), v.trim().to_string()).is_some() {
                return Err(Error::config(format!(
                    "line {}: duplicate key `{key}`",
                    no + 1
                )));
            }
        }
        Ok(Config {
            entries,
            used: RefCell::default(),
        })
    }

    pub fn load(path: &Path) -> Result<Config> {
        Config::parse(&std::fs::read_to_string(path)?)
    }

    pub fn set(&mut self, key: &str, value: impl ToString) {
        self.entries.insert(key.to_string(), value.to_string());
    }

    pub fn get(&self, key: &str) -> Option<&str> {
        self.used.borrow_mut().insert(key.to_string());
        self.entries.get(key).map(String::as_str)
    }

    pub fn parsed_or<T: FromStr>(&self, key: &str, default: T) -> Result<T> {
        match self.get(key) {
            None => Ok(default),
            Some(v) => v
                .parse()
                .map_err(|_| Error::config(format!("`{key}`: cannot parse `{v}`"))),
        }
    }

    pub fn f64_or(&self, key: &str, default: f64) -> Result<f64> {
        self.parsed_or(key, default)
    }

    pub fn usize_or(&self, key: &str, default: usize) -> Result<usize> {
        // accept 4096 as well as 4096.0 or 2^12
        match self.get(key) {
            None => Ok(default),
            Some(v) => {
                if let Some((b, e)) = v.split_once('^') {
                    let (b, e): (usize, u32) = (
                        b.trim()
                            .parse()
                            .map_err(|_| Error::config(format!("`{key}`: bad base")))?,
                        e.trim()
                            .parse()
                            .map_err(|_| Error::config(format!("`{key}`: bad exponent")))?,
                    );
                    return Ok(b.pow(e));
                }
                let x: f64 = v
                    .parse()
                    .map_err(|_| Error::config(format!("`{key}`: cannot parse `{v}`")))?;
                if x < 0.0 || x.fract() != 0.0 {
                    return Err(Error::config(format!(
                        "`{key}` must be a non-negative integer, got {v}"
                    )));
                }
                Ok(x as usize)
            }
        }
    }

    pub fn bool_or(&self, key: &str, default: bool) -> Result<bool> {
        match self.get(key) {
            None => Ok(default),
            Some("true" | "yes" | "1" | "on") => Ok(true),
            Some("false" | "no" | "0" | "off") => Ok(false),
            Some(v) => Err(Error::config(format!(
                "`{key}`: expected a boolean, got `{v}`"
            ))),
        }
    }

    pub fn str_or<'a>(&'a self, key: &str, default: &'a str) -> &'a str {
        self.get(key).unwrap_or(default)
    }

    /// Comma-separated list.
    pub fn list(&self, key: &str) -> Option<Vec<String>> {
        self.get(key).map(|v| {
            v.split(',')
                .map(|s| s.trim().to_string())
                .filter(|s| !s.is_empty())
                .collect()
        })
    }

    pub fn f64_list_or(&self, key: &str, default: &[f64]) -> Result<Vec<f64>> {
        match self.list(key) {
            None => Ok(default.to_vec()),
            Some(items) => items
                .iter()
                .map(|s| {
                    s.parse()
                        .map_err(|_| Error::config(format!("`{key}`: cannot parse `{s}`")))
                })
                .collect(),
        }
    }

    /// `(lo, hi)` from a two-element list.
    pub fn window_or(&self, key: &str, default: (f64, f64)) -> Result<(f64, f64)> {
        let v = self.f64_list_or(key, &[default.0, default.1])?;
        match v[..] {
            [lo, hi] if lo < hi => Ok((lo, hi)),
            _ => Err(Error::config(format!(
                "`{key}` must be `lo, hi` with lo < hi"
            ))),
        }
    }

    pub fn keys(&self) -> impl Iterator<Item = &String> {
        self.entries.keys()
    }

    /// Keys present in the file that no experiment code asked for.
    pub fn unused_keys(&self) -> Vec<String> {
        let used = self.used.borrow();
        self.entries
            .keys()
            .filter(|k| !used.contains(*k))
            .cloned()
            .collect()
    }

    /// Canonical `key=value` lines, sorted.
    pub fn canonical(&self) -> String {
        self.entries
            .iter()
            .map(|(k, v)| format!("{k}={v}\n"))
            .collect()
    }

    pub fn hash(&self) -> String {
        sha256_hex(self.canonical().as_bytes())
    }
}

pub fn sha256_hex(bytes: &[u8]) -> String {
    Sha256::digest(bytes)
        .iter()
        .map(|b| format!("{b:02x}"))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sections_comments_and_lists() {
        let c = Config::parse(
            "kind = modes # trailing\n[params]\na = 0.5\n; note\n[grid]\nn = 2^10\nxs = 1, 2 ,3\n",
        )
        .unwrap();
        assert_eq!(c.get("kind"), Some("modes"));
        assert_eq!(c.f64_or("params.a", 0.0).unwrap(), 0.5);
        assert_eq!(c.usize_or("grid.n", 0).unwrap(), 1024);
        assert_eq!(c.f64_list_or("grid.xs", &[]).unwrap(), vec![1.0, 2.0, 3.0]);
        assert_eq!(c.f64_or("missing", 7.0).unwrap(), 7.0);
        assert!(c.unused_keys().is_empty());
    }

    #[test]
    fn hash_ignores_layout() {
        let a = Config::parse("[p]\na=1\nb = 2\n").unwrap();
        let b = Config::parse("# x\n[p]\nb=2\n\na = 1").unwrap();
        assert_eq!(a.hash(), b.hash());
        assert_ne!(a.hash(), Config::parse("[p]\na=1\nb=3").unwrap().hash());
    }

    #[test]
    fn rejects_malformed() {
        assert!(Config::parse("novalue").is_err());
        assert!(Config::parse("[open\na=1").is_err());
        assert!(Config::parse("a=1\na=2").is_err());
        assert!(Config::parse("a=x").unwrap().f64_or("a", 0.0).is_err());
        assert!(Config::parse("n=1.5").unwrap().usize_or("n", 0).is_err());
    }
}
