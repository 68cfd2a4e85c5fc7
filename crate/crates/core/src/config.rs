//! Layered key/value configuration.
//!
//! Precedence: built-in defaults < config file(s) < explicit overrides
//! (command-line flags). Keys are dotted lowercase identifiers, values are
//! free-form strings parsed on access. The format is plain text: one
//! `key = value` per line, `#` starts a comment.

use std::collections::BTreeMap;
use std::path::Path;

use crate::error::{Error, Result};

/// Built-in defaults shipped with the crate. Every numeric default used
/// anywhere in the pipeline appears here so a deployment can audit and
/// override any of them.
pub const DEFAULT_CONF: &str = include_str!("../data/default.conf");

#[derive(Debug, Clone)]
pub struct Config {
    map: BTreeMap<String, String>,
}

impl Default for Config {
    fn default() -> Self {
        let mut cfg = Config { map: BTreeMap::new() };
        cfg.layer_str(DEFAULT_CONF)
            .expect("built-in defaults must parse");
        cfg
    }
}

impl Config {
    /// Empty configuration with no defaults. Mostly for tests.
    pub fn empty() -> Self {
        Config { map: BTreeMap::new() }
    }

    /// Parse `text` and layer it over the current values.
    pub fn layer_str(&mut self, text: &str) -> Result<()> {
        for (lineno, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (key, value) = line.split_once('=').ok_or_else(|| Error::Config(format!(
                "line {}: expected `key = value`, got {:?}",
                lineno + 1,
                raw
            )))?;
            self.map
                .insert(key.trim().to_string(), value.trim().to_string());
        }
        Ok(())
    }

    /// Layer a config file over the current values.
    pub fn layer_file(&mut self, path: &Path) -> Result<()> {
        let text = std::fs::read_to_string(path)?;
        self.layer_str(&text)
    }

    /// Set a single key (highest layer; used for command-line overrides).
    pub fn set(&mut self, key: &str, value: &str) {
        self.map.insert(key.trim().to_string(), value.trim().to_string());
    }

    pub fn get_str(&self, key: &str) -> Result<&str> {
        self.map
            .get(key)
            .map(|s| s.as_str())
            .ok_or_else(|| Error::Config(format!("missing config key {key:?}")))
    }

    pub fn get_f64(&self, key: &str) -> Result<f64> {
        let s = self.get_str(key)?;
        s.parse()
            .map_err(|_| Error::Config(format!("key {key:?}: {s:?} is not a number")))
    }

    pub fn get_i64(&self, key: &str) -> Result<i64> {
        let s = self.get_str(key)?;
        s.parse()
            .map_err(|_| Error::Config(format!("key {key:?}: {s:?} is not an integer")))
    }

    pub fn get_usize(&self, key: &str) -> Result<usize> {
        let s = self.get_str(key)?;
        s.parse()
            .map_err(|_| Error::Config(format!("key {key:?}: {s:?} is not an unsigned integer")))
    }

    pub fn get_u64(&self, key: &str) -> Result<u64> {
        let s = self.get_str(key)?;
        s.parse()
            .map_err(|_| Error::Config(format!("key {key:?}: {s:?} is not an unsigned integer")))
    }

    /// Whitespace-separated list of numbers.
    pub fn get_f64_list(&self, key: &str) -> Result<Vec<f64>> {
        let s = self.get_str(key)?;
        s.split_whitespace()
            .map(|tok| {
                tok.parse()
                    .map_err(|_| Error::Config(format!("key {key:?}: {tok:?} is not a number")))
            })
            .collect()
    }

    /// Iterate all keys with a given prefix (e.g. `mf.static.`).
    pub fn keys_with_prefix<'a>(&'a self, prefix: &'a str) -> impl Iterator<Item = &'a str> + 'a {
        self.map
            .keys()
            .filter(move |k| k.starts_with(prefix))
            .map(|k| k.as_str())
    }

    pub fn contains(&self, key: &str) -> bool {
        self.map.contains_key(key)
    }
}
