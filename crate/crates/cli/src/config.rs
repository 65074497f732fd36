//! Flat key-value config files: `key = value` lines, `#` comments.
//! Physical quantities carry explicit unit suffixes in their key names
//! (_nm, _hz, _k, _s, _m, _w) to keep cross-module units straight.

use std::collections::BTreeMap;
use std::path::Path;

use anyhow::{anyhow, Result};

#[derive(Debug, Clone, Default)]
pub struct Config {
    pub values: BTreeMap<String, String>,
    /// Raw file bytes, hashed into result provenance.
    pub raw: String,
}

impl Config {
    pub fn parse(text: &str) -> Result<Config> {
        let mut values = BTreeMap::new();
        for (lineno, line) in text.lines().enumerate() {
            let line = line.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (key, value) = line
                .split_once('=')
                .ok_or_else(|| anyhow!("line {}: expected `key = value`", lineno + 1))?;
            values.insert(key.trim().to_owned(), value.trim().to_owned());
        }
        Ok(Config {
            values,
            raw: text.to_owned(),
        })
    }

    pub fn load(path: &Path) -> Result<Config> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| anyhow!("cannot read config {}: {e}", path.display()))?;
        Self::parse(&text)
    }

    pub fn get(&self, key: &str) -> Option<&str> {
        self.values.get(key).map(|s| s.as_str())
    }
}

/// Collects every validation problem instead of failing fast.
#[derive(Debug, Default)]
pub struct Validation {
    pub errors: Vec<String>,
    pub warnings: Vec<String>,
}

impl Validation {
    pub fn error(&mut self, message: impl Into<String>) {
        self.errors.push(message.into());
    }

    pub fn warn(&mut self, message: impl Into<String>) {
        self.warnings.push(message.into());
    }

    /// Read an f64 and run the predicate; records errors, returns the
    /// fallback when missing or invalid.
    pub fn f64_checked(
        &mut self,
        config: &Config,
        key: &str,
        fallback: Option<f64>,
        check: impl Fn(f64) -> Option<String>,
    ) -> f64 {
        match config.get(key) {
            Some(text) => match text.parse::<f64>() {
                Ok(v) => {
                    if let Some(problem) = check(v) {
                        self.error(format!("{key}: {problem}"));
                    }
                    v
                }
                Err(e) => {
                    self.error(format!("{key}: not a number ({e})"));
                    fallback.unwrap_or(0.0)
                }
            },
            None => match fallback {
                Some(v) => v,
                None => {
                    self.error(format!("{key}: missing required key"));
                    0.0
                }
            },
        }
    }

    pub fn usize_checked(&mut self, config: &Config, key: &str, fallback: Option<usize>) -> usize {
        match config.get(key) {
            Some(text) => match text.parse::<usize>() {
                Ok(v) => v,
                Err(e) => {
                    self.error(format!("{key}: not a non-negative integer ({e})"));
                    fallback.unwrap_or(0)
                }
            },
            None => match fallback {
                Some(v) => v,
                None => {
                    self.error(format!("{key}: missing required key"));
                    0
                }
            },
        }
    }

    pub fn positive(v: f64) -> Option<String> {
        (!(v > 0.0)).then(|| format!("must be > 0, got {v}"))
    }

    pub fn non_negative(v: f64) -> Option<String> {
        (!(v >= 0.0)).then(|| format!("must be >= 0, got {v}"))
    }
}
