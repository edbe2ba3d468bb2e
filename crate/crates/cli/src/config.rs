//! Flat `key = value` run files. Keys are the long flag names without the
//! leading dashes; `_` and `-` are interchangeable.

use std::collections::BTreeMap;
use std::path::Path;
use std::str::FromStr;

use crate::failure::{CmdResult, Failure};

#[derive(Debug, Default, Clone, PartialEq)]
pub struct Config {
    values: BTreeMap<String, String>,
}

fn normalize(key: &str) -> String {
    key.trim().replace('_', "-")
}

impl Config {
    pub fn parse(text: &str) -> CmdResult<Self> {
        let mut values = BTreeMap::new();
        for (i, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let Some((key, value)) = line.split_once('=') else {
                return Err(Failure::Usage(format!(
                    "config line {}: expected key = value, got {raw:?}",
                    i + 1
                )));
            };
            let key = normalize(key);
            if key.is_empty() {
                return Err(Failure::Usage(format!("config line {}: empty key", i + 1)));
            }
            if values.insert(key.clone(), value.trim().to_string()).is_some() {
                return Err(Failure::Usage(format!("config line {}: duplicate key {key:?}", i + 1)));
            }
        }
        Ok(Config { values })
    }

    pub fn load(path: Option<&Path>) -> CmdResult<Self> {
        match path {
            None => Ok(Config::default()),
            Some(p) => {
                let text = std::fs::read_to_string(p)
                    .map_err(|e| Failure::Usage(format!("cannot read config {}: {e}", p.display())))?;
                Config::parse(&text)
            }
        }
    }

    /// Reject keys the command does not understand.
    pub fn ensure_known(&self, known: &[&str]) -> CmdResult {
        match self.values.keys().find(|k| !known.contains(&k.as_str())) {
            Some(k) => Err(Failure::Usage(format!(
                "unknown config key {k:?}; expected one of {}",
                known.join(", ")
            ))),
            None => Ok(()),
        }
    }

    /// The flag value if given, else the config value, else `None`.
    pub fn resolve<T: FromStr>(&self, flag: Option<T>, key: &str) -> CmdResult<Option<T>>
    where
        T::Err: std::fmt::Display,
    {
        if flag.is_some() {
            return Ok(flag);
        }
        match self.values.get(key) {
            None => Ok(None),
            Some(v) => v
                .parse()
                .map(Some)
                .map_err(|e| Failure::Usage(format!("config key {key}: cannot parse {v:?}: {e}"))),
        }
    }

    pub fn require<T: FromStr>(&self, flag: Option<T>, key: &str) -> CmdResult<T>
    where
        T::Err: std::fmt::Display,
    {
        self.resolve(flag, key)?
            .ok_or_else(|| Failure::Usage(format!("missing required parameter --{key} (flag or config key)")))
    }

    pub fn flag(&self, flag: bool, key: &str) -> CmdResult<bool> {
        Ok(flag || self.resolve::<bool>(None, key)?.unwrap_or(false))
    }
}
