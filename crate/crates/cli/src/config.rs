//! Flat `key = value` configuration files.
//!
//! Values resolve with the precedence command-line flag, then config file,
//! then built-in default. Keys use the long flag names (`lambda1`,
//! `max-iter`, ...); underscores are accepted in place of dashes.

use std::collections::BTreeMap;
use std::fmt::Display;
use std::path::Path;
use std::str::FromStr;

use crate::error::{io_err, CliError, CliResult};

/// Every key some subcommand understands.
pub const KNOWN_KEYS: &[&str] = &[
    "n",
    "amplitude",
    "noise-sigma",
    "outlier-ratio",
    "outlier-amplitude",
    "seed",
    "method",
    "gamma",
    "lambda",
    "lambda1",
    "lambda2",
    "window",
    "rho",
    "max-iter",
    "eps-abs",
    "eps-rel",
    "weight-floor",
    "ratios",
    "methods",
    "seeds",
    "metrics",
];

#[derive(Debug, Clone, Default, PartialEq)]
pub struct Config {
    origin: String,
    values: BTreeMap<String, (usize, String)>,
}

fn normalize(key: &str) -> String {
    key.trim().to_ascii_lowercase().replace('_', "-")
}

impl Config {
    pub fn load(path: &Path) -> CliResult<Self> {
        let text = std::fs::read_to_string(path).map_err(io_err(path))?;
        Self::parse(&text, &path.display().to_string())
    }

    pub fn parse(text: &str, origin: &str) -> CliResult<Self> {
        let mut values = BTreeMap::new();
        for (i, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let err = |msg: String| CliError::Parse {
                origin: origin.to_string(),
                line: i + 1,
                msg,
            };
            let (k, v) = line
                .split_once('=')
                .ok_or_else(|| err(format!("expected key = value, got '{line}'")))?;
            let key = normalize(k);
            if !KNOWN_KEYS.contains(&key.as_str()) {
                return Err(err(format!("unknown key '{key}'")));
            }
            if values.insert(key.clone(), (i + 1, v.trim().to_string())).is_some() {
                return Err(err(format!("duplicate key '{key}'")));
            }
        }
        Ok(Self {
            origin: origin.to_string(),
            values,
        })
    }

    pub fn raw(&self, key: &str) -> Option<&str> {
        self.values.get(key).map(|(_, v)| v.as_str())
    }

    pub fn get<T>(&self, key: &str) -> CliResult<Option<T>>
    where
        T: FromStr,
        T::Err: Display,
    {
        match self.values.get(key) {
            None => Ok(None),
            Some((line, v)) => v.parse().map(Some).map_err(|e| CliError::Parse {
                origin: self.origin.clone(),
                line: *line,
                msg: format!("bad value for '{key}': {e}"),
            }),
        }
    }

    /// Flag if given, else config value, else `default`.
    pub fn resolve<T>(&self, flag: Option<T>, key: &str, default: T) -> CliResult<T>
    where
        T: FromStr,
        T::Err: Display,
    {
        match flag {
            Some(v) => Ok(v),
            None => Ok(self.get(key)?.unwrap_or(default)),
        }
    }
}
