//! Experiment configuration: a subcommand name and a flat parameter map.
//!
//! On disk this is `key = value` text, one pair per line, with `#` comment
//! lines. Keys are the long flag names without the leading dashes.

use std::collections::BTreeMap;
use std::fmt::Display;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{CliError, CliResult};

/// Every parameter key accepted on the command line or in a config file.
pub const KEYS: &[&str] = &[
    "d",
    "n",
    "r",
    "a",
    "delta",
    "radius",
    "samples",
    "seed",
    "threads",
    "out",
    "format",
    "deterministic-reduce",
    "timing",
    "eta",
    "k-max",
    "theta-grid",
    "n-list",
    "sources",
    "tail-c",
    "budget",
];

const SUBCOMMAND_KEY: &str = "subcommand";

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct ExperimentConfig {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub subcommand: Option<String>,
    #[serde(flatten)]
    pub params: BTreeMap<String, String>,
}

fn check_value(key: &str, value: &str) -> CliResult<()> {
    if value.is_empty() || value.trim() != value || value.contains(['\n', '\r']) {
        return Err(CliError::invalid(
            key,
            value,
            "values must be nonempty single-line text without surrounding spaces",
        ));
    }
    Ok(())
}

impl ExperimentConfig {
    pub fn set(&mut self, key: &str, value: impl Into<String>) -> CliResult<()> {
        let value = value.into();
        check_value(key, &value)?;
        if key == SUBCOMMAND_KEY {
            self.subcommand = Some(value);
            return Ok(());
        }
        if !KEYS.contains(&key) {
            return Err(CliError::UnknownKey {
                key: key.to_string(),
                line: 0,
            });
        }
        self.params.insert(key.to_string(), value);
        Ok(())
    }

    pub fn get(&self, key: &str) -> Option<&str> {
        self.params.get(key).map(String::as_str)
    }

    pub fn parse(text: &str) -> CliResult<Self> {
        let mut config = Self::default();
        for (i, raw) in text.lines().enumerate() {
            let line = i + 1;
            let trimmed = raw.trim();
            if trimmed.is_empty() || trimmed.starts_with('#') {
                continue;
            }
            let (key, value) = trimmed.split_once('=').ok_or(CliError::ConfigSyntax {
                line,
                message: format!("expected `key = value`, got `{trimmed}`"),
            })?;
            let (key, value) = (key.trim(), value.trim());
            if key != SUBCOMMAND_KEY && !KEYS.contains(&key) {
                return Err(CliError::UnknownKey {
                    key: key.to_string(),
                    line,
                });
            }
            let seen = if key == SUBCOMMAND_KEY {
                config.subcommand.is_some()
            } else {
                config.params.contains_key(key)
            };
            if seen {
                return Err(CliError::ConfigSyntax {
                    line,
                    message: format!("duplicate key `{key}`"),
                });
            }
            config.set(key, value).map_err(|e| match e {
                CliError::InvalidValue { reason, .. } => CliError::ConfigSyntax {
                    line,
                    message: reason,
                },
                other => other,
            })?;
        }
        Ok(config)
    }

    pub fn to_text(&self) -> String {
        let mut out = String::new();
        if let Some(s) = &self.subcommand {
            out.push_str(&format!("{SUBCOMMAND_KEY} = {s}\n"));
        }
        for (k, v) in &self.params {
            out.push_str(&format!("{k} = {v}\n"));
        }
        out
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("string maps serialize")
    }

    /// Inverse of [`ExperimentConfig::to_json`], with the same key checks as
    /// the text format.
    pub fn from_json(line: &str) -> CliResult<Self> {
        let raw: BTreeMap<String, String> =
            serde_json::from_str(line).map_err(|e| CliError::ConfigSyntax {
                line: 1,
                message: e.to_string(),
            })?;
        let mut config = Self::default();
        for (k, v) in raw {
            config.set(&k, v)?;
        }
        Ok(config)
    }

    /// `other` wins on every key it sets.
    pub fn overlay(&mut self, other: &ExperimentConfig) {
        if other.subcommand.is_some() {
            self.subcommand.clone_from(&other.subcommand);
        }
        for (k, v) in &other.params {
            self.params.insert(k.clone(), v.clone());
        }
    }

    pub fn value<T>(&self, key: &str) -> CliResult<Option<T>>
    where
        T: FromStr,
        T::Err: Display,
    {
        self.get(key)
            .map(|v| parse_number(key, v))
            .transpose()
    }

    pub fn value_or<T>(&self, key: &str, default: T) -> CliResult<T>
    where
        T: FromStr,
        T::Err: Display,
    {
        Ok(self.value(key)?.unwrap_or(default))
    }

    pub fn require<T>(&self, key: &'static str) -> CliResult<T>
    where
        T: FromStr,
        T::Err: Display,
    {
        self.value(key)?.ok_or_else(|| CliError::MissingParameter {
            key,
            subcommand: self.subcommand.clone().unwrap_or_default(),
        })
    }

    pub fn flag(&self, key: &str) -> CliResult<bool> {
        match self.get(key) {
            None | Some("false") => Ok(false),
            Some("true") => Ok(true),
            Some(v) => Err(CliError::invalid(key, v, "expected true or false")),
        }
    }

    /// Comma-separated list.
    pub fn list<T>(&self, key: &str) -> CliResult<Option<Vec<T>>>
    where
        T: FromStr,
        T::Err: Display,
    {
        self.get(key)
            .map(|v| v.split(',').map(|item| parse_number(key, item.trim())).collect())
            .transpose()
    }
}

/// Integers also accept scientific shorthand such as `1e6`.
fn parse_number<T>(key: &str, text: &str) -> CliResult<T>
where
    T: FromStr,
    T::Err: Display,
{
    match text.parse::<T>() {
        Ok(v) => Ok(v),
        Err(e) => {
            if let Ok(x) = text.parse::<f64>() {
                if x.is_finite() && x.fract() == 0.0 && x.abs() < 1e18 {
                    if let Ok(v) = format!("{}", x as i64).parse::<T>() {
                        return Ok(v);
                    }
                }
            }
            Err(CliError::invalid(key, text, e.to_string()))
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn text_round_trip() {
        let mut c = ExperimentConfig::default();
        c.set("subcommand", "mc").unwrap();
        c.set("d", "3").unwrap();
        c.set("n-list", "10,100").unwrap();
        let text = c.to_text();
        assert_eq!(ExperimentConfig::parse(&text).unwrap(), c);
        assert_eq!(ExperimentConfig::from_json(&c.to_json()).unwrap(), c);
    }

    #[test]
    fn comments_and_errors() {
        let c = ExperimentConfig::parse("# header\n\n  d = 4 \nsamples=10\n").unwrap();
        assert_eq!(c.get("d"), Some("4"));
        assert_eq!(c.value::<u64>("samples").unwrap(), Some(10));
        assert!(matches!(
            ExperimentConfig::parse("colour = red"),
            Err(CliError::UnknownKey { line: 1, .. })
        ));
        assert!(matches!(
            ExperimentConfig::parse("d = 3\nd = 4"),
            Err(CliError::ConfigSyntax { line: 2, .. })
        ));
        assert!(ExperimentConfig::parse("d 3").is_err());
    }

    #[test]
    fn numbers() {
        let c = ExperimentConfig::parse("samples = 1e6\nd = three").unwrap();
        assert_eq!(c.value::<u64>("samples").unwrap(), Some(1_000_000));
        let err = c.value::<u32>("d").unwrap_err().to_string();
        assert!(err.contains("--d"), "{err}");
    }
}
