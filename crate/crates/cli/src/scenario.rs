//! Line-oriented `key = value` scenario files.
//!
//! A key may be given on the command line or in the file. Giving it in both
//! places with different values is an error.

use std::collections::BTreeMap;
use std::fmt::{Debug, Display};
use std::str::FromStr;

use thiserror::Error;

#[derive(Debug, Error, PartialEq)]
pub enum ScenarioError {
    #[error("scenario line {line}: expected `key = value`, got `{text}`")]
    Syntax { line: usize, text: String },

    #[error("scenario line {line}: key `{key}` already set on line {first}")]
    Duplicate {
        line: usize,
        first: usize,
        key: String,
    },

    #[error("scenario line {line}: cannot parse `{value}` for `{key}`: {reason}")]
    Value {
        line: usize,
        key: String,
        value: String,
        reason: String,
    },

    #[error("`{key}` is {file} in the scenario file but {cli} on the command line")]
    Conflict {
        key: String,
        file: String,
        cli: String,
    },

    #[error("scenario line {line}: key `{key}` does not apply here")]
    Unused { line: usize, key: String },
}

#[derive(Debug, Default, Clone)]
pub struct ScenarioFile {
    entries: BTreeMap<String, (usize, String)>,
}

fn normalize(key: &str) -> String {
    key.trim().to_ascii_lowercase().replace('_', "-")
}

impl ScenarioFile {
    pub fn parse(text: &str) -> Result<Self, ScenarioError> {
        let mut entries: BTreeMap<String, (usize, String)> = BTreeMap::new();
        for (i, raw) in text.lines().enumerate() {
            let line = i + 1;
            let body = raw.split('#').next().unwrap_or("").trim();
            if body.is_empty() {
                continue;
            }
            let (key, value) = body
                .split_once('=')
                .map(|(k, v)| (normalize(k), v.trim().to_string()))
                .filter(|(k, v)| !k.is_empty() && !v.is_empty())
                .ok_or_else(|| ScenarioError::Syntax {
                    line,
                    text: raw.to_string(),
                })?;
            if let Some(&(first, _)) = entries.get(&key) {
                return Err(ScenarioError::Duplicate { line, first, key });
            }
            entries.insert(key, (line, value));
        }
        Ok(Self { entries })
    }

    /// Resolves `key` from the command line value and the file.
    pub fn take<T>(&mut self, key: &str, cli: Option<T>) -> Result<Option<T>, ScenarioError>
    where
        T: FromStr + PartialEq + Debug,
        T::Err: Display,
    {
        let Some((line, raw)) = self.entries.remove(key) else {
            return Ok(cli);
        };
        let from_file = raw.parse::<T>().map_err(|e| ScenarioError::Value {
            line,
            key: key.to_string(),
            value: raw.clone(),
            reason: e.to_string(),
        })?;
        match cli {
            Some(c) if c != from_file => Err(ScenarioError::Conflict {
                key: key.to_string(),
                file: format!("{from_file:?}"),
                cli: format!("{c:?}"),
            }),
            _ => Ok(Some(from_file)),
        }
    }

    /// Fails on any key no command consumed.
    pub fn finish(self) -> Result<(), ScenarioError> {
        match self.entries.into_iter().next() {
            Some((key, (line, _))) => Err(ScenarioError::Unused { line, key }),
            None => Ok(()),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_comments_and_spacing() {
        let mut f = ScenarioFile::parse("# sweep\n\ntrials = 8  # fewer\nsnr_lo=10\n").unwrap();
        assert_eq!(f.take::<usize>("trials", None), Ok(Some(8)));
        assert_eq!(f.take::<f64>("snr-lo", None), Ok(Some(10.0)));
        assert_eq!(f.take::<u64>("seed", Some(3)), Ok(Some(3)));
        assert!(f.finish().is_ok());
    }

    #[test]
    fn rejects_bad_lines() {
        assert!(matches!(
            ScenarioFile::parse("trials 8"),
            Err(ScenarioError::Syntax { line: 1, .. })
        ));
        assert!(matches!(
            ScenarioFile::parse("trials ="),
            Err(ScenarioError::Syntax { .. })
        ));
        assert!(matches!(
            ScenarioFile::parse("seed = 1\nseed = 2"),
            Err(ScenarioError::Duplicate {
                line: 2,
                first: 1,
                ..
            })
        ));
    }

    #[test]
    fn conflicts_and_leftovers() {
        let mut f = ScenarioFile::parse("trials = 8\nseed = 4\nbogus = 1").unwrap();
        assert_eq!(f.take("trials", Some(8usize)), Ok(Some(8)));
        assert!(matches!(
            f.take("seed", Some(5u64)),
            Err(ScenarioError::Conflict { .. })
        ));
        assert!(matches!(
            f.finish(),
            Err(ScenarioError::Unused { line: 3, .. })
        ));
        let mut f = ScenarioFile::parse("trials = many").unwrap();
        assert!(matches!(
            f.take::<usize>("trials", None),
            Err(ScenarioError::Value { .. })
        ));
    }
}
