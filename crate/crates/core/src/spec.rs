//! Component spec strings of the form `name[:key=value,flag,...]`.

use crate::error::{Error, Result};
use crate::rational::{parse_rational, Rational};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SpecString {
    pub name: String,
    pub args: Vec<(String, Option<String>)>,
}

impl SpecString {
    pub fn parse(s: &str) -> Result<Self> {
        let s = s.trim();
        let (name, rest) = s.split_once(':').unwrap_or((s, ""));
        if name.is_empty() {
            return Err(Error::input(format!("empty component name in {s:?}")));
        }
        let args = rest
            .split(',')
            .map(str::trim)
            .filter(|a| !a.is_empty())
            .map(|a| match a.split_once('=') {
                Some((k, v)) => (k.trim().to_string(), Some(v.trim().to_string())),
                None => (a.to_string(), None),
            })
            .collect();
        Ok(SpecString {
            name: name.to_string(),
            args,
        })
    }

    /// Fails on any key or flag outside `allowed`.
    pub fn expect_keys(&self, allowed: &[&str]) -> Result<()> {
        for (k, _) in &self.args {
            if !allowed.contains(&k.as_str()) {
                return Err(Error::input(format!(
                    "unknown option {k:?} for {}",
                    self.name
                )));
            }
        }
        Ok(())
    }

    pub fn value(&self, key: &str) -> Option<&str> {
        self.args
            .iter()
            .find(|(k, _)| k == key)
            .and_then(|(_, v)| v.as_deref())
    }

    pub fn flag(&self, key: &str) -> bool {
        self.args.iter().any(|(k, v)| k == key && v.is_none())
    }

    pub fn rational(&self, key: &str) -> Result<Option<Rational>> {
        self.value(key).map(parse_rational).transpose()
    }

    pub fn required_rational(&self, key: &str) -> Result<Rational> {
        self.rational(key)?
            .ok_or_else(|| Error::input(format!("{} needs {key}=<rational>", self.name)))
    }

    pub fn float(&self, key: &str) -> Result<Option<f64>> {
        self.value(key)
            .map(|v| {
                v.parse::<f64>()
                    .map_err(|_| Error::input(format!("{key} must be a number, got {v:?}")))
            })
            .transpose()
    }

    pub fn integer(&self, key: &str) -> Result<Option<usize>> {
        self.value(key)
            .map(|v| {
                v.parse::<usize>().map_err(|_| {
                    Error::input(format!("{key} must be a nonnegative integer, got {v:?}"))
                })
            })
            .transpose()
    }
}
