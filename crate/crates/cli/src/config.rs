//! Flat `key = value` configuration with strict key checking.
//!
//! Values may use `pi`, products with `*` and one `/`, so `3*pi/4` and `1/3`
//! are both accepted wherever a real number is expected.

use std::collections::BTreeMap;
use std::fmt;

/// One accepted key. `default: None` marks an optional key with no value.
#[derive(Debug, Clone, Copy)]
pub struct KeySpec {
    pub name: &'static str,
    pub default: Option<&'static str>,
    pub help: &'static str,
}

pub const fn key(name: &'static str, default: &'static str, help: &'static str) -> KeySpec {
    KeySpec {
        name,
        default: Some(default),
        help,
    }
}

pub const fn optional(name: &'static str, help: &'static str) -> KeySpec {
    KeySpec {
        name,
        default: None,
        help,
    }
}

/// Keys every experiment accepts.
pub const COMMON_KEYS: &[KeySpec] = &[
    key("out", "out", "output directory"),
    key("format", "csv", "csv or json"),
];

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ConfigError {
    pub field: String,
    pub message: String,
}

impl ConfigError {
    pub fn new(field: impl Into<String>, message: impl Into<String>) -> Self {
        Self {
            field: field.into(),
            message: message.into(),
        }
    }
}

impl fmt::Display for ConfigError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "config error in `{}`: {}", self.field, self.message)
    }
}

impl std::error::Error for ConfigError {}

/// Parses `key = value` lines; `#` starts a comment.
pub fn parse_entries(text: &str, origin: &str) -> Result<Vec<(String, String)>, ConfigError> {
    let mut out = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let (k, v) = line.split_once('=').ok_or_else(|| {
            ConfigError::new(
                format!("{origin}:{}", i + 1),
                format!("expected `key = value`, got `{line}`"),
            )
        })?;
        out.push((k.trim().to_string(), v.trim().to_string()));
    }
    Ok(out)
}

/// Parses one `key=value` override.
pub fn parse_override(text: &str) -> Result<(String, String), ConfigError> {
    let (k, v) = text
        .split_once('=')
        .ok_or_else(|| ConfigError::new(text, "override must look like key=value"))?;
    Ok((k.trim().to_string(), v.trim().to_string()))
}

/// Resolved configuration: defaults overlaid by entries in order.
#[derive(Debug, Clone, PartialEq)]
pub struct Config {
    values: BTreeMap<String, String>,
}

impl Config {
    pub fn resolve(specs: &[KeySpec], entries: &[(String, String)]) -> Result<Self, ConfigError> {
        let known = |k: &str| COMMON_KEYS.iter().chain(specs).any(|s| s.name == k);
        let mut values = BTreeMap::new();
        for s in COMMON_KEYS.iter().chain(specs) {
            if let Some(d) = s.default {
                values.insert(s.name.to_string(), d.to_string());
            }
        }
        for (k, v) in entries {
            if !known(k) {
                let allowed: Vec<&str> = COMMON_KEYS.iter().chain(specs).map(|s| s.name).collect();
                return Err(ConfigError::new(
                    k.as_str(),
                    format!("unknown key (accepted: {})", allowed.join(", ")),
                ));
            }
            values.insert(k.clone(), v.clone());
        }
        Ok(Self { values })
    }

    pub fn values(&self) -> &BTreeMap<String, String> {
        &self.values
    }

    pub fn get(&self, key: &str) -> Option<&str> {
        self.values.get(key).map(String::as_str)
    }

    pub fn is_set(&self, key: &str) -> bool {
        self.values.contains_key(key)
    }

    fn required(&self, key: &str) -> Result<&str, ConfigError> {
        self.get(key)
            .ok_or_else(|| ConfigError::new(key, "missing value"))
    }

    pub fn string(&self, key: &str) -> Result<String, ConfigError> {
        self.required(key).map(str::to_string)
    }

    pub fn real(&self, key: &str) -> Result<f64, ConfigError> {
        let raw = self.required(key)?;
        parse_real(raw).ok_or_else(|| ConfigError::new(key, format!("`{raw}` is not a number")))
    }

    pub fn positive_real(&self, key: &str) -> Result<f64, ConfigError> {
        let x = self.real(key)?;
        if !(x > 0.0) {
            return Err(ConfigError::new(key, format!("must be positive, got {x}")));
        }
        Ok(x)
    }

    pub fn count(&self, key: &str, min: usize) -> Result<usize, ConfigError> {
        let raw = self.required(key)?;
        let n: usize = raw
            .parse()
            .map_err(|_| ConfigError::new(key, format!("`{raw}` is not a non-negative integer")))?;
        if n < min {
            return Err(ConfigError::new(key, format!("must be at least {min}, got {n}")));
        }
        Ok(n)
    }

    pub fn reals(&self, key: &str) -> Result<Vec<f64>, ConfigError> {
        let raw = self.required(key)?;
        parse_list(raw).ok_or_else(|| ConfigError::new(key, format!("`{raw}` is not a list of numbers")))
    }

    /// Semicolon-separated vectors, e.g. `1,-0.5; 0.2,0.3`.
    pub fn vectors(&self, key: &str) -> Result<Vec<Vec<f64>>, ConfigError> {
        let raw = self.required(key)?;
        raw.split(';')
            .map(|part| {
                parse_list(part)
                    .ok_or_else(|| ConfigError::new(key, format!("`{}` is not a list of numbers", part.trim())))
            })
            .collect()
    }

    /// `3-8` or `3,5,7`.
    pub fn levels(&self, key: &str) -> Result<Vec<u32>, ConfigError> {
        let raw = self.required(key)?;
        let bad = || ConfigError::new(key, format!("`{raw}` is not a level range like 3-8 or a list like 3,5"));
        let levels: Vec<u32> = match raw.split_once('-') {
            Some((a, b)) => {
                let a: u32 = a.trim().parse().map_err(|_| bad())?;
                let b: u32 = b.trim().parse().map_err(|_| bad())?;
                if a > b {
                    return Err(bad());
                }
                (a..=b).collect()
            }
            None => raw
                .split(',')
                .map(|s| s.trim().parse().map_err(|_| bad()))
                .collect::<Result<_, _>>()?,
        };
        if levels.is_empty() {
            return Err(bad());
        }
        Ok(levels)
    }

    pub fn choice<'a>(&self, key: &str, options: &[&'a str]) -> Result<&'a str, ConfigError> {
        let raw = self.required(key)?;
        options
            .iter()
            .find(|o| **o == raw)
            .copied()
            .ok_or_else(|| ConfigError::new(key, format!("`{raw}` is not one of {}", options.join(", "))))
    }
}

fn parse_factor(text: &str) -> Option<f64> {
    text.split('*').try_fold(1.0, |acc, tok| {
        let tok = tok.trim();
        let x = if tok == "pi" {
            std::f64::consts::PI
        } else {
            tok.parse::<f64>().ok()?
        };
        Some(acc * x)
    })
}

/// A real number, `pi`, or a ratio of `*`-products of those.
pub fn parse_real(text: &str) -> Option<f64> {
    let text = text.trim();
    let (num, den) = match text.split_once('/') {
        Some((n, d)) => (n, Some(d)),
        None => (text, None),
    };
    let mut x = parse_factor(num)?;
    if let Some(d) = den {
        let d = parse_factor(d)?;
        if d == 0.0 {
            return None;
        }
        x /= d;
    }
    x.is_finite().then_some(x)
}

pub fn parse_list(text: &str) -> Option<Vec<f64>> {
    let text = text.trim();
    if text.is_empty() {
        return None;
    }
    text.split(',').map(parse_real).collect()
}
