//! Flat key-value run configuration.
//!
//! Keys are the long flag names. Values are layered: built-in defaults, then
//! a preset, then a config file, then command-line flags.

use std::collections::BTreeMap;
use std::f64::consts::PI;
use std::path::Path;

use crate::error::{CliError, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub enum Source {
    Default,
    Preset,
    File,
    Flag,
}

impl Source {
    pub fn name(self) -> &'static str {
        match self {
            Source::Default => "default",
            Source::Preset => "preset",
            Source::File => "file",
            Source::Flag => "flag",
        }
    }
}

#[derive(Debug, Clone, Default)]
pub struct Settings {
    values: BTreeMap<String, (String, Source)>,
}

impl Settings {
    pub fn new() -> Self {
        Self::default()
    }

    /// Sets `key`, keeping an existing value of higher precedence.
    pub fn set(&mut self, key: &str, value: impl Into<String>, source: Source) {
        let value = value.into();
        match self.values.get(key) {
            Some((_, s)) if *s > source => {}
            _ => {
                self.values.insert(key.to_string(), (value, source));
            }
        }
    }

    /// Fills `key` with a derived default when nothing set it.
    pub fn default_value(&mut self, key: &str, value: impl Into<String>) {
        self.set(key, value, Source::Default);
    }

    pub fn contains(&self, key: &str) -> bool {
        self.values.contains_key(key)
    }

    pub fn raw(&self, key: &str) -> Option<&str> {
        self.values.get(key).map(|v| v.0.as_str())
    }

    pub fn source(&self, key: &str) -> Option<Source> {
        self.values.get(key).map(|v| v.1)
    }

    pub fn keys(&self) -> impl Iterator<Item = &str> {
        self.values.keys().map(|k| k.as_str())
    }

    pub fn iter(&self) -> impl Iterator<Item = (&str, &str, Source)> {
        self.values.iter().map(|(k, (v, s))| (k.as_str(), v.as_str(), *s))
    }

    pub fn f64(&self, key: &str) -> Result<Option<f64>> {
        self.raw(key).map(|v| parse_real(key, v)).transpose()
    }

    pub fn u64(&self, key: &str) -> Result<Option<u64>> {
        self.raw(key)
            .map(|v| {
                v.trim()
                    .parse::<u64>()
                    .map_err(|_| CliError::invalid(key, format!("`{v}` is not a nonnegative integer")))
            })
            .transpose()
    }

    pub fn bool(&self, key: &str) -> Result<bool> {
        match self.raw(key).map(|v| v.trim()) {
            None => Ok(false),
            Some("true" | "yes" | "1") => Ok(true),
            Some("false" | "no" | "0") => Ok(false),
            Some(v) => Err(CliError::invalid(key, format!("`{v}` is not a boolean"))),
        }
    }

    pub fn required_f64(&self, key: &str) -> Result<f64> {
        self.f64(key)?.ok_or_else(|| CliError::invalid(key, "missing"))
    }

    pub fn required_u64(&self, key: &str) -> Result<u64> {
        self.u64(key)?.ok_or_else(|| CliError::invalid(key, "missing"))
    }

    /// Rejects every key outside `allowed`, naming the first offender.
    pub fn check_keys(&self, allowed: &[&str], context: &str) -> Result<()> {
        for (k, _, s) in self.iter() {
            if !allowed.contains(&k) {
                return Err(CliError::invalid(
                    k,
                    format!("unknown key for {context} (set by {})", s.name()),
                ));
            }
        }
        Ok(())
    }
}

/// Real number, optionally written as a multiple of pi: `1.5`, `pi`,
/// `-pi/2`, `2pi`, `200*pi+pi/4`.
pub fn parse_real(field: &str, text: &str) -> Result<f64> {
    let s: String = text.chars().filter(|c| !c.is_whitespace()).collect();
    let bad = || CliError::invalid(field, format!("`{text}` is not a number"));
    if s.is_empty() {
        return Err(bad());
    }
    if let Ok(v) = s.parse::<f64>() {
        if v.is_finite() {
            return Ok(v);
        }
        return Err(CliError::invalid(field, format!("`{text}` is not finite")));
    }
    // split into signed terms at + and - that do not follow an exponent marker
    let mut terms = Vec::new();
    let mut start = 0;
    let bytes = s.as_bytes();
    for i in 1..bytes.len() {
        if (bytes[i] == b'+' || bytes[i] == b'-') && !matches!(bytes[i - 1], b'e' | b'E' | b'*' | b'/') {
            terms.push(&s[start..i]);
            start = i;
        }
    }
    terms.push(&s[start..]);
    let mut total = 0.0;
    for t in terms {
        total += parse_term(t).ok_or_else(bad)?;
    }
    Ok(total)
}

fn parse_term(t: &str) -> Option<f64> {
    let (sign, body) = match t.as_bytes().first()? {
        b'+' => (1.0, &t[1..]),
        b'-' => (-1.0, &t[1..]),
        _ => (1.0, t),
    };
    let (num, den) = match body.split_once('/') {
        Some((a, b)) => (a, Some(b)),
        None => (body, None),
    };
    let num_value = if let Some(k) = num.strip_suffix("pi") {
        let k = k.strip_suffix('*').unwrap_or(k);
        let k = if k.is_empty() { 1.0 } else { k.parse::<f64>().ok()? };
        k * PI
    } else {
        num.parse::<f64>().ok()?
    };
    let den_value = match den {
        Some(d) => d.parse::<f64>().ok()?,
        None => 1.0,
    };
    let v = sign * num_value / den_value;
    v.is_finite().then_some(v)
}

/// Reads `key = value` lines; `#` starts a comment.
pub fn parse_config_text(text: &str, origin: &str) -> Result<Vec<(String, String)>> {
    let mut out = Vec::new();
    for (i, line) in text.lines().enumerate() {
        let line = line.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let (k, v) = line.split_once('=').ok_or_else(|| {
            CliError::invalid(
                format!("{origin}:{}", i + 1),
                format!("expected `key = value`, found `{line}`"),
            )
        })?;
        let k = k.trim().trim_start_matches("--");
        if k.is_empty() {
            return Err(CliError::invalid(format!("{origin}:{}", i + 1), "empty key"));
        }
        out.push((k.to_string(), v.trim().to_string()));
    }
    Ok(out)
}

pub fn read_config_file(path: &Path) -> Result<Vec<(String, String)>> {
    let text = std::fs::read_to_string(path).map_err(|source| CliError::Io {
        path: path.display().to_string(),
        source,
    })?;
    parse_config_text(&text, &path.display().to_string())
}

/// `lo:hi:density`.
pub fn parse_scan(text: &str) -> Result<(f64, f64, f64)> {
    let parts: Vec<&str> = text.split(':').collect();
    if parts.len() != 3 {
        return Err(CliError::invalid("scan", format!("`{text}` is not lo:hi:density")));
    }
    Ok((
        parse_real("scan", parts[0])?,
        parse_real("scan", parts[1])?,
        parse_real("scan", parts[2])?,
    ))
}

/// `a..b` (inclusive) or a comma list; returns a sorted list without
/// duplicates.
pub fn parse_ells(text: &str) -> Result<Vec<u64>> {
    let num = |s: &str| {
        s.trim()
            .parse::<u64>()
            .map_err(|_| CliError::invalid("ells", format!("`{s}` is not a positive integer")))
    };
    let mut out = Vec::new();
    for part in text.split(',').filter(|p| !p.trim().is_empty()) {
        if let Some((a, b)) = part.split_once("..") {
            let (a, b) = (num(a)?, num(b.trim_start_matches('='))?);
            if a > b {
                return Err(CliError::invalid("ells", format!("empty range `{part}`")));
            }
            if b - a > 10_000_000 {
                return Err(CliError::invalid("ells", format!("range `{part}` is too long")));
            }
            out.extend(a..=b);
        } else {
            out.push(num(part)?);
        }
    }
    if out.is_empty() {
        return Err(CliError::invalid("ells", "no trial factors given"));
    }
    if out.contains(&0) {
        return Err(CliError::invalid("ells", "trial factors start at 1"));
    }
    out.sort_unstable();
    out.dedup();
    Ok(out)
}
