//! Flat `key = value` text with `[section]` headers that prefix keys as
//! `section.key`.

use std::collections::BTreeMap;

use crate::error::CliError;

/// Where a value came from: a line of the config file or a command-line override.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Origin {
    Line(usize),
    Override,
}

impl std::fmt::Display for Origin {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Origin::Line(n) => write!(f, "line {n}"),
            Origin::Override => write!(f, "--override"),
        }
    }
}

#[derive(Debug, Clone, Default)]
pub struct Ini {
    entries: BTreeMap<String, (String, Origin)>,
}

impl Ini {
    pub fn parse(text: &str) -> Result<Self, CliError> {
        let mut ini = Ini::default();
        let mut section = String::new();
        for (idx, raw) in text.lines().enumerate() {
            let line_no = idx + 1;
            let line = strip_comment(raw).trim();
            if line.is_empty() {
                continue;
            }
            if let Some(rest) = line.strip_prefix('[') {
                let name = rest
                    .strip_suffix(']')
                    .map(str::trim)
                    .filter(|s| !s.is_empty() && !s.contains(char::is_whitespace))
                    .ok_or_else(|| CliError::Config(format!("line {line_no}: malformed section header `{line}`")))?;
                section = name.to_string();
                continue;
            }
            let (key, value) = split_pair(line)
                .ok_or_else(|| CliError::Config(format!("line {line_no}: expected `key = value`, got `{line}`")))?;
            let key = if section.is_empty() { key.to_string() } else { format!("{section}.{key}") };
            if let Some((_, prev)) = ini.entries.get(&key) {
                return Err(CliError::Config(format!("line {line_no}: key `{key}` already set on {prev}")));
            }
            ini.entries.insert(key, (value.to_string(), Origin::Line(line_no)));
        }
        Ok(ini)
    }

    /// Applies `key=value`, replacing any earlier value.
    pub fn apply_override(&mut self, pair: &str) -> Result<(), CliError> {
        let (key, value) =
            split_pair(pair).ok_or_else(|| CliError::Config(format!("--override expects key=value, got `{pair}`")))?;
        self.entries.insert(key.to_string(), (value.to_string(), Origin::Override));
        Ok(())
    }

    pub fn get(&self, key: &str) -> Option<(&str, Origin)> {
        self.entries.get(key).map(|(v, o)| (v.as_str(), *o))
    }

    pub fn keys(&self) -> impl Iterator<Item = &str> {
        self.entries.keys().map(String::as_str)
    }
}

fn strip_comment(line: &str) -> &str {
    match line.find(['#', ';']) {
        Some(i) => &line[..i],
        None => line,
    }
}

fn split_pair(line: &str) -> Option<(&str, &str)> {
    let (k, v) = line.split_once('=')?;
    let (k, v) = (k.trim(), v.trim());
    (!k.is_empty() && !k.contains(char::is_whitespace)).then_some((k, v))
}
