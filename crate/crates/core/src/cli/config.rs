//! Plain-text run configuration: `key = value` lines grouped under
//! `[section]` headers, `#` or `;` comments.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::str::FromStr;

use crate::error::{Error, Result};

/// Parsed configuration. Keys are stored as `section.key`; keys before the
/// first header go to the `run` section.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct ConfigFile {
    entries: BTreeMap<String, String>,
}

fn valid_name(s: &str) -> bool {
    !s.is_empty() && s.chars().all(|c| c.is_ascii_alphanumeric() || c == '_' || c == '-')
}

impl ConfigFile {
    pub fn parse(text: &str) -> Result<Self> {
        let mut entries = BTreeMap::new();
        let mut section = String::from("run");
        for (i, raw) in text.lines().enumerate() {
            let line_no = i + 1;
            let line = raw.trim();
            if line.is_empty() || line.starts_with('#') || line.starts_with(';') {
                continue;
            }
            if let Some(rest) = line.strip_prefix('[') {
                let name = rest
                    .strip_suffix(']')
                    .ok_or_else(|| Error::parse(line_no, "section header must end with ']'"))?
                    .trim();
                if !valid_name(name) {
                    return Err(Error::parse(line_no, format!("invalid section name {name:?}")));
                }
                section = name.to_string();
                continue;
            }
            let (key, value) =
                line.split_once('=').ok_or_else(|| Error::parse(line_no, "expected 'key = value'"))?;
            let (key, value) = (key.trim(), value.trim());
            if !valid_name(key) {
                return Err(Error::parse(line_no, format!("invalid key {key:?}")));
            }
            let full = format!("{section}.{key}");
            if entries.insert(full.clone(), value.to_string()).is_some() {
                return Err(Error::parse(line_no, format!("duplicate key {full}")));
            }
        }
        Ok(ConfigFile { entries })
    }

    pub fn get(&self, key: &str) -> Option<&str> {
        self.entries.get(key).map(String::as_str)
    }

    pub fn set(&mut self, key: &str, value: impl Into<String>) {
        self.entries.insert(key.to_string(), value.into());
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = (&str, &str)> {
        self.entries.iter().map(|(k, v)| (k.as_str(), v.as_str()))
    }

    /// Writes the entries back in the same syntax, one section per group.
    pub fn render(&self) -> String {
        let mut out = String::new();
        let mut current: Option<&str> = None;
        for (key, value) in &self.entries {
            let (section, name) = key.split_once('.').expect("keys carry a section");
            if current != Some(section) {
                if current.is_some() {
                    out.push('\n');
                }
                let _ = writeln!(out, "[{section}]");
                current = Some(section);
            }
            let _ = writeln!(out, "{name} = {value}");
        }
        out
    }
}

impl FromStr for ConfigFile {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        ConfigFile::parse(s)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sections_comments_and_defaults() {
        let cfg = ConfigFile::parse("seed = 3\n# note\n[grid]\nL = 6.5\n ; other\n[time]\ndt=1e-3\n").unwrap();
        assert_eq!(cfg.get("run.seed"), Some("3"));
        assert_eq!(cfg.get("grid.L"), Some("6.5"));
        assert_eq!(cfg.get("time.dt"), Some("1e-3"));
        assert_eq!(cfg.len(), 3);
    }

    #[test]
    fn render_round_trips() {
        let cfg = ConfigFile::parse("[b]\nx = 1, 2\n[a]\ny = z\n").unwrap();
        assert_eq!(ConfigFile::parse(&cfg.render()).unwrap(), cfg);
    }

    #[test]
    fn malformed_lines_report_their_number() {
        for (text, line) in [("[grid\n", 1), ("a = 1\nnovalue\n", 2), ("a = 1\na = 2\n", 2), ("[]\n", 1), ("x y = 1\n", 1)] {
            match ConfigFile::parse(text) {
                Err(Error::Parse { line: l, .. }) => assert_eq!(l, line, "{text:?}"),
                other => panic!("{text:?}: {other:?}"),
            }
        }
    }
}
