//! Flat key-value config files and their merge with command-line flags.
//!
//! Files hold one `key = value` pair per line; `#` starts a comment.
//! Flags override file values, file values override the documented
//! defaults. Unknown keys, keys that do not apply to the chosen command,
//! and duplicate keys are rejected.

use std::collections::BTreeMap;
use std::path::Path;

use crate::{Error, Result};

/// Keys every command understands.
const GLOBAL_KEYS: &[&str] = &[
    "eta", "gamma", "alpha", "alpha_im", "m_levels", "seed", "dt", "verify", "output",
];

/// Parsed key-value pairs, insertion order irrelevant.
#[derive(Clone, Debug, Default)]
pub struct KeyValues {
    entries: BTreeMap<String, String>,
}

impl KeyValues {
    pub fn parse(text: &str) -> Result<Self> {
        let mut entries = BTreeMap::new();
        for (lineno, raw) in text.lines().enumerate() {
            let line = raw.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let (key, value) = line.split_once('=').ok_or_else(|| {
                Error::Config(format!("line {}: expected key=value, got `{raw}`", lineno + 1))
            })?;
            let key = key.trim().to_string();
            let value = value.trim().to_string();
            if entries.insert(key.clone(), value).is_some() {
                return Err(Error::Config(format!(
                    "line {}: key `{key}` given more than once",
                    lineno + 1
                )));
            }
        }
        Ok(Self { entries })
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::Config(format!("cannot read {}: {e}", path.display())))?;
        Self::parse(&text)
    }

    /// Reject any key outside the global set and the command's own keys.
    pub fn check_keys(&self, command: &str, command_keys: &[&str]) -> Result<()> {
        for key in self.entries.keys() {
            let known = GLOBAL_KEYS.contains(&key.as_str())
                || command_keys.contains(&key.as_str());
            if !known {
                return Err(Error::Config(format!(
                    "unknown key `{key}` for command {command}"
                )));
            }
        }
        Ok(())
    }

    fn raw(&self, key: &str) -> Option<&str> {
        self.entries.get(key).map(String::as_str)
    }

    /// Resolve one typed value: flag wins, then file, then default.
    pub fn resolve<T: std::str::FromStr>(
        &self,
        key: &str,
        flag: Option<T>,
        default: T,
    ) -> Result<T> {
        if let Some(v) = flag {
            return Ok(v);
        }
        match self.raw(key) {
            Some(text) => text.parse().map_err(|_| {
                Error::Config(format!("key `{key}`: cannot parse `{text}`"))
            }),
            None => Ok(default),
        }
    }

    /// Like [`KeyValues::resolve`] but with no default (stays `None`).
    pub fn resolve_opt<T: std::str::FromStr>(
        &self,
        key: &str,
        flag: Option<T>,
    ) -> Result<Option<T>> {
        if flag.is_some() {
            return Ok(flag);
        }
        match self.raw(key) {
            Some(text) => text
                .parse()
                .map(Some)
                .map_err(|_| Error::Config(format!("key `{key}`: cannot parse `{text}`"))),
            None => Ok(None),
        }
    }

    /// Booleans accept true/false/1/0/yes/no; a bare flag forces true.
    pub fn resolve_bool(&self, key: &str, flag: bool) -> Result<bool> {
        if flag {
            return Ok(true);
        }
        match self.raw(key) {
            Some(text) => match text.to_ascii_lowercase().as_str() {
                "true" | "1" | "yes" => Ok(true),
                "false" | "0" | "no" => Ok(false),
                other => Err(Error::Config(format!(
                    "key `{key}`: expected a boolean, got `{other}`"
                ))),
            },
            None => Ok(false),
        }
    }
}
