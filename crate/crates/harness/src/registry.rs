//! Known optimal tour costs keyed by instance name.

use std::collections::HashMap;

use anyhow::{bail, Context, Result};

const BUNDLED: &str = include_str!("../../../data/optima.txt");

/// Instance name (lower case) to optimal cost.
#[derive(Debug, Clone, Default)]
pub struct Registry {
    entries: HashMap<String, i64>,
}

impl Registry {
    /// The list shipped with the crate.
    pub fn bundled() -> Self {
        Self::parse(BUNDLED).expect("bundled optimum list is well formed")
    }

    /// Parses `name optimum` lines; `#` starts a comment.
    pub fn parse(text: &str) -> Result<Self> {
        let mut entries = HashMap::new();
        for (i, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let mut parts = line.split_whitespace();
            let (Some(name), Some(value), None) = (parts.next(), parts.next(), parts.next()) else {
                bail!("line {}: expected `name optimum`, got `{raw}`", i + 1);
            };
            let value: i64 = value
                .parse()
                .with_context(|| format!("line {}: bad optimum `{value}`", i + 1))?;
            if value <= 0 {
                bail!("line {}: optimum must be positive", i + 1);
            }
            entries.insert(name.to_ascii_lowercase(), value);
        }
        Ok(Registry { entries })
    }

    /// Case-insensitive lookup; a trailing `.tsp` is ignored.
    pub fn get(&self, name: &str) -> Option<i64> {
        let key = name.to_ascii_lowercase();
        let key = key.strip_suffix(".tsp").unwrap_or(&key);
        self.entries.get(key).copied()
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = (&str, i64)> {
        self.entries.iter().map(|(k, &v)| (k.as_str(), v))
    }
}
