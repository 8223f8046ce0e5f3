//! Ground-truth labels keyed by raw node ID.

use std::collections::BTreeMap;
use std::fmt;
use std::fs;
use std::io::Write;
use std::path::Path;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum Label {
    Spammer,
    Legitimate,
}

impl Label {
    pub fn is_spam(self) -> bool {
        self == Label::Spammer
    }

    pub fn as_str(self) -> &'static str {
        match self {
            Label::Spammer => "spam",
            Label::Legitimate => "legit",
        }
    }
}

impl fmt::Display for Label {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Label {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "spam" | "spammer" => Ok(Label::Spammer),
            "legit" | "legitimate" => Ok(Label::Legitimate),
            other => Err(Error::InvalidArgument(format!("unknown label {other:?}"))),
        }
    }
}

/// Raw node ID → label, ordered by ID.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct LabelFile {
    labels: BTreeMap<u64, Label>,
}

impl LabelFile {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn insert(&mut self, raw: u64, label: Label) {
        self.labels.insert(raw, label);
    }

    pub fn get(&self, raw: u64) -> Option<Label> {
        self.labels.get(&raw).copied()
    }

    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = (u64, Label)> + '_ {
        self.labels.iter().map(|(&k, &v)| (k, v))
    }

    pub fn with_label(&self, label: Label) -> Vec<u64> {
        self.iter().filter(|&(_, l)| l == label).map(|(k, _)| k).collect()
    }

    pub fn parse(text: &str, origin: &Path) -> Result<Self> {
        let mut out = LabelFile::new();
        for (idx, line) in text.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let mut f = line.split_ascii_whitespace();
            let (Some(id), Some(label), None) = (f.next(), f.next(), f.next()) else {
                return Err(Error::parse(origin, idx + 1, "expected \"nodeid label\""));
            };
            let id: u64 = id
                .parse()
                .map_err(|_| Error::parse(origin, idx + 1, format!("invalid node id {id:?}")))?;
            let label: Label = label
                .parse()
                .map_err(|e: Error| Error::parse(origin, idx + 1, e.to_string()))?;
            if out.labels.insert(id, label).is_some() {
                return Err(Error::parse(origin, idx + 1, format!("duplicate node {id}")));
            }
        }
        Ok(out)
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Self::parse(&text, path)
    }

    pub fn write<W: Write>(&self, mut w: W) -> std::io::Result<()> {
        for (id, label) in self.iter() {
            writeln!(w, "{id} {label}")?;
        }
        w.flush()
    }

    pub fn save(&self, path: impl AsRef<Path>) -> Result<()> {
        let path = path.as_ref();
        let mut buf = Vec::new();
        self.write(&mut buf).expect("write to memory");
        fs::write(path, buf).map_err(|e| Error::io(path, e))
    }
}

impl FromIterator<(u64, Label)> for LabelFile {
    fn from_iter<T: IntoIterator<Item = (u64, Label)>>(iter: T) -> Self {
        LabelFile {
            labels: iter.into_iter().collect(),
        }
    }
}
