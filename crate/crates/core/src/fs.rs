//! The in-memory file system value model.
//!
//! A [`FileSystem`] is a finite map from names to contents. A name with no
//! entry does not exist; there is no separate "deleted" marker, so two file
//! systems are equivalent exactly when their maps are equal.

use std::collections::BTreeMap;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::Error;

/// Path token naming a file. Compared by exact string equality.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(try_from = "String", into = "String")]
pub struct FileName(String);

impl FileName {
    /// Builds a name, rejecting the empty string.
    pub fn new(name: impl Into<String>) -> Result<Self, Error> {
        let name = name.into();
        if name.is_empty() {
            return Err(Error::EmptyName("file name"));
        }
        Ok(Self(name))
    }

    pub fn as_str(&self) -> &str {
        &self.0
    }
}

impl TryFrom<String> for FileName {
    type Error = Error;

    fn try_from(value: String) -> Result<Self, Self::Error> {
        Self::new(value)
    }
}

impl From<FileName> for String {
    fn from(value: FileName) -> Self {
        value.0
    }
}

/// Infallible conversion for literals in code and tests. Names arriving from
/// files go through `TryFrom<String>` and are checked for emptiness there.
impl From<&str> for FileName {
    fn from(value: &str) -> Self {
        debug_assert!(!value.is_empty(), "file names must be non-empty");
        Self(value.to_owned())
    }
}

impl fmt::Display for FileName {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

/// File contents. Any text, including the empty string.
#[derive(Clone, Debug, Default, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct FileContent(String);

impl FileContent {
    pub fn new(content: impl Into<String>) -> Self {
        Self(content.into())
    }

    pub fn as_str(&self) -> &str {
        &self.0
    }

    pub fn into_string(self) -> String {
        self.0
    }
}

impl From<&str> for FileContent {
    fn from(value: &str) -> Self {
        Self(value.to_owned())
    }
}

impl From<String> for FileContent {
    fn from(value: String) -> Self {
        Self(value)
    }
}

impl fmt::Display for FileContent {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

/// Ordered, duplicate-free list of writes produced by one command.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct WriteSet(Vec<(FileName, FileContent)>);

impl WriteSet {
    pub fn new() -> Self {
        Self::default()
    }

    /// Records a write. A second write to the same name replaces the value
    /// in place, so the list stays duplicate-free.
    pub fn insert(&mut self, name: FileName, content: FileContent) {
        match self.0.iter_mut().find(|(n, _)| *n == name) {
            Some(slot) => slot.1 = content,
            None => self.0.push((name, content)),
        }
    }

    pub fn get(&self, name: &FileName) -> Option<&FileContent> {
        self.0.iter().find(|(n, _)| n == name).map(|(_, c)| c)
    }

    pub fn contains(&self, name: &FileName) -> bool {
        self.get(name).is_some()
    }

    pub fn names(&self) -> impl Iterator<Item = &FileName> {
        self.0.iter().map(|(n, _)| n)
    }

    pub fn iter(&self) -> impl Iterator<Item = &(FileName, FileContent)> {
        self.0.iter()
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }
}

impl FromIterator<(FileName, FileContent)> for WriteSet {
    fn from_iter<T: IntoIterator<Item = (FileName, FileContent)>>(iter: T) -> Self {
        let mut ws = WriteSet::new();
        for (n, c) in iter {
            ws.insert(n, c);
        }
        ws
    }
}

/// A file system snapshot. Absent keys are files that do not exist.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct FileSystem(BTreeMap<FileName, FileContent>);

impl FileSystem {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn lookup(&self, name: &FileName) -> Option<&FileContent> {
        self.0.get(name)
    }

    /// Returns a new file system with `writes` applied on top of `self`.
    #[must_use]
    pub fn extend(&self, writes: &WriteSet) -> FileSystem {
        let mut next = self.clone();
        for (name, content) in writes.iter() {
            next.0.insert(name.clone(), content.clone());
        }
        next
    }

    /// Extensional equality: every name has the same (possibly absent)
    /// value on both sides.
    pub fn equivalent(&self, other: &FileSystem) -> bool {
        self.0
            .keys()
            .chain(other.0.keys())
            .all(|n| self.lookup(n) == other.lookup(n))
    }

    /// Returns a copy with `name` set to `content`, or removed when `None`.
    #[must_use]
    pub fn with(&self, name: FileName, content: Option<FileContent>) -> FileSystem {
        let mut next = self.clone();
        match content {
            Some(c) => {
                next.0.insert(name, c);
            }
            None => {
                next.0.remove(&name);
            }
        }
        next
    }

    pub fn iter(&self) -> impl Iterator<Item = (&FileName, &FileContent)> {
        self.0.iter()
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }
}

impl FromIterator<(FileName, FileContent)> for FileSystem {
    fn from_iter<T: IntoIterator<Item = (FileName, FileContent)>>(iter: T) -> Self {
        Self(iter.into_iter().collect())
    }
}

impl<'a> FromIterator<(&'a str, &'a str)> for FileSystem {
    fn from_iter<T: IntoIterator<Item = (&'a str, &'a str)>>(iter: T) -> Self {
        Self(
            iter.into_iter()
                .map(|(n, c)| (n.into(), c.into()))
                .collect(),
        )
    }
}
