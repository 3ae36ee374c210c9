//! The ordered set of book labels and their numeric encoding.
//!
//! A label is `"B"` followed by decimal digits; its code is the integer
//! suffix (`"B7"` encodes to `7`). Codes therefore do not move when the
//! catalog is reordered. Profile vectors, on the other hand, are indexed by
//! catalog *position*.

use std::collections::HashMap;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Number of books in the default catalog (`B0` through `B9`).
pub const DEFAULT_BOOK_COUNT: u32 = 10;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "Vec<String>", into = "Vec<String>")]
pub struct BookCatalog {
    labels: Vec<String>,
    codes: Vec<u32>,
    position: HashMap<String, usize>,
}

impl BookCatalog {
    pub fn new<I, S>(labels: I) -> Result<Self>
    where
        I: IntoIterator<Item = S>,
        S: Into<String>,
    {
        let labels: Vec<String> = labels.into_iter().map(Into::into).collect();
        if labels.is_empty() {
            return Err(Error::EmptyCatalog);
        }
        let mut codes = Vec::with_capacity(labels.len());
        let mut position = HashMap::with_capacity(labels.len());
        let mut seen_codes = HashMap::with_capacity(labels.len());
        for (i, label) in labels.iter().enumerate() {
            let code = parse_code(label)?;
            // "B07" and "B7" would share a code.
            if seen_codes.insert(code, i).is_some() || position.insert(label.clone(), i).is_some() {
                return Err(Error::DuplicateBook(label.clone()));
            }
            codes.push(code);
        }
        Ok(Self {
            labels,
            codes,
            position,
        })
    }

    /// Parses a catalog file: labels separated by newlines and/or commas.
    /// Blank entries and lines starting with `#` are ignored.
    pub fn parse(text: &str) -> Result<Self> {
        let labels = text
            .lines()
            .map(str::trim)
            .filter(|line| !line.starts_with('#'))
            .flat_map(|line| line.split(','))
            .map(str::trim)
            .filter(|s| !s.is_empty());
        Self::new(labels)
    }

    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn label(&self, position: usize) -> Option<&str> {
        self.labels.get(position).map(String::as_str)
    }

    pub fn contains(&self, label: &str) -> bool {
        self.position.contains_key(label)
    }

    /// Numeric code of `label` (its integer suffix).
    pub fn code(&self, label: &str) -> Result<u32> {
        self.position
            .get(label)
            .map(|&i| self.codes[i])
            .ok_or_else(|| Error::UnknownBook(label.to_owned()))
    }

    /// Inverse of [`BookCatalog::code`].
    pub fn decode(&self, code: u32) -> Option<&str> {
        self.codes
            .iter()
            .position(|&c| c == code)
            .map(|i| self.labels[i].as_str())
    }

    /// Index of `label` within the catalog order; used for profile vectors.
    pub fn position(&self, label: &str) -> Result<usize> {
        self.position
            .get(label)
            .copied()
            .ok_or_else(|| Error::UnknownBook(label.to_owned()))
    }
}

impl Default for BookCatalog {
    fn default() -> Self {
        Self::new((0..DEFAULT_BOOK_COUNT).map(|n| format!("B{n}"))).expect("default catalog is valid")
    }
}

impl TryFrom<Vec<String>> for BookCatalog {
    type Error = Error;

    fn try_from(labels: Vec<String>) -> Result<Self> {
        Self::new(labels)
    }
}

impl From<BookCatalog> for Vec<String> {
    fn from(catalog: BookCatalog) -> Self {
        catalog.labels
    }
}

fn parse_code(label: &str) -> Result<u32> {
    let digits = label
        .strip_prefix('B')
        .filter(|d| !d.is_empty() && d.bytes().all(|b| b.is_ascii_digit()))
        .ok_or_else(|| Error::InvalidBookLabel(label.to_owned()))?;
    digits
        .parse()
        .map_err(|_| Error::InvalidBookLabel(label.to_owned()))
}
