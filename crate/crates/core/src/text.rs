//! Verbal bags of words from OCR token streams.

use alloc::collections::{BTreeMap, BTreeSet};
use alloc::string::String;
use alloc::vec::Vec;

use crate::{Error, Result};

/// Lowercases `raw` and strips leading/trailing punctuation and whitespace.
/// Returns `None` if nothing is left.
pub fn normalize_token(raw: &str) -> Option<String> {
    let trimmed = raw.trim_matches(|c: char| c.is_whitespace() || !c.is_alphanumeric());
    if trimmed.is_empty() {
        None
    } else {
        Some(trimmed.to_lowercase())
    }
}

pub fn normalize_tokens<'a>(raw: impl IntoIterator<Item = &'a str>) -> Vec<String> {
    raw.into_iter().filter_map(normalize_token).collect()
}

/// Set of accepted lowercase words.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Dictionary {
    words: BTreeSet<String>,
}

impl Dictionary {
    pub fn new<I, S>(words: I) -> Result<Self>
    where
        I: IntoIterator<Item = S>,
        S: Into<String>,
    {
        let mut set = BTreeSet::new();
        for w in words {
            let w = w.into();
            if w.is_empty() || w.chars().any(|c| c.is_whitespace() || c.is_uppercase()) {
                return Err(Error::invalid(alloc::format!("dictionary entry {w:?} must be lowercase without whitespace")));
            }
            set.insert(w);
        }
        if set.is_empty() {
            return Err(Error::invalid("dictionary is empty"));
        }
        Ok(Dictionary { words: set })
    }

    pub fn contains(&self, word: &str) -> bool {
        self.words.contains(word)
    }

    pub fn len(&self) -> usize {
        self.words.len()
    }

    pub fn is_empty(&self) -> bool {
        self.words.is_empty()
    }
}

/// Keeps tokens present in `dict`, preserving order.
pub fn dictionary_filter<S: AsRef<str> + Clone>(tokens: &[S], dict: &Dictionary) -> Vec<S> {
    tokens.iter().filter(|t| dict.contains(t.as_ref())).cloned().collect()
}

/// Term counts in first-seen order.
pub type TermCounts = Vec<(String, u32)>;

pub fn build_text_bag<S: AsRef<str>>(tokens: &[S]) -> TermCounts {
    let mut position: BTreeMap<&str, usize> = BTreeMap::new();
    let mut bag: TermCounts = Vec::new();
    for t in tokens {
        let t = t.as_ref();
        match position.get(t) {
            Some(&i) => bag[i].1 += 1,
            None => {
                position.insert(t, bag.len());
                bag.push((String::from(t), 1));
            }
        }
    }
    bag
}
