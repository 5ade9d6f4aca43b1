//! Manifest records and the sparse document-term matrix.

use alloc::collections::{BTreeMap, BTreeSet};
use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;

use crate::text::TermCounts;
use crate::{Error, Result};

/// One infographic of the corpus manifest.
#[derive(Debug, Clone, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct ManifestRecord {
    pub id: String,
    pub image_path: String,
    pub title: String,
    pub shares_facebook: u64,
    pub shares_pinterest: u64,
    pub shares_linkedin: u64,
    pub shares_twitter: u64,
    pub token_sidecar: Option<String>,
}

impl ManifestRecord {
    /// The virality measure: shares summed over the four platforms.
    pub fn total_shares(&self) -> u64 {
        self.shares_facebook + self.shares_pinterest + self.shares_linkedin + self.shares_twitter
    }
}

/// Documents x vocabulary matrix of positive integer counts, stored by row
/// as `(column, count)` pairs sorted by column.
#[derive(Debug, Clone, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct DocTermMatrix {
    doc_ids: Vec<String>,
    vocabulary: Vec<String>,
    rows: Vec<Vec<(u32, u32)>>,
}

impl DocTermMatrix {
    pub fn new(doc_ids: Vec<String>, vocabulary: Vec<String>, rows: Vec<Vec<(u32, u32)>>) -> Result<Self> {
        let m = DocTermMatrix { doc_ids, vocabulary, rows };
        m.validate()?;
        Ok(m)
    }

    /// Builds a matrix from dense rows; zero entries are dropped.
    pub fn from_dense(doc_ids: Vec<String>, vocabulary: Vec<String>, dense: &[Vec<u32>]) -> Result<Self> {
        let rows = dense
            .iter()
            .map(|r| {
                r.iter()
                    .enumerate()
                    .filter(|(_, &c)| c > 0)
                    .map(|(w, &c)| (w as u32, c))
                    .collect()
            })
            .collect();
        if dense.iter().any(|r| r.len() != vocabulary.len()) {
            return Err(Error::DimensionMismatch("dense row length differs from vocabulary".into()));
        }
        Self::new(doc_ids, vocabulary, rows)
    }

    pub fn validate(&self) -> Result<()> {
        if self.doc_ids.is_empty() {
            return Err(Error::invalid("doc-term matrix needs at least one document"));
        }
        if self.vocabulary.is_empty() {
            return Err(Error::invalid("doc-term matrix needs at least one vocabulary column"));
        }
        if self.rows.len() != self.doc_ids.len() {
            return Err(Error::DimensionMismatch(format!(
                "{} rows for {} documents",
                self.rows.len(),
                self.doc_ids.len()
            )));
        }
        let ids: BTreeSet<&String> = self.doc_ids.iter().collect();
        if ids.len() != self.doc_ids.len() {
            return Err(Error::invalid("duplicate document id"));
        }
        let words: BTreeSet<&String> = self.vocabulary.iter().collect();
        if words.len() != self.vocabulary.len() {
            return Err(Error::invalid("duplicate vocabulary entry"));
        }
        let v = self.vocabulary.len() as u32;
        for (d, row) in self.rows.iter().enumerate() {
            let mut prev: Option<u32> = None;
            for &(w, c) in row {
                if w >= v {
                    return Err(Error::DimensionMismatch(format!("row {d} references column {w} >= {v}")));
                }
                if c == 0 {
                    return Err(Error::invalid(format!("row {d} stores an explicit zero")));
                }
                if prev.is_some_and(|p| p >= w) {
                    return Err(Error::invalid(format!("row {d} columns not strictly increasing")));
                }
                prev = Some(w);
            }
        }
        Ok(())
    }

    pub fn n_docs(&self) -> usize {
        self.doc_ids.len()
    }

    pub fn n_words(&self) -> usize {
        self.vocabulary.len()
    }

    pub fn doc_ids(&self) -> &[String] {
        &self.doc_ids
    }

    pub fn vocabulary(&self) -> &[String] {
        &self.vocabulary
    }

    pub fn row(&self, d: usize) -> &[(u32, u32)] {
        &self.rows[d]
    }

    pub fn rows(&self) -> &[Vec<(u32, u32)>] {
        &self.rows
    }

    /// Token total `N_d` of document `d`.
    pub fn doc_len(&self, d: usize) -> u64 {
        self.rows[d].iter().map(|&(_, c)| u64::from(c)).sum()
    }

    pub fn total_tokens(&self) -> u64 {
        (0..self.n_docs()).map(|d| self.doc_len(d)).sum()
    }

    pub fn get(&self, d: usize, w: usize) -> u32 {
        self.rows[d]
            .binary_search_by_key(&(w as u32), |&(c, _)| c)
            .map(|i| self.rows[d][i].1)
            .unwrap_or(0)
    }

    /// Row-major dense copy as reals.
    pub fn to_dense(&self) -> Vec<f64> {
        let v = self.n_words();
        let mut out = alloc::vec![0.0; self.n_docs() * v];
        for (d, row) in self.rows.iter().enumerate() {
            for &(w, c) in row {
                out[d * v + w as usize] = f64::from(c);
            }
        }
        out
    }

    /// Indices of documents with zero tokens.
    pub fn empty_docs(&self) -> Vec<usize> {
        (0..self.n_docs()).filter(|&d| self.rows[d].is_empty()).collect()
    }

    /// Copy restricted to the given rows, in the given order.
    pub fn select_rows(&self, docs: &[usize]) -> Result<Self> {
        Self::new(
            docs.iter().map(|&d| self.doc_ids[d].clone()).collect(),
            self.vocabulary.clone(),
            docs.iter().map(|&d| self.rows[d].clone()).collect(),
        )
    }
}

/// Visual counts for one document, indexed by the visual vocabulary.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct VisualCounts {
    pub doc_id: String,
    pub counts: Vec<u32>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TextCounts {
    pub doc_id: String,
    pub terms: TermCounts,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Assembled {
    pub matrix: DocTermMatrix,
    /// Ids of documents retained as all-zero rows.
    pub empty_docs: Vec<String>,
}

/// Merges visual and optional text bags into one matrix. Columns are the
/// visual vocabulary followed by text terms in first-seen order; rows follow
/// the order of `visual`.
pub fn assemble_doc_term(
    visual_vocabulary: &[String],
    visual: &[VisualCounts],
    text: Option<&[TextCounts]>,
) -> Result<Assembled> {
    if visual.is_empty() {
        return Err(Error::invalid("no documents to assemble"));
    }
    for v in visual {
        if v.counts.len() != visual_vocabulary.len() {
            return Err(Error::DimensionMismatch(format!(
                "document {} has {} visual counts for a vocabulary of {}",
                v.doc_id,
                v.counts.len(),
                visual_vocabulary.len()
            )));
        }
    }

    let text_by_id: BTreeMap<&str, &TextCounts> = match text {
        Some(t) => {
            let by_id: BTreeMap<&str, &TextCounts> = t.iter().map(|tc| (tc.doc_id.as_str(), tc)).collect();
            let visual_ids: BTreeSet<&str> = visual.iter().map(|v| v.doc_id.as_str()).collect();
            let text_ids: BTreeSet<&str> = by_id.keys().copied().collect();
            if visual_ids != text_ids || by_id.len() != t.len() {
                let only_visual: Vec<&str> = visual_ids.difference(&text_ids).copied().collect();
                let only_text: Vec<&str> = text_ids.difference(&visual_ids).copied().collect();
                return Err(Error::Assembly(format!(
                    "only in visual bags: {only_visual:?}; only in text bags: {only_text:?}"
                )));
            }
            by_id
        }
        None => BTreeMap::new(),
    };

    let mut vocabulary: Vec<String> = visual_vocabulary.to_vec();
    let mut index: BTreeMap<String, u32> =
        vocabulary.iter().enumerate().map(|(i, w)| (w.clone(), i as u32)).collect();
    if index.len() != vocabulary.len() {
        return Err(Error::invalid("duplicate visual vocabulary entry"));
    }

    let mut rows = Vec::with_capacity(visual.len());
    for v in visual {
        let mut row: BTreeMap<u32, u32> = v
            .counts
            .iter()
            .enumerate()
            .filter(|(_, &c)| c > 0)
            .map(|(w, &c)| (w as u32, c))
            .collect();
        if let Some(tc) = text_by_id.get(v.doc_id.as_str()) {
            for (term, count) in &tc.terms {
                if *count == 0 {
                    continue;
                }
                let col = *index.entry(term.clone()).or_insert_with(|| {
                    vocabulary.push(term.clone());
                    (vocabulary.len() - 1) as u32
                });
                *row.entry(col).or_insert(0) += count;
            }
        }
        rows.push(row.into_iter().collect::<Vec<_>>());
    }

    let doc_ids: Vec<String> = visual.iter().map(|v| v.doc_id.clone()).collect();
    let matrix = DocTermMatrix::new(doc_ids, vocabulary, rows)?;
    let empty_docs = matrix.empty_docs().into_iter().map(|d| matrix.doc_ids()[d].clone()).collect();
    Ok(Assembled { matrix, empty_docs })
}
