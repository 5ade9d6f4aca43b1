//! OCR token sidecars and the word dictionary used to filter them.

use std::path::{Path, PathBuf};

use viralens_core::text::{normalize_tokens, Dictionary};

use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TokenSidecar {
    pub doc_id: String,
    /// Lowercased tokens with surrounding punctuation removed, blank lines skipped.
    pub tokens: Vec<String>,
}

/// Conventional sidecar location: `<dir>/<doc_id>.tokens.txt`.
pub fn sidecar_path(dir: &Path, doc_id: &str) -> PathBuf {
    dir.join(format!("{doc_id}.tokens.txt"))
}

pub fn load_sidecar(path: &Path, doc_id: &str) -> Result<TokenSidecar> {
    let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    Ok(TokenSidecar { doc_id: doc_id.to_string(), tokens: normalize_tokens(text.lines()) })
}

/// Reads a word-per-line dictionary; words are trimmed and lowercased.
pub fn load_dictionary(path: &Path) -> Result<Dictionary> {
    let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    let words = text.lines().map(str::trim).filter(|w| !w.is_empty()).map(str::to_lowercase);
    Dictionary::new(words).map_err(|e| Error::Parse { path: path.to_path_buf(), message: e.to_string() })
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::io::Write;

    fn write(dir: &Path, name: &str, body: &str) -> PathBuf {
        let p = dir.join(name);
        std::fs::File::create(&p).unwrap().write_all(body.as_bytes()).unwrap();
        p
    }

    #[test]
    fn sidecar_normalization() {
        let dir = tempfile::tempdir().unwrap();
        let p = write(dir.path(), "a.tokens.txt", "Marketing\nROI!\n\n   \n");
        let s = load_sidecar(&p, "a").unwrap();
        assert_eq!(s.tokens, ["marketing", "roi"]);
        let empty = write(dir.path(), "b.tokens.txt", "");
        assert!(load_sidecar(&empty, "b").unwrap().tokens.is_empty());
    }

    #[test]
    fn missing_sidecar_is_io() {
        let err = load_sidecar(Path::new("/nonexistent/x.tokens.txt"), "x").unwrap_err();
        assert_eq!(err.exit_code(), 2);
    }

    #[test]
    fn dictionary_lowercases() {
        let dir = tempfile::tempdir().unwrap();
        let p = write(dir.path(), "dict.txt", "Apple\nbanana\n\n");
        let d = load_dictionary(&p).unwrap();
        assert!(d.contains("apple") && d.contains("banana"));
        assert_eq!(d.len(), 2);
        let empty = write(dir.path(), "empty.txt", "\n");
        assert!(load_dictionary(&empty).is_err());
    }
}
