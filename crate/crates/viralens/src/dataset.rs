//! Ingest: manifest + images (+ optional OCR sidecars) into a corpus file.

use std::path::{Path, PathBuf};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use viralens_core::corpus::{assemble_doc_term, DocTermMatrix, ManifestRecord, TextCounts, VisualCounts};
use viralens_core::rng::{derive_seed, stream_key};
use viralens_core::text::{build_text_bag, dictionary_filter, Dictionary};
use viralens_core::vision::{
    extract_visual_descriptor, quantize_to_visual_words, QuantizationConfig, VisualBag, VisualDescriptor,
};

use crate::error::{Error, Result, Stage};
use crate::imaging::decode_image;
use crate::manifest::{load_manifest, resolve};
use crate::tokens::{load_sidecar, sidecar_path};
use crate::json;

pub const CORPUS_FORMAT_VERSION: u64 = 1;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DocumentInfo {
    pub id: String,
    pub title: String,
    pub total_shares: u64,
}

/// Output of `ingest`: the doc-term matrix plus what training needs from the manifest.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CorpusFile {
    pub format_version: u64,
    pub quantization: QuantizationConfig,
    pub seed: u64,
    pub text_features: bool,
    pub documents: Vec<DocumentInfo>,
    pub matrix: DocTermMatrix,
    /// Documents kept as all-zero rows; training skips them.
    pub empty_docs: Vec<String>,
}

impl CorpusFile {
    pub fn validate(&self) -> Result<()> {
        if self.format_version != CORPUS_FORMAT_VERSION {
            return Err(Error::Validation(format!(
                "unsupported corpus format_version {} (this build reads {CORPUS_FORMAT_VERSION})",
                self.format_version
            )));
        }
        self.quantization.validate()?;
        self.matrix.validate()?;
        let ids: Vec<&str> = self.documents.iter().map(|d| d.id.as_str()).collect();
        let rows: Vec<&str> = self.matrix.doc_ids().iter().map(String::as_str).collect();
        if ids != rows {
            return Err(Error::Validation("corpus documents do not match matrix rows".into()));
        }
        Ok(())
    }

    pub fn activity(&self) -> Vec<f64> {
        self.documents.iter().map(|d| d.total_shares as f64).collect()
    }
}

pub fn save_corpus(corpus: &CorpusFile, path: &Path) -> Result<()> {
    json::write_file(path, corpus)
}

pub fn load_corpus(path: &Path) -> Result<CorpusFile> {
    let corpus: CorpusFile = json::read_file(path)?;
    corpus.validate().map_err(|e| Error::Parse { path: path.to_path_buf(), message: e.to_string() })?;
    Ok(corpus)
}

#[derive(Debug, Clone)]
pub struct IngestOptions {
    pub quantization: QuantizationConfig,
    pub seed: u64,
    /// When set, OCR sidecars are read, filtered by it and added as text columns.
    pub dictionary: Option<Dictionary>,
}

impl Default for IngestOptions {
    fn default() -> Self {
        IngestOptions { quantization: QuantizationConfig::default(), seed: 42, dictionary: None }
    }
}

/// Descriptor and visual words of one image.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ImageFeatures {
    pub id: String,
    pub descriptor: VisualDescriptor,
    pub counts: Vec<u32>,
}

/// Seed used to extract the descriptor of document `id`.
pub fn extraction_seed(seed: u64, id: &str) -> u64 {
    derive_seed(seed, stream_key(id))
}

pub fn image_features(id: &str, bytes: &[u8], cfg: &QuantizationConfig, seed: u64) -> Result<ImageFeatures> {
    let grid = decode_image(bytes)?;
    let descriptor = extract_visual_descriptor(&grid, seed).map_err(|e| Error::stage(Stage::Extract, e))?;
    let VisualBag { counts } = quantize_to_visual_words(&descriptor, cfg).map_err(|e| Error::stage(Stage::Quantize, e))?;
    Ok(ImageFeatures { id: id.to_string(), descriptor, counts })
}

pub fn features_from_file(path: &Path, cfg: &QuantizationConfig, seed: u64) -> Result<ImageFeatures> {
    let id = path.file_stem().map(|s| s.to_string_lossy().into_owned()).unwrap_or_default();
    let bytes = std::fs::read(path).map_err(|e| Error::io(path, e))?;
    image_features(&id, &bytes, cfg, extraction_seed(seed, &id))
        .map_err(|e| Error::Document { id, source: Box::new(e) })
}

pub fn ingest(manifest: &Path, opts: &IngestOptions) -> Result<CorpusFile> {
    opts.quantization.validate()?;
    let records = load_manifest(manifest)?;
    if records.is_empty() {
        return Err(Error::Validation("manifest has no rows".into()));
    }

    let visual: Vec<VisualCounts> = records
        .par_iter()
        .map(|r| {
            let path = resolve(manifest, &r.image_path);
            let bytes = std::fs::read(&path).map_err(|e| Error::io(&path, e))?;
            image_features(&r.id, &bytes, &opts.quantization, extraction_seed(opts.seed, &r.id))
                .map(|f| VisualCounts { doc_id: r.id.clone(), counts: f.counts })
        })
        .collect::<Vec<Result<_>>>()
        .into_iter()
        .zip(&records)
        .map(|(res, r)| res.map_err(|e| Error::Document { id: r.id.clone(), source: Box::new(e) }))
        .collect::<Result<_>>()?;

    let text = match &opts.dictionary {
        Some(dict) => Some(text_bags(manifest, &records, dict)?),
        None => None,
    };

    let assembled = assemble_doc_term(&opts.quantization.vocabulary(), &visual, text.as_deref())?;
    Ok(CorpusFile {
        format_version: CORPUS_FORMAT_VERSION,
        quantization: opts.quantization,
        seed: opts.seed,
        text_features: text.is_some(),
        documents: records
            .iter()
            .map(|r| DocumentInfo { id: r.id.clone(), title: r.title.clone(), total_shares: r.total_shares() })
            .collect(),
        matrix: assembled.matrix,
        empty_docs: assembled.empty_docs,
    })
}

/// Reads each record's sidecar: the `token_sidecar` column when given,
/// otherwise `<doc_id>.tokens.txt` beside the manifest if it exists.
fn text_bags(manifest: &Path, records: &[ManifestRecord], dict: &Dictionary) -> Result<Vec<TextCounts>> {
    let dir = manifest.parent().unwrap_or(Path::new("."));
    records
        .iter()
        .map(|r| {
            let path: Option<PathBuf> = match &r.token_sidecar {
                Some(p) => Some(resolve(manifest, p)),
                None => Some(sidecar_path(dir, &r.id)).filter(|p| p.exists()),
            };
            let tokens = match path {
                Some(p) => load_sidecar(&p, &r.id)?.tokens,
                None => Vec::new(),
            };
            let kept = dictionary_filter(&tokens, dict);
            Ok(TextCounts { doc_id: r.id.clone(), terms: build_text_bag(&kept) })
        })
        .collect()
}
