//! Trained model archive (`*.viralens.json`).

use std::path::Path;

use serde::{Deserialize, Serialize};
use viralens_core::analytics::ClusterStats;
use viralens_core::dss::{ViralRule, ViralSet};
use viralens_core::lda::LdaModel;
use viralens_core::rng::stream_key;
use viralens_core::vision::QuantizationConfig;

use crate::error::{Error, Result};
use crate::json;

pub const FORMAT_VERSION: u64 = 1;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LdaSection {
    pub k: usize,
    pub alpha: Vec<f64>,
    pub eta: f64,
    /// `k` rows over the archive vocabulary.
    pub phi: Vec<Vec<f64>>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ModelArchive {
    pub format_version: u64,
    pub quantization: QuantizationConfig,
    pub vocabulary: Vec<String>,
    pub lda: LdaSection,
    pub cluster_stats: ClusterStats,
    /// Zero-based cluster indices.
    pub viral_clusters: Vec<usize>,
    pub labels: Vec<String>,
    pub viral_rule: ViralRule,
    /// Confidence level the viral set was derived at.
    pub confidence: f64,
    /// Seed for descriptor extraction and fold-in when scoring.
    pub fold_in_seed: u64,
}

#[derive(Deserialize)]
struct VersionProbe {
    format_version: u64,
}

impl ModelArchive {
    pub fn k(&self) -> usize {
        self.lda.k
    }

    pub fn model(&self) -> LdaModel {
        LdaModel {
            alpha: self.lda.alpha.clone(),
            eta: self.lda.eta,
            phi: self.lda.phi.clone(),
            vocabulary: self.vocabulary.clone(),
            ll_trace: Vec::new(),
        }
    }

    pub fn viral_set(&self) -> ViralSet {
        let mut clusters = self.viral_clusters.clone();
        clusters.sort_unstable();
        clusters.dedup();
        ViralSet { clusters, rule: self.viral_rule }
    }

    /// Cluster statistics with the archive's labels attached.
    pub fn labeled_stats(&self) -> ClusterStats {
        let mut stats = self.cluster_stats.clone();
        stats.set_labels(&self.labels);
        stats
    }

    pub fn validate(&self) -> Result<()> {
        if self.format_version != FORMAT_VERSION {
            return Err(Error::ArchiveVersion { found: self.format_version, supported: FORMAT_VERSION });
        }
        let k = self.lda.k;
        if self.lda.phi.len() != k {
            return Err(Error::Archive(format!("lda.k is {k} but phi has {} rows", self.lda.phi.len())));
        }
        if let Some((i, row)) = self.lda.phi.iter().enumerate().find(|(_, r)| r.len() != self.vocabulary.len()) {
            return Err(Error::Archive(format!(
                "vocabulary has {} words but phi row {i} has {} columns",
                self.vocabulary.len(),
                row.len()
            )));
        }
        if self.cluster_stats.k() != k {
            return Err(Error::Archive(format!("{} cluster_stats entries for K = {k}", self.cluster_stats.k())));
        }
        if self.labels.len() != k {
            return Err(Error::Archive(format!("{} labels for K = {k}", self.labels.len())));
        }
        if let Some(c) = self.viral_clusters.iter().find(|&&c| c >= k) {
            return Err(Error::Archive(format!("viral cluster {c} outside {k} clusters")));
        }
        if !(self.confidence > 0.0 && self.confidence < 1.0) {
            return Err(Error::Archive(format!("confidence {} outside (0, 1)", self.confidence)));
        }
        self.quantization.validate().map_err(|e| Error::Archive(e.to_string()))?;
        if let Some(w) = self.quantization.vocabulary().into_iter().find(|w| !self.vocabulary.contains(w)) {
            return Err(Error::Archive(format!("visual word {w} missing from vocabulary")));
        }
        self.model().validate().map_err(|e| Error::Archive(e.to_string()))
    }

    pub fn to_bytes(&self) -> Result<Vec<u8>> {
        json::to_vec(self)
    }

    pub fn from_bytes(bytes: &[u8]) -> Result<Self> {
        let probe: VersionProbe =
            serde_json::from_slice(bytes).map_err(|e| Error::Archive(format!("parse error: {e}")))?;
        if probe.format_version != FORMAT_VERSION {
            return Err(Error::ArchiveVersion { found: probe.format_version, supported: FORMAT_VERSION });
        }
        let archive: ModelArchive =
            serde_json::from_slice(bytes).map_err(|e| Error::Archive(format!("parse error: {e}")))?;
        archive.validate()?;
        Ok(archive)
    }

    /// Short content hash identifying this model.
    pub fn version_tag(&self) -> Result<String> {
        let bytes = self.to_bytes()?;
        let text = String::from_utf8_lossy(&bytes);
        Ok(format!("{}-{:016x}", self.format_version, stream_key(&text)))
    }
}

pub fn save_archive(archive: &ModelArchive, path: &Path) -> Result<()> {
    archive.validate()?;
    std::fs::write(path, archive.to_bytes()?).map_err(|e| Error::io(path, e))
}

pub fn load_archive(path: &Path) -> Result<ModelArchive> {
    let bytes = std::fs::read(path).map_err(|e| Error::io(path, e))?;
    ModelArchive::from_bytes(&bytes)
}

#[cfg(test)]
mod tests {
    use super::*;
    use viralens_core::analytics::ClusterStat;

    fn tiny() -> ModelArchive {
        let quantization = QuantizationConfig::new(2, 10).unwrap();
        let mut vocabulary = quantization.vocabulary();
        vocabulary.push("marketing".into());
        let v = vocabulary.len();
        let row = |bias: usize| -> Vec<f64> {
            let raw: Vec<f64> = (0..v).map(|i| if i % 2 == bias { 3.0 } else { 1.0 / 3.0 }).collect();
            let s: f64 = raw.iter().sum();
            raw.into_iter().map(|x| x / s).collect()
        };
        ModelArchive {
            format_version: FORMAT_VERSION,
            quantization,
            vocabulary,
            lda: LdaSection { k: 2, alpha: vec![0.1, 0.7], eta: 0.1, phi: vec![row(0), row(1)] },
            cluster_stats: ClusterStats {
                clusters: vec![ClusterStat::from_summary(3, 10.5, 2.25), ClusterStat {
                    frequency: 1,
                    mean: Some(1.0 / 3.0),
                    variance: None,
                    label: String::new(),
                }],
            },
            viral_clusters: vec![0],
            labels: vec!["a".into(), "b".into()],
            viral_rule: ViralRule::SignificantlyHigher,
            confidence: 0.95,
            fold_in_seed: 7,
        }
    }

    #[test]
    fn round_trip_is_exact() {
        let a = tiny();
        let back = ModelArchive::from_bytes(&a.to_bytes().unwrap()).unwrap();
        assert_eq!(a, back);
    }

    #[test]
    fn writes_expected_top_level_keys() {
        let v: serde_json::Value = serde_json::from_slice(&tiny().to_bytes().unwrap()).unwrap();
        for key in ["format_version", "quantization", "vocabulary", "lda", "cluster_stats", "viral_clusters", "labels"] {
            assert!(v.get(key).is_some(), "missing {key}");
        }
        for key in ["k", "alpha", "eta", "phi"] {
            assert!(v["lda"].get(key).is_some(), "missing lda.{key}");
        }
    }

    #[test]
    fn unknown_version_rejected() {
        let mut v: serde_json::Value = serde_json::from_slice(&tiny().to_bytes().unwrap()).unwrap();
        v["format_version"] = 99.into();
        let err = ModelArchive::from_bytes(v.to_string().as_bytes()).unwrap_err();
        assert!(matches!(err, Error::ArchiveVersion { found: 99, .. }));
    }

    #[test]
    fn truncated_file_is_parse_error() {
        let bytes = tiny().to_bytes().unwrap();
        let err = ModelArchive::from_bytes(&bytes[..bytes.len() / 2]).unwrap_err();
        assert!(err.to_string().contains("parse error"), "{err}");
    }

    #[test]
    fn vocabulary_phi_mismatch_rejected() {
        let mut a = tiny();
        a.vocabulary.push("extra".into());
        let err = ModelArchive::from_bytes(&json::to_vec(&a).unwrap()).unwrap_err();
        assert!(err.to_string().contains("phi row 0"), "{err}");
    }

    #[test]
    fn cluster_count_must_equal_k() {
        let mut a = tiny();
        a.cluster_stats.clusters.pop();
        assert!(a.validate().is_err());
    }

    #[test]
    fn version_tag_is_stable() {
        assert_eq!(tiny().version_tag().unwrap(), tiny().version_tag().unwrap());
        let mut other = tiny();
        other.fold_in_seed = 8;
        assert_ne!(tiny().version_tag().unwrap(), other.version_tag().unwrap());
    }
}
