//! Training an archive from a corpus, and scoring images against one.

use viralens_core::analytics::{
    cluster_assign, cluster_stats, label_from_terms, pairwise_matrix, word_cloud_terms, ClusterStats, PairwiseMatrix,
};
use viralens_core::dss::{build_report, compare_reports, derive_viral_set, ScoreDelta, ScoreReport, ViralSet};
use viralens_core::lda::{fold_in, gibbs_train, LdaHyperparams, LdaModel};
use viralens_core::rng::derive_seed;
use viralens_core::vision::{extract_visual_descriptor, quantize_to_visual_words, PixelGrid};

use crate::archive::{LdaSection, ModelArchive, FORMAT_VERSION};
use crate::dataset::CorpusFile;
use crate::error::{Error, Result, Stage};
use crate::imaging::decode_image;

const FOLD_IN_STREAM: u64 = 0xf01d;

#[derive(Debug, Clone)]
pub struct TrainOptions {
    pub hyperparams: LdaHyperparams,
    pub confidence: f64,
    /// Zero-based clusters to mark viral instead of deriving them from the tests.
    pub viral_override: Option<Vec<usize>>,
    /// Title terms joined into each cluster label.
    pub label_terms: usize,
}

impl TrainOptions {
    pub fn new(k: usize) -> Self {
        TrainOptions { hyperparams: LdaHyperparams::new(k), confidence: 0.95, viral_override: None, label_terms: 3 }
    }
}

#[derive(Debug, Clone)]
pub struct Trained {
    pub archive: ModelArchive,
    /// Cluster of each corpus row; `None` for rows skipped as empty.
    pub assignments: Vec<Option<usize>>,
    pub pairwise: PairwiseMatrix,
    pub ll_trace: Vec<f64>,
    pub log_likelihood: f64,
    pub skipped: Vec<String>,
}

pub fn train(corpus: &CorpusFile, opts: &TrainOptions) -> Result<Trained> {
    corpus.validate()?;
    let hp = &opts.hyperparams;
    let k = hp.k;
    let out = gibbs_train(&corpus.matrix, hp)?;

    let trained_clusters = cluster_assign(&out.theta);
    let activity = corpus.activity();
    let trained_activity: Vec<f64> = out.trained_docs.iter().map(|&d| activity[d]).collect();
    let mut stats = cluster_stats(&trained_clusters, &trained_activity, k)?;
    let pairwise = pairwise_matrix(&stats, opts.confidence)?;
    let viral = match &opts.viral_override {
        Some(v) => ViralSet::explicit(v.clone(), k)?,
        None => derive_viral_set(&stats, &pairwise),
    };

    let mut titles: Vec<Vec<&str>> = vec![Vec::new(); k];
    let mut assignments = vec![None; corpus.matrix.n_docs()];
    for (&d, &c) in out.trained_docs.iter().zip(&trained_clusters) {
        titles[c].push(&corpus.documents[d].title);
        assignments[d] = Some(c);
    }
    let labels: Vec<String> = word_cloud_terms(&titles, opts.label_terms)
        .iter()
        .enumerate()
        .map(|(c, terms)| label_from_terms(c, terms, opts.label_terms))
        .collect();
    stats.set_labels(&labels);

    let archive = ModelArchive {
        format_version: FORMAT_VERSION,
        quantization: corpus.quantization,
        vocabulary: out.model.vocabulary.clone(),
        lda: LdaSection { k, alpha: out.model.alpha.clone(), eta: out.model.eta, phi: out.model.phi.clone() },
        cluster_stats: stats,
        viral_clusters: viral.clusters,
        labels,
        viral_rule: viral.rule,
        confidence: opts.confidence,
        fold_in_seed: derive_seed(hp.seed, FOLD_IN_STREAM),
    };
    archive.validate()?;
    Ok(Trained {
        archive,
        assignments,
        pairwise,
        ll_trace: out.model.ll_trace,
        log_likelihood: out.log_likelihood,
        skipped: out.skipped_docs.iter().map(|&d| corpus.matrix.doc_ids()[d].clone()).collect(),
    })
}

/// Scores design variants against a loaded archive.
#[derive(Debug, Clone)]
pub struct Scorer {
    archive: ModelArchive,
    model: LdaModel,
    stats: ClusterStats,
    viral: ViralSet,
    /// Archive column of each visual word, in quantizer order.
    visual_columns: Vec<u32>,
    version: String,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Comparison {
    pub a: ScoreReport,
    pub b: ScoreReport,
    /// `b - a`.
    pub delta: ScoreDelta,
}

impl Scorer {
    pub fn new(archive: ModelArchive) -> Result<Self> {
        archive.validate()?;
        let visual_columns = archive
            .quantization
            .vocabulary()
            .iter()
            .map(|w| archive.vocabulary.iter().position(|v| v == w).map(|i| i as u32))
            .collect::<Option<Vec<u32>>>()
            .ok_or_else(|| Error::Archive("visual vocabulary incomplete".into()))?;
        Ok(Scorer {
            model: archive.model(),
            stats: archive.labeled_stats(),
            viral: archive.viral_set(),
            version: archive.version_tag()?,
            visual_columns,
            archive,
        })
    }

    pub fn archive(&self) -> &ModelArchive {
        &self.archive
    }

    pub fn stats(&self) -> &ClusterStats {
        &self.stats
    }

    pub fn viral(&self) -> &ViralSet {
        &self.viral
    }

    pub fn model_version(&self) -> &str {
        &self.version
    }

    pub fn score(&self, image: &[u8]) -> Result<ScoreReport> {
        let grid = decode_image(image)?;
        self.score_grid(&grid)
    }

    pub fn score_grid(&self, grid: &PixelGrid) -> Result<ScoreReport> {
        let seed = self.archive.fold_in_seed;
        let desc = extract_visual_descriptor(grid, derive_seed(seed, 0)).map_err(|e| Error::stage(Stage::Extract, e))?;
        let bag = quantize_to_visual_words(&desc, &self.archive.quantization)
            .map_err(|e| Error::stage(Stage::Quantize, e))?;
        let mut doc: Vec<(u32, u32)> = bag
            .counts
            .iter()
            .zip(&self.visual_columns)
            .filter(|(&c, _)| c > 0)
            .map(|(&c, &col)| (col, c))
            .collect();
        doc.sort_unstable();
        let theta = fold_in(&self.model, &doc, seed).map_err(|e| Error::stage(Stage::FoldIn, e))?;
        build_report(theta, &self.stats, &self.viral).map_err(|e| Error::stage(Stage::Report, e))
    }

    /// Scores both variants with the same seeds; errors name the failing variant.
    pub fn compare(&self, image_a: &[u8], image_b: &[u8]) -> Result<Comparison> {
        let a = self.score(image_a).map_err(|e| Error::Variant { variant: "image_a", source: Box::new(e) })?;
        let b = self.score(image_b).map_err(|e| Error::Variant { variant: "image_b", source: Box::new(e) })?;
        let delta = compare_reports(&a, &b);
        Ok(Comparison { a, b, delta })
    }
}
