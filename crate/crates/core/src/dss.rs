//! Decision-support scoring: membership probabilities of a new design,
//! its expected social activity, and the probability mass on viral clusters.

use alloc::string::String;
use alloc::vec::Vec;

use crate::analytics::{ClusterStats, PairwiseMatrix};
use crate::lda::{fold_in, LdaModel};
use crate::{Error, Result};

/// Weights at or below this are treated as zero.
pub const WEIGHT_EPSILON: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "snake_case"))]
pub enum ViralRule {
    /// Viral iff the cluster wins at least one significant pairwise test.
    SignificantlyHigher,
    Explicit,
}

#[derive(Debug, Clone, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct ViralSet {
    /// Sorted, zero-based cluster indices.
    pub clusters: Vec<usize>,
    pub rule: ViralRule,
}

impl ViralSet {
    pub fn explicit(mut clusters: Vec<usize>, k: usize) -> Result<Self> {
        if let Some(&c) = clusters.iter().find(|&&c| c >= k) {
            return Err(Error::invalid(alloc::format!("viral cluster {c} outside {k} clusters")));
        }
        clusters.sort_unstable();
        clusters.dedup();
        Ok(ViralSet { clusters, rule: ViralRule::Explicit })
    }

    pub fn contains(&self, k: usize) -> bool {
        self.clusters.binary_search(&k).is_ok()
    }
}

pub fn derive_viral_set(stats: &ClusterStats, tests: &PairwiseMatrix) -> ViralSet {
    let mut viral = alloc::vec![false; stats.k()];
    for e in &tests.entries {
        let Some(r) = e.result else { continue };
        if !r.significant {
            continue;
        }
        if r.t_stat > 0.0 {
            viral[e.i] = true;
        } else if r.t_stat < 0.0 {
            viral[e.j] = true;
        }
    }
    ViralSet {
        clusters: (0..viral.len()).filter(|&k| viral[k]).collect(),
        rule: ViralRule::SignificantlyHigher,
    }
}

/// `Σ_k θ_k m_k`. Fails if a cluster without a mean carries weight.
pub fn expected_activity(theta: &[f64], means: &[Option<f64>]) -> Result<f64> {
    if theta.len() != means.len() {
        return Err(Error::DimensionMismatch(alloc::format!(
            "{} weights for {} cluster means",
            theta.len(),
            means.len()
        )));
    }
    let mut total = 0.0;
    for (k, (&w, m)) in theta.iter().zip(means).enumerate() {
        match m {
            Some(m) => total += w * m,
            None if w > WEIGHT_EPSILON => return Err(Error::UndefinedClusterMean { cluster: k, weight: w }),
            None => {}
        }
    }
    Ok(total)
}

pub fn viral_probability(theta: &[f64], viral: &ViralSet) -> f64 {
    let p: f64 = viral.clusters.iter().filter_map(|&k| theta.get(k)).sum();
    p.clamp(0.0, 1.0)
}

#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct ScoreReport {
    pub theta: Vec<f64>,
    pub expected_activity: f64,
    pub viral_probability: f64,
    /// Per-cluster share of `expected_activity`; zero for clusters without a mean.
    pub contributions: Vec<f64>,
    pub labels: Vec<String>,
    pub viral: Vec<bool>,
}

/// Builds the report for a membership vector. Clusters without a defined
/// mean (no training members) are left out of the expectation and the
/// remaining weights renormalized, keeping the result a convex combination
/// of the defined means.
pub fn build_report(theta: Vec<f64>, stats: &ClusterStats, viral: &ViralSet) -> Result<ScoreReport> {
    if theta.len() != stats.k() {
        return Err(Error::DimensionMismatch(alloc::format!(
            "{} weights for {} clusters",
            theta.len(),
            stats.k()
        )));
    }
    let means = stats.means();
    let defined_mass: f64 = theta.iter().zip(&means).filter(|(_, m)| m.is_some()).map(|(w, _)| w).sum();
    if defined_mass.is_nan() || defined_mass <= 0.0 {
        return Err(Error::invalid("no cluster with a defined mean carries weight"));
    }
    let contributions: Vec<f64> = theta
        .iter()
        .zip(&means)
        .map(|(w, m)| m.map_or(0.0, |m| w / defined_mass * m))
        .collect();
    Ok(ScoreReport {
        expected_activity: contributions.iter().sum(),
        viral_probability: viral_probability(&theta, viral),
        contributions,
        labels: stats.clusters.iter().map(|c| c.label.clone()).collect(),
        viral: (0..theta.len()).map(|k| viral.contains(k)).collect(),
        theta,
    })
}

/// Folds `doc` into `model` and scores it.
pub fn score_document(
    model: &LdaModel,
    stats: &ClusterStats,
    viral: &ViralSet,
    doc: &[(u32, u32)],
    seed: u64,
) -> Result<ScoreReport> {
    let theta = fold_in(model, doc, seed)?;
    build_report(theta, stats, viral)
}

/// `b - a` for every score component.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct ScoreDelta {
    pub theta: Vec<f64>,
    pub expected_activity: f64,
    pub viral_probability: f64,
}

pub fn compare_reports(a: &ScoreReport, b: &ScoreReport) -> ScoreDelta {
    ScoreDelta {
        theta: a.theta.iter().zip(&b.theta).map(|(x, y)| y - x).collect(),
        expected_activity: b.expected_activity - a.expected_activity,
        viral_probability: b.viral_probability - a.viral_probability,
    }
}
