//! Hard cluster assignment, per-cluster activity statistics, pairwise
//! pooled t-tests and word-cloud term ranking.

use alloc::collections::BTreeMap;
use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;

use crate::special::t_quantile;
use crate::text::normalize_token;
use crate::{Error, Result};

/// Argmax of each row; ties go to the lowest index.
pub fn cluster_assign(theta: &[Vec<f64>]) -> Vec<usize> {
    theta
        .iter()
        .map(|row| {
            let mut best = 0;
            for (k, &p) in row.iter().enumerate() {
                if p > row[best] {
                    best = k;
                }
            }
            best
        })
        .collect()
}

/// Frequency, mean and unbiased variance of one cluster's activity.
/// `mean` is `None` for empty clusters, `variance` for fewer than two members.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct ClusterStat {
    pub frequency: usize,
    pub mean: Option<f64>,
    pub variance: Option<f64>,
    pub label: String,
}

impl ClusterStat {
    pub fn from_summary(frequency: usize, mean: f64, variance: f64) -> Self {
        ClusterStat { frequency, mean: Some(mean), variance: Some(variance), label: String::new() }
    }

    pub fn summary(&self) -> Option<GroupSummary> {
        Some(GroupSummary { n: self.frequency, mean: self.mean?, variance: self.variance? })
    }
}

#[derive(Debug, Clone, PartialEq, Default)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(transparent))]
pub struct ClusterStats {
    pub clusters: Vec<ClusterStat>,
}

impl ClusterStats {
    pub fn k(&self) -> usize {
        self.clusters.len()
    }

    pub fn means(&self) -> Vec<Option<f64>> {
        self.clusters.iter().map(|c| c.mean).collect()
    }

    pub fn set_labels(&mut self, labels: &[String]) {
        for (c, l) in self.clusters.iter_mut().zip(labels) {
            c.label = l.clone();
        }
    }
}

pub fn cluster_stats(assignments: &[usize], activity: &[f64], k: usize) -> Result<ClusterStats> {
    if assignments.len() != activity.len() {
        return Err(Error::DimensionMismatch(format!(
            "{} assignments for {} activity values",
            assignments.len(),
            activity.len()
        )));
    }
    let mut groups: Vec<Vec<f64>> = (0..k).map(|_| Vec::new()).collect();
    for (&a, &x) in assignments.iter().zip(activity) {
        groups
            .get_mut(a)
            .ok_or_else(|| Error::invalid(format!("assignment {a} outside {k} clusters")))?
            .push(x);
    }
    let clusters = groups
        .iter()
        .map(|g| {
            let n = g.len();
            let mean = (n > 0).then(|| g.iter().sum::<f64>() / n as f64);
            let variance = match mean {
                Some(m) if n > 1 => Some(g.iter().map(|x| (x - m) * (x - m)).sum::<f64>() / (n - 1) as f64),
                _ => None,
            };
            ClusterStat { frequency: n, mean, variance, label: String::new() }
        })
        .collect();
    Ok(ClusterStats { clusters })
}

/// `(n, mean, sample variance)` of one group.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GroupSummary {
    pub n: usize,
    pub mean: f64,
    pub variance: f64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct PairwiseTestResult {
    pub t_stat: f64,
    pub df: u64,
    /// Two-tailed critical value at the test's confidence level.
    pub t_crit: f64,
    pub significant: bool,
}

/// Student's two-sample t-test with pooled variance. `None` when the test
/// is undefined: `df < 1`, or a zero pooled variance.
pub fn pooled_t_test(a: GroupSummary, b: GroupSummary, confidence: f64) -> Result<Option<PairwiseTestResult>> {
    if !(confidence > 0.0 && confidence < 1.0) {
        return Err(Error::invalid(format!("confidence must be in (0, 1), got {confidence}")));
    }
    if a.n < 1 || b.n < 1 || a.n + b.n < 3 {
        return Ok(None);
    }
    let df = (a.n + b.n - 2) as u64;
    let pooled = ((a.n - 1) as f64 * a.variance + (b.n - 1) as f64 * b.variance) / df as f64;
    let se = libm::sqrt(pooled * (1.0 / a.n as f64 + 1.0 / b.n as f64));
    if !se.is_finite() || se <= 0.0 {
        return Ok(None);
    }
    let t_stat = (a.mean - b.mean) / se;
    let t_crit = t_quantile(df, 1.0 - (1.0 - confidence) / 2.0)?;
    Ok(Some(PairwiseTestResult { t_stat, df, t_crit, significant: libm::fabs(t_stat) > t_crit }))
}

#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct PairEntry {
    pub i: usize,
    pub j: usize,
    pub result: Option<PairwiseTestResult>,
}

/// Upper triangle (`i < j`) of pairwise tests, in row-major order.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct PairwiseMatrix {
    pub k: usize,
    pub confidence: f64,
    pub entries: Vec<PairEntry>,
}

impl PairwiseMatrix {
    pub fn get(&self, i: usize, j: usize) -> Option<&PairwiseTestResult> {
        if i >= j || j >= self.k {
            return None;
        }
        // row-major offset of (i, j) in the strict upper triangle
        let offset = i * (2 * self.k - i - 1) / 2 + (j - i - 1);
        self.entries[offset].result.as_ref()
    }
}

pub fn pairwise_matrix(stats: &ClusterStats, confidence: f64) -> Result<PairwiseMatrix> {
    let k = stats.k();
    let mut entries = Vec::with_capacity(k * k.saturating_sub(1) / 2);
    for i in 0..k {
        for j in i + 1..k {
            let result = match (stats.clusters[i].summary(), stats.clusters[j].summary()) {
                (Some(a), Some(b)) => pooled_t_test(a, b, confidence)?,
                _ => None,
            };
            entries.push(PairEntry { i, j, result });
        }
    }
    Ok(PairwiseMatrix { k, confidence, entries })
}

/// Ranks title terms per cluster by frequency, ties broken lexicographically.
pub fn word_cloud_terms<S: AsRef<str>>(titles_by_cluster: &[Vec<S>], top_n: usize) -> Vec<Vec<(String, usize)>> {
    titles_by_cluster
        .iter()
        .map(|titles| {
            let mut freq: BTreeMap<String, usize> = BTreeMap::new();
            for t in titles {
                for tok in t.as_ref().split_whitespace().filter_map(normalize_token) {
                    *freq.entry(tok).or_insert(0) += 1;
                }
            }
            let mut ranked: Vec<(String, usize)> = freq.into_iter().collect();
            ranked.sort_by(|a, b| b.1.cmp(&a.1).then_with(|| a.0.cmp(&b.0)));
            ranked.truncate(top_n);
            ranked
        })
        .collect()
}

/// Label made of the top terms, or `cluster <n>` (1-based) when there are none.
pub fn label_from_terms(cluster: usize, terms: &[(String, usize)], n: usize) -> String {
    if terms.is_empty() {
        return format!("cluster {}", cluster + 1);
    }
    terms.iter().take(n).map(|(t, _)| t.as_str()).collect::<Vec<_>>().join(" ")
}
