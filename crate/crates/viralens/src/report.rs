//! Report shapes shared by the CLI and the HTTP service, and their text/CSV renderings.
//!
//! JSON uses zero-based cluster indices; text and CSV tables number clusters from 1.

use std::fmt::Write as _;
use std::io::Read;
use std::path::Path;

use serde::{Deserialize, Serialize};
use viralens_core::analytics::{pairwise_matrix, ClusterStat, ClusterStats};
use viralens_core::dss::{derive_viral_set, ScoreDelta, ScoreReport, ViralSet};

use crate::error::{Error, Result};
use crate::pipeline::Comparison;

pub const NO_CORRECTION_NOTE: &str = "pairwise tests are not corrected for multiple comparisons";

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ThetaEntry {
    pub cluster: usize,
    pub label: String,
    pub probability: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ApiScoreResponse {
    pub theta: Vec<ThetaEntry>,
    pub expected_activity: f64,
    pub viral_probability: f64,
    pub model_version: String,
}

impl ApiScoreResponse {
    pub fn new(report: &ScoreReport, model_version: &str) -> Self {
        ApiScoreResponse {
            theta: theta_entries(&report.theta, &report.labels),
            expected_activity: report.expected_activity,
            viral_probability: report.viral_probability,
            model_version: model_version.to_string(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ApiDelta {
    pub theta: Vec<ThetaEntry>,
    pub expected_activity: f64,
    pub viral_probability: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ApiCompareResponse {
    pub a: ApiScoreResponse,
    pub b: ApiScoreResponse,
    /// `b - a`.
    pub delta: ApiDelta,
    pub model_version: String,
}

impl ApiCompareResponse {
    pub fn new(cmp: &Comparison, model_version: &str) -> Self {
        let ScoreDelta { theta, expected_activity, viral_probability } = &cmp.delta;
        ApiCompareResponse {
            a: ApiScoreResponse::new(&cmp.a, model_version),
            b: ApiScoreResponse::new(&cmp.b, model_version),
            delta: ApiDelta {
                theta: theta_entries(theta, &cmp.a.labels),
                expected_activity: *expected_activity,
                viral_probability: *viral_probability,
            },
            model_version: model_version.to_string(),
        }
    }
}

fn theta_entries(values: &[f64], labels: &[String]) -> Vec<ThetaEntry> {
    values
        .iter()
        .zip(labels)
        .enumerate()
        .map(|(cluster, (&probability, label))| ThetaEntry { cluster, label: label.clone(), probability })
        .collect()
}

/// One row of the cluster summary table.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ClusterRow {
    pub cluster: usize,
    pub label: String,
    pub frequency: usize,
    pub average: Option<f64>,
    pub variance: Option<f64>,
    pub viral: bool,
}

pub fn cluster_rows(stats: &ClusterStats, viral: &ViralSet) -> Vec<ClusterRow> {
    stats
        .clusters
        .iter()
        .enumerate()
        .map(|(cluster, c)| ClusterRow {
            cluster,
            label: c.label.clone(),
            frequency: c.frequency,
            average: c.mean,
            variance: c.variance,
            viral: viral.contains(cluster),
        })
        .collect()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PairRow {
    pub a: usize,
    pub b: usize,
    /// `None` where the test is undefined (too few members or zero variance).
    pub t_stat: Option<f64>,
    pub df: Option<u64>,
    pub t_crit: Option<f64>,
    pub significant: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StatsReport {
    pub confidence: f64,
    pub clusters: Vec<ClusterRow>,
    pub pairwise: Vec<PairRow>,
    pub viral_clusters: Vec<usize>,
    pub note: String,
}

/// Cluster table plus every pairwise test. The viral set is derived from the
/// tests unless `viral` is given.
pub fn stats_report(stats: &ClusterStats, confidence: f64, viral: Option<&ViralSet>) -> Result<StatsReport> {
    let tests = pairwise_matrix(stats, confidence)?;
    let derived;
    let viral = match viral {
        Some(v) => v,
        None => {
            derived = derive_viral_set(stats, &tests);
            &derived
        }
    };
    let pairwise = tests
        .entries
        .iter()
        .map(|e| PairRow {
            a: e.i,
            b: e.j,
            t_stat: e.result.map(|r| r.t_stat),
            df: e.result.map(|r| r.df),
            t_crit: e.result.map(|r| r.t_crit),
            significant: e.result.is_some_and(|r| r.significant),
        })
        .collect();
    Ok(StatsReport {
        confidence,
        clusters: cluster_rows(stats, viral),
        pairwise,
        viral_clusters: viral.clusters.clone(),
        note: NO_CORRECTION_NOTE.to_string(),
    })
}

#[derive(Deserialize)]
struct SummaryRow {
    frequency: usize,
    #[serde(alias = "average")]
    mean: f64,
    variance: f64,
    #[serde(default)]
    label: String,
}

/// Reads a cluster summary table with columns `frequency`, `mean` (or
/// `average`), `variance` and optional `label`, one row per cluster.
pub fn read_summary_table<R: Read>(reader: R) -> Result<ClusterStats> {
    let mut rdr = csv::ReaderBuilder::new().trim(csv::Trim::All).from_reader(reader);
    let mut clusters = Vec::new();
    for (i, row) in rdr.deserialize::<SummaryRow>().enumerate() {
        let row = row.map_err(|e| Error::Row { row: i + 2, message: e.to_string() })?;
        let mut c = ClusterStat::from_summary(row.frequency, row.mean, row.variance);
        c.label = row.label;
        clusters.push(c);
    }
    if clusters.is_empty() {
        return Err(Error::Validation("summary table has no rows".into()));
    }
    Ok(ClusterStats { clusters })
}

pub fn load_summary_table(path: &Path) -> Result<ClusterStats> {
    let file = std::fs::File::open(path).map_err(|e| Error::io(path, e))?;
    read_summary_table(file)
}

fn opt(v: Option<f64>, prec: usize) -> String {
    v.map_or_else(|| "-".to_string(), |x| format!("{x:.prec$}"))
}

fn pair_cell(p: &PairRow) -> String {
    match (p.t_stat, p.t_crit) {
        (Some(t), Some(c)) => format!("({t:.2}, {c:.2}){}", if p.significant { "*" } else { "" }),
        _ => "-".to_string(),
    }
}

fn csv_field(s: &str) -> String {
    if s.contains([',', '"', '\n']) {
        format!("\"{}\"", s.replace('"', "\"\""))
    } else {
        s.to_string()
    }
}

fn pair_grid(report: &StatsReport) -> Vec<Vec<String>> {
    let k = report.clusters.len();
    let mut grid = vec![vec![String::new(); k]; k];
    for p in &report.pairwise {
        grid[p.a][p.b] = pair_cell(p);
    }
    grid
}

pub fn render_clusters_text(rows: &[ClusterRow]) -> String {
    let width = rows.iter().map(|r| r.label.len()).max().unwrap_or(0).max(5);
    let mut out = format!("{:>7}  {:<width$}  {:>9}  {:>12}  {:>16}  viral\n", "cluster", "label", "frequency", "average", "variance");
    for r in rows {
        let _ = writeln!(
            out,
            "{:>7}  {:<width$}  {:>9}  {:>12}  {:>16}  {}",
            r.cluster + 1,
            r.label,
            r.frequency,
            opt(r.average, 3),
            opt(r.variance, 1),
            if r.viral { "yes" } else { "" }
        );
    }
    out
}

pub fn render_stats_text(report: &StatsReport) -> String {
    let mut out = String::from("Cluster statistics of total shares\n");
    out.push_str(&render_clusters_text(&report.clusters));
    let _ = writeln!(out, "\nPairwise t-tests: (t statistic, critical value)");
    let k = report.clusters.len();
    let grid = pair_grid(report);
    let cell_w = grid.iter().flatten().map(String::len).max().unwrap_or(0).max(10);
    let _ = write!(out, "{:>10}", "");
    for j in 1..k {
        let _ = write!(out, "  {:>cell_w$}", format!("cluster {}", j + 1));
    }
    out.push('\n');
    for (i, row) in grid.iter().enumerate().take(k.saturating_sub(1)) {
        let _ = write!(out, "{:>10}", format!("cluster {}", i + 1));
        for cell in &row[1..] {
            let _ = write!(out, "  {cell:>cell_w$}");
        }
        out.push('\n');
    }
    let _ = writeln!(
        out,
        "\n* significant at {}% confidence (two-tailed); {}.",
        report.confidence * 100.0,
        report.note
    );
    let viral: Vec<String> = report.viral_clusters.iter().map(|c| (c + 1).to_string()).collect();
    let _ = writeln!(out, "viral clusters: {}", if viral.is_empty() { "none".into() } else { viral.join(", ") });
    out
}

/// Two CSV blocks separated by a blank line: the cluster table, then the
/// pairwise matrix with `(t, crit)` cells and `*` for significance.
pub fn render_stats_csv(report: &StatsReport) -> String {
    let mut out = String::from("cluster,label,frequency,average,variance,viral\n");
    for r in &report.clusters {
        let num = |v: Option<f64>| v.map_or(String::new(), |x| x.to_string());
        let _ = writeln!(
            out,
            "{},{},{},{},{},{}",
            r.cluster + 1,
            csv_field(&r.label),
            r.frequency,
            num(r.average),
            num(r.variance),
            r.viral
        );
    }
    out.push('\n');
    let k = report.clusters.len();
    out.push_str("cluster");
    for j in 1..k {
        let _ = write!(out, ",cluster {}", j + 1);
    }
    out.push('\n');
    for (i, row) in pair_grid(report).iter().enumerate().take(k.saturating_sub(1)) {
        let _ = write!(out, "cluster {}", i + 1);
        for cell in &row[1..] {
            let _ = write!(out, ",{}", csv_field(cell));
        }
        out.push('\n');
    }
    out
}

pub fn render_score_text(report: &ScoreReport, model_version: &str) -> String {
    let width = report.labels.iter().map(String::len).max().unwrap_or(0).max(5);
    let mut out = format!("{:>7}  {:<width$}  {:>11}  {:>12}  viral\n", "cluster", "label", "probability", "contribution");
    for (k, p) in report.theta.iter().enumerate() {
        let _ = writeln!(
            out,
            "{:>7}  {:<width$}  {:>11.4}  {:>12.3}  {}",
            k + 1,
            report.labels[k],
            p,
            report.contributions[k],
            if report.viral[k] { "yes" } else { "" }
        );
    }
    let _ = writeln!(out, "\nexpected activity  {:.3}", report.expected_activity);
    let _ = writeln!(out, "viral probability  {:.4}", report.viral_probability);
    let _ = writeln!(out, "model              {model_version}");
    out
}

pub fn render_score_csv(report: &ScoreReport) -> String {
    let mut out = String::from("cluster,label,probability,contribution,viral\n");
    for (k, p) in report.theta.iter().enumerate() {
        let _ = writeln!(
            out,
            "{},{},{p},{},{}",
            k + 1,
            csv_field(&report.labels[k]),
            report.contributions[k],
            report.viral[k]
        );
    }
    out
}

pub fn render_compare_text(cmp: &Comparison, model_version: &str) -> String {
    let labels = &cmp.a.labels;
    let width = labels.iter().map(String::len).max().unwrap_or(0).max(5);
    let mut out = format!("{:>7}  {:<width$}  {:>9}  {:>9}  {:>9}\n", "cluster", "label", "A", "B", "B - A");
    for (k, label) in labels.iter().enumerate().take(cmp.a.theta.len()) {
        let _ = writeln!(
            out,
            "{:>7}  {:<width$}  {:>9.4}  {:>9.4}  {:>+9.4}",
            k + 1,
            label,
            cmp.a.theta[k],
            cmp.b.theta[k],
            cmp.delta.theta[k]
        );
    }
    let _ = writeln!(
        out,
        "\n{:<18} {:>12.3}  {:>12.3}  {:>+12.3}",
        "expected activity", cmp.a.expected_activity, cmp.b.expected_activity, cmp.delta.expected_activity
    );
    let _ = writeln!(
        out,
        "{:<18} {:>12.4}  {:>12.4}  {:>+12.4}",
        "viral probability", cmp.a.viral_probability, cmp.b.viral_probability, cmp.delta.viral_probability
    );
    let _ = writeln!(out, "model              {model_version}");
    out
}

pub fn render_compare_csv(cmp: &Comparison) -> String {
    let mut out = String::from("quantity,a,b,delta\n");
    for k in 0..cmp.a.theta.len() {
        let _ = writeln!(out, "theta_{},{},{},{}", k + 1, cmp.a.theta[k], cmp.b.theta[k], cmp.delta.theta[k]);
    }
    let _ = writeln!(
        out,
        "expected_activity,{},{},{}",
        cmp.a.expected_activity, cmp.b.expected_activity, cmp.delta.expected_activity
    );
    let _ = writeln!(
        out,
        "viral_probability,{},{},{}",
        cmp.a.viral_probability, cmp.b.viral_probability, cmp.delta.viral_probability
    );
    out
}
