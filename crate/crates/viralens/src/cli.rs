//! `viralens` command line.

use std::ffi::OsString;
use std::fmt::Write as _;
use std::io::Write;
use std::net::{IpAddr, SocketAddr};
use std::path::{Path, PathBuf};
use std::sync::Arc;

use clap::error::ErrorKind;
use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;
use viralens_core::lda::{AlphaPrior, LdaHyperparams, SelectionMetric};
use viralens_core::linalg::{reduce_energy, Matrix};
use viralens_core::vision::QuantizationConfig;

use crate::archive::{load_archive, save_archive};
use crate::dataset::{features_from_file, ingest, load_corpus, save_corpus, ImageFeatures, IngestOptions};
use crate::error::{Error, Result};
use crate::pipeline::{train, Scorer, TrainOptions};
use crate::report::{self, cluster_rows, ApiCompareResponse, ApiScoreResponse, ClusterRow};
use crate::select::select_k_parallel;
use crate::tokens::load_dictionary;

#[derive(Debug, Parser)]
#[command(name = "viralens", version, about = "Infographic virality decision support")]
struct Cli {
    /// Seed for every random choice in the run.
    #[arg(long, global = true, default_value_t = 42)]
    seed: u64,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Build a corpus file from a manifest, its images and optional OCR sidecars.
    Ingest(IngestArgs),
    /// Print the colour descriptor and visual words of images.
    Features(FeaturesArgs),
    /// Train a topic model and write a model archive.
    Train(TrainArgs),
    /// Compare candidate topic counts.
    SelectK(SelectKArgs),
    /// Export SVD-reduced document features.
    Reduce(ReduceArgs),
    /// Cluster statistics and pairwise t-tests.
    Stats(StatsArgs),
    /// Score one image against an archive.
    Score(ScoreArgs),
    /// Score two design variants and report B minus A.
    Compare(CompareArgs),
    /// Serve the scoring API over HTTP.
    Serve(ServeArgs),
    /// Summarize an archive: clusters and top words per topic.
    Report(ReportArgs),
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum Format {
    Text,
    Json,
    Csv,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum Metric {
    HeldOut,
    Training,
}

#[derive(Debug, Args)]
struct QuantArgs {
    /// Histogram bins per colour channel.
    #[arg(long, default_value_t = 8)]
    bins: u32,
    /// Visual-word tokens per colour channel.
    #[arg(long, default_value_t = 100)]
    tokens: u32,
}

impl QuantArgs {
    fn config(&self) -> Result<QuantizationConfig> {
        Ok(QuantizationConfig::new(self.bins, self.tokens)?)
    }
}

#[derive(Debug, Args)]
struct LdaArgs {
    /// `default` (50/K), one value, or one comma-separated value per topic.
    #[arg(long, default_value = "default")]
    alpha: String,
    #[arg(long, default_value_t = 0.1)]
    eta: f64,
    #[arg(long, default_value_t = 1000)]
    sweeps: usize,
    #[arg(long, default_value_t = 200)]
    burn_in: usize,
}

impl LdaArgs {
    fn hyperparams(&self, k: usize, seed: u64) -> Result<LdaHyperparams> {
        let hp = LdaHyperparams {
            k,
            alpha: parse_alpha(&self.alpha)?,
            eta: self.eta,
            sweeps: self.sweeps,
            burn_in: self.burn_in,
            seed,
        };
        hp.validate()?;
        Ok(hp)
    }
}

#[derive(Debug, Args)]
struct IngestArgs {
    #[arg(long)]
    manifest: PathBuf,
    #[arg(long)]
    out: PathBuf,
    /// Word-per-line dictionary; enables text features from token sidecars.
    #[arg(long)]
    dictionary: Option<PathBuf>,
    #[command(flatten)]
    quant: QuantArgs,
}

#[derive(Debug, Args)]
struct FeaturesArgs {
    #[arg(required = true)]
    images: Vec<PathBuf>,
    #[command(flatten)]
    quant: QuantArgs,
    #[arg(long, value_enum, default_value = "text")]
    format: Format,
}

#[derive(Debug, Args)]
struct TrainArgs {
    #[arg(long)]
    corpus: PathBuf,
    /// Number of topics.
    #[arg(long)]
    k: usize,
    #[command(flatten)]
    lda: LdaArgs,
    /// Confidence level of the pairwise tests.
    #[arg(long, default_value_t = 0.95)]
    confidence: f64,
    /// Mark these clusters (numbered from 1) viral instead of deriving them.
    #[arg(long, value_delimiter = ',')]
    viral: Option<Vec<usize>>,
    /// Title terms per cluster label.
    #[arg(long, default_value_t = 3)]
    label_terms: usize,
    #[arg(long)]
    out: PathBuf,
    /// Write the per-sweep log-likelihood as CSV.
    #[arg(long)]
    trace: Option<PathBuf>,
    /// Write each document's cluster as CSV.
    #[arg(long)]
    assignments: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct SelectKArgs {
    #[arg(long)]
    corpus: PathBuf,
    #[arg(long, value_delimiter = ',', required = true)]
    candidates: Vec<usize>,
    #[arg(long, default_value_t = 3)]
    restarts: usize,
    #[arg(long, value_enum, default_value = "held-out")]
    metric: Metric,
    /// Share of each document's tokens held out under `--metric held-out`.
    #[arg(long, default_value_t = 0.2)]
    held_out_fraction: f64,
    #[command(flatten)]
    lda: LdaArgs,
    #[arg(long, value_enum, default_value = "text")]
    format: Format,
}

#[derive(Debug, Args)]
struct ReduceArgs {
    #[arg(long)]
    corpus: PathBuf,
    /// Share of squared singular values to keep.
    #[arg(long, default_value_t = 0.95)]
    threshold: f64,
    #[arg(long)]
    out: PathBuf,
}

#[derive(Debug, Args)]
#[group(id = "source", required = true, args = ["archive", "table"])]
struct StatsArgs {
    #[arg(long)]
    archive: Option<PathBuf>,
    /// CSV with `frequency`, `mean` (or `average`), `variance` and optional `label` columns.
    #[arg(long)]
    table: Option<PathBuf>,
    /// Defaults to the archive's level, or 0.95 for a table.
    #[arg(long)]
    confidence: Option<f64>,
    #[arg(long, value_enum, default_value = "text")]
    format: Format,
}

#[derive(Debug, Args)]
struct ScoreArgs {
    #[arg(long)]
    archive: PathBuf,
    #[arg(long)]
    image: PathBuf,
    #[arg(long, value_enum, default_value = "text")]
    format: Format,
}

#[derive(Debug, Args)]
struct CompareArgs {
    #[arg(long)]
    archive: PathBuf,
    #[arg(long)]
    image_a: PathBuf,
    #[arg(long)]
    image_b: PathBuf,
    #[arg(long, value_enum, default_value = "text")]
    format: Format,
}

#[derive(Debug, Args)]
struct ServeArgs {
    #[arg(long, env = "VIRALENS_ARCHIVE")]
    archive: Option<PathBuf>,
    #[arg(long, env = "VIRALENS_PORT", default_value_t = 8080)]
    port: u16,
    #[arg(long, default_value = "127.0.0.1")]
    host: IpAddr,
}

#[derive(Debug, Args)]
struct ReportArgs {
    #[arg(long)]
    archive: PathBuf,
    #[arg(long, default_value_t = 10)]
    top_words: usize,
    #[arg(long, value_enum, default_value = "text")]
    format: Format,
}

/// Runs the command line and returns the process exit status.
pub fn run<I, T>(argv: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => 0,
                _ => 1,
            };
        }
    };
    let name = command_name(&cli.command);
    let stdout = std::io::stdout();
    let mut out = stdout.lock();
    match execute(cli, &mut out) {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("viralens {name}: {e}");
            e.exit_code()
        }
    }
}

fn command_name(c: &Command) -> &'static str {
    match c {
        Command::Ingest(_) => "ingest",
        Command::Features(_) => "features",
        Command::Train(_) => "train",
        Command::SelectK(_) => "select-k",
        Command::Reduce(_) => "reduce",
        Command::Stats(_) => "stats",
        Command::Score(_) => "score",
        Command::Compare(_) => "compare",
        Command::Serve(_) => "serve",
        Command::Report(_) => "report",
    }
}

fn execute(cli: Cli, out: &mut dyn Write) -> Result<()> {
    let seed = cli.seed;
    let text = match cli.command {
        Command::Ingest(a) => cmd_ingest(a, seed)?,
        Command::Features(a) => cmd_features(a, seed)?,
        Command::Train(a) => cmd_train(a, seed)?,
        Command::SelectK(a) => cmd_select_k(a, seed)?,
        Command::Reduce(a) => cmd_reduce(a)?,
        Command::Stats(a) => cmd_stats(a)?,
        Command::Score(a) => cmd_score(a)?,
        Command::Compare(a) => cmd_compare(a)?,
        Command::Report(a) => cmd_report(a)?,
        Command::Serve(a) => return cmd_serve(a),
    };
    out.write_all(text.as_bytes()).map_err(|e| Error::io("<stdout>", e))
}

fn parse_alpha(raw: &str) -> Result<AlphaPrior> {
    let raw = raw.trim();
    if raw.eq_ignore_ascii_case("default") {
        return Ok(AlphaPrior::Default);
    }
    let values = raw
        .split(',')
        .map(|s| s.trim().parse::<f64>())
        .collect::<std::result::Result<Vec<f64>, _>>()
        .map_err(|_| Error::Validation(format!("--alpha must be `default`, a number or a comma list, got {raw:?}")))?;
    Ok(match values.as_slice() {
        [a] => AlphaPrior::Symmetric(*a),
        _ => AlphaPrior::PerTopic(values),
    })
}

fn to_json<T: Serialize>(value: &T) -> Result<String> {
    let mut s = serde_json::to_string_pretty(value).map_err(|e| Error::Validation(e.to_string()))?;
    s.push('\n');
    Ok(s)
}

fn read_file(path: &Path) -> Result<Vec<u8>> {
    std::fs::read(path).map_err(|e| Error::io(path, e))
}

fn write_file(path: &Path, contents: &str) -> Result<()> {
    std::fs::write(path, contents).map_err(|e| Error::io(path, e))
}

fn load_scorer(path: &Path) -> Result<Scorer> {
    Scorer::new(load_archive(path)?)
}

fn cmd_ingest(a: IngestArgs, seed: u64) -> Result<String> {
    let dictionary = a.dictionary.as_deref().map(load_dictionary).transpose()?;
    let opts = IngestOptions { quantization: a.quant.config()?, seed, dictionary };
    let corpus = ingest(&a.manifest, &opts)?;
    save_corpus(&corpus, &a.out)?;
    let mut s = format!(
        "ingested {} documents x {} words into {}\n",
        corpus.matrix.n_docs(),
        corpus.matrix.n_words(),
        a.out.display()
    );
    if !corpus.empty_docs.is_empty() {
        let _ = writeln!(s, "warning: documents without tokens (skipped in training): {}", corpus.empty_docs.join(", "));
    }
    Ok(s)
}

fn cmd_features(a: FeaturesArgs, seed: u64) -> Result<String> {
    let cfg = a.quant.config()?;
    let features = a.images.iter().map(|p| features_from_file(p, &cfg, seed)).collect::<Result<Vec<_>>>()?;
    match a.format {
        Format::Json => to_json(&features),
        Format::Csv => {
            let mut s = String::from("id");
            for w in cfg.vocabulary() {
                let _ = write!(s, ",{w}");
            }
            s.push('\n');
            for f in &features {
                s.push_str(&f.id);
                for c in &f.counts {
                    let _ = write!(s, ",{c}");
                }
                s.push('\n');
            }
            Ok(s)
        }
        Format::Text => Ok(features.iter().map(|f| render_features(f, &cfg)).collect::<Vec<_>>().join("\n")),
    }
}

fn render_features(f: &ImageFeatures, cfg: &QuantizationConfig) -> String {
    let mut s = format!("{}\n  density   r      g      b      h      s      v\n", f.id);
    for c in &f.descriptor.clusters {
        let [r, g, b] = c.mean_rgb;
        let [h, sat, v] = c.mean_hsv;
        let _ = writeln!(s, "  {:.4}  {r:.3}  {g:.3}  {b:.3}  {h:.3}  {sat:.3}  {v:.3}", c.density);
    }
    let words: Vec<String> = cfg
        .vocabulary()
        .iter()
        .zip(&f.counts)
        .filter(|(_, &c)| c > 0)
        .map(|(w, c)| format!("{w}={c}"))
        .collect();
    let _ = writeln!(s, "  words: {}", words.join(" "));
    s
}

fn cmd_train(a: TrainArgs, seed: u64) -> Result<String> {
    let corpus = load_corpus(&a.corpus)?;
    let viral_override = match a.viral {
        Some(v) => Some(
            v.into_iter()
                .map(|c| c.checked_sub(1).ok_or_else(|| Error::Validation("--viral clusters are numbered from 1".into())))
                .collect::<Result<Vec<_>>>()?,
        ),
        None => None,
    };
    let opts = TrainOptions {
        hyperparams: a.lda.hyperparams(a.k, seed)?,
        confidence: a.confidence,
        viral_override,
        label_terms: a.label_terms,
    };
    let trained = train(&corpus, &opts)?;
    save_archive(&trained.archive, &a.out)?;
    if let Some(path) = &a.trace {
        let mut s = String::from("sweep,log_likelihood\n");
        for (i, ll) in trained.ll_trace.iter().enumerate() {
            let _ = writeln!(s, "{},{ll}", i + 1);
        }
        write_file(path, &s)?;
    }
    if let Some(path) = &a.assignments {
        let mut s = String::from("doc_id,cluster\n");
        for (id, c) in corpus.matrix.doc_ids().iter().zip(&trained.assignments) {
            let _ = writeln!(s, "{id},{}", c.map_or(String::new(), |c| (c + 1).to_string()));
        }
        write_file(path, &s)?;
    }
    let mut s = format!(
        "trained K = {} on {} documents; log-likelihood {:.3}; wrote {}\n",
        a.k,
        corpus.matrix.n_docs() - trained.skipped.len(),
        trained.log_likelihood,
        a.out.display()
    );
    if !trained.skipped.is_empty() {
        let _ = writeln!(s, "warning: skipped empty documents: {}", trained.skipped.join(", "));
    }
    Ok(s)
}

#[derive(Serialize)]
struct SelectionOut {
    best_k: usize,
    metric: &'static str,
    candidates: Vec<CandidateOut>,
}

#[derive(Serialize)]
struct CandidateOut {
    k: usize,
    best_score: f64,
    best_restart: usize,
    restart_scores: Vec<f64>,
}

fn cmd_select_k(a: SelectKArgs, seed: u64) -> Result<String> {
    let corpus = load_corpus(&a.corpus)?;
    let first = *a.candidates.first().ok_or_else(|| Error::Validation("no K candidates".into()))?;
    let template = a.lda.hyperparams(first, seed)?;
    for &k in &a.candidates {
        a.lda.hyperparams(k, seed)?;
    }
    let (metric, metric_name) = match a.metric {
        Metric::HeldOut => (SelectionMetric::HeldOut { fraction: a.held_out_fraction }, "held_out"),
        Metric::Training => (SelectionMetric::Training, "training"),
    };
    let sel = select_k_parallel(&corpus.matrix, &a.candidates, a.restarts, &template, metric)?;
    let out = SelectionOut {
        best_k: sel.best_k,
        metric: metric_name,
        candidates: sel
            .candidates
            .iter()
            .map(|c| CandidateOut {
                k: c.k,
                best_score: c.best_ll,
                best_restart: c.best_restart,
                restart_scores: c.restart_lls.clone(),
            })
            .collect(),
    };
    match a.format {
        Format::Json => to_json(&out),
        Format::Csv => {
            let mut s = String::from("k,restart,log_likelihood\n");
            for c in &out.candidates {
                for (r, ll) in c.restart_scores.iter().enumerate() {
                    let _ = writeln!(s, "{},{r},{ll}", c.k);
                }
            }
            Ok(s)
        }
        Format::Text => {
            let mut s = format!("{:>4}  {:>16}  restarts ({} log-likelihood)\n", "K", "best", metric_name);
            for c in &out.candidates {
                let rs: Vec<String> = c.restart_scores.iter().map(|x| format!("{x:.3}")).collect();
                let _ = writeln!(s, "{:>4}  {:>16.3}  {}", c.k, c.best_score, rs.join("  "));
            }
            let _ = writeln!(s, "\nselected K = {}", out.best_k);
            Ok(s)
        }
    }
}

fn cmd_reduce(a: ReduceArgs) -> Result<String> {
    let corpus = load_corpus(&a.corpus)?;
    let m = &corpus.matrix;
    let dense = Matrix::from_row_major(m.n_docs(), m.n_words(), m.to_dense())?;
    let red = reduce_energy(&dense, a.threshold)?;
    let mut s = String::from("doc_id");
    for j in 1..=red.rank {
        let _ = write!(s, ",f{j}");
    }
    s.push('\n');
    for (d, id) in m.doc_ids().iter().enumerate() {
        s.push_str(id);
        for x in red.features.row(d) {
            let _ = write!(s, ",{x}");
        }
        s.push('\n');
    }
    write_file(&a.out, &s)?;
    Ok(format!(
        "kept {} of {} dimensions ({:.2}% of energy); wrote {}\n",
        red.rank,
        red.singular_values.len(),
        red.retained_energy * 100.0,
        a.out.display()
    ))
}

fn cmd_stats(a: StatsArgs) -> Result<String> {
    let report = match (&a.archive, &a.table) {
        (Some(path), _) => {
            let archive = load_archive(path)?;
            let confidence = a.confidence.unwrap_or(archive.confidence);
            let viral = archive.viral_set();
            report::stats_report(&archive.labeled_stats(), confidence, Some(&viral))?
        }
        (None, Some(path)) => {
            report::stats_report(&report::load_summary_table(path)?, a.confidence.unwrap_or(0.95), None)?
        }
        (None, None) => return Err(Error::Validation("one of --archive or --table is required".into())),
    };
    match a.format {
        Format::Json => to_json(&report),
        Format::Csv => Ok(report::render_stats_csv(&report)),
        Format::Text => Ok(report::render_stats_text(&report)),
    }
}

fn cmd_score(a: ScoreArgs) -> Result<String> {
    let scorer = load_scorer(&a.archive)?;
    let r = scorer.score(&read_file(&a.image)?)?;
    match a.format {
        Format::Json => to_json(&ApiScoreResponse::new(&r, scorer.model_version())),
        Format::Csv => Ok(report::render_score_csv(&r)),
        Format::Text => Ok(report::render_score_text(&r, scorer.model_version())),
    }
}

fn cmd_compare(a: CompareArgs) -> Result<String> {
    let scorer = load_scorer(&a.archive)?;
    let img_a = read_file(&a.image_a).map_err(|e| Error::Variant { variant: "image_a", source: Box::new(e) })?;
    let img_b = read_file(&a.image_b).map_err(|e| Error::Variant { variant: "image_b", source: Box::new(e) })?;
    let cmp = scorer.compare(&img_a, &img_b)?;
    match a.format {
        Format::Json => to_json(&ApiCompareResponse::new(&cmp, scorer.model_version())),
        Format::Csv => Ok(report::render_compare_csv(&cmp)),
        Format::Text => Ok(report::render_compare_text(&cmp, scorer.model_version())),
    }
}

#[derive(Serialize)]
struct WordWeight {
    word: String,
    probability: f64,
}

#[derive(Serialize)]
struct ArchiveSummary {
    model_version: String,
    k: usize,
    vocabulary_size: usize,
    quantization: QuantizationConfig,
    confidence: f64,
    viral_rule: viralens_core::dss::ViralRule,
    clusters: Vec<ClusterRow>,
    top_words: Vec<Vec<WordWeight>>,
}

fn cmd_report(a: ReportArgs) -> Result<String> {
    let scorer = load_scorer(&a.archive)?;
    let archive = scorer.archive();
    let top_words: Vec<Vec<WordWeight>> = archive
        .lda
        .phi
        .iter()
        .map(|row| {
            let mut idx: Vec<usize> = (0..row.len()).collect();
            idx.sort_by(|&x, &y| row[y].total_cmp(&row[x]).then(x.cmp(&y)));
            idx.into_iter()
                .take(a.top_words)
                .map(|w| WordWeight { word: archive.vocabulary[w].clone(), probability: row[w] })
                .collect()
        })
        .collect();
    let summary = ArchiveSummary {
        model_version: scorer.model_version().to_string(),
        k: archive.k(),
        vocabulary_size: archive.vocabulary.len(),
        quantization: archive.quantization,
        confidence: archive.confidence,
        viral_rule: archive.viral_rule,
        clusters: cluster_rows(scorer.stats(), scorer.viral()),
        top_words,
    };
    match a.format {
        Format::Json => to_json(&summary),
        Format::Csv => {
            let mut s = String::from("cluster,rank,word,probability\n");
            for (k, words) in summary.top_words.iter().enumerate() {
                for (r, w) in words.iter().enumerate() {
                    let _ = writeln!(s, "{},{},{},{}", k + 1, r + 1, w.word, w.probability);
                }
            }
            Ok(s)
        }
        Format::Text => {
            let mut s = format!(
                "model {}: K = {}, {} words ({} bins x {} tokens per channel)\n\n",
                summary.model_version,
                summary.k,
                summary.vocabulary_size,
                summary.quantization.bins_per_channel,
                summary.quantization.tokens_per_channel
            );
            s.push_str(&report::render_clusters_text(&summary.clusters));
            s.push_str("\ntop words\n");
            for (k, words) in summary.top_words.iter().enumerate() {
                let ws: Vec<String> = words.iter().map(|w| format!("{} {:.3}", w.word, w.probability)).collect();
                let _ = writeln!(s, "{:>7}  {}", k + 1, ws.join(", "));
            }
            Ok(s)
        }
    }
}

fn cmd_serve(a: ServeArgs) -> Result<()> {
    let scorer = match &a.archive {
        Some(p) => Some(Arc::new(load_scorer(p)?)),
        None => {
            eprintln!("warning: no archive given; scoring endpoints will answer 503");
            None
        }
    };
    let addr = SocketAddr::new(a.host, a.port);
    let runtime = tokio::runtime::Runtime::new().map_err(|e| Error::io("<runtime>", e))?;
    runtime
        .block_on(crate::service::serve(addr, scorer))
        .map_err(|e| Error::io(format!("{addr}"), e))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn alpha_forms() {
        assert_eq!(parse_alpha("default").unwrap(), AlphaPrior::Default);
        assert_eq!(parse_alpha("0.5").unwrap(), AlphaPrior::Symmetric(0.5));
        assert_eq!(parse_alpha("0.1, 2").unwrap(), AlphaPrior::PerTopic(vec![0.1, 2.0]));
        assert!(parse_alpha("lots").is_err());
    }

    #[test]
    fn unknown_subcommand_is_usage_error() {
        assert_eq!(run(["viralens", "frobnicate"]), 1);
        assert_eq!(run(["viralens"]), 1);
        assert_eq!(run(["viralens", "--help"]), 0);
    }

    #[test]
    fn zero_topics_is_validation_error() {
        let err = LdaArgs { alpha: "default".into(), eta: 0.1, sweeps: 10, burn_in: 2 }.hyperparams(0, 1).unwrap_err();
        assert_eq!(err.exit_code(), 1);
        assert!(err.to_string().contains("K must be >= 1"));
    }
}
