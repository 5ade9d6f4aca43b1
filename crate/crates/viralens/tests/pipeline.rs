mod common;

use common::{build_fixture, dictionary_path, style_png};
use viralens::dataset::{ingest, load_corpus, save_corpus, IngestOptions};
use viralens::pipeline::{train, Scorer, TrainOptions};
use viralens::select::select_k_parallel;
use viralens::tokens::load_dictionary;
use viralens::{Error, Stage};
use viralens_core::lda::{select_k_with, LdaHyperparams, SelectionMetric};

fn opts(k: usize) -> TrainOptions {
    let mut o = TrainOptions::new(k);
    o.hyperparams.sweeps = 300;
    o.hyperparams.burn_in = 100;
    o
}

#[test]
fn ingest_image_only_corpus() {
    let fx = build_fixture(3, 1);
    let corpus = ingest(&fx.manifest, &IngestOptions::default()).unwrap();
    assert_eq!(corpus.matrix.n_docs(), 12);
    assert_eq!(corpus.matrix.n_words(), 48);
    assert!(!corpus.text_features);
    // six channels of 100 tokens, each off by at most 5 after rounding
    for d in 0..12 {
        assert!((570..=630).contains(&corpus.matrix.doc_len(d)));
    }
    assert!(corpus.empty_docs.is_empty());
    let path = fx.path("corpus.json");
    save_corpus(&corpus, &path).unwrap();
    assert_eq!(load_corpus(&path).unwrap(), corpus);
}

#[test]
fn ingest_with_dictionary_adds_filtered_text_columns() {
    let fx = build_fixture(2, 2);
    let dict = load_dictionary(&dictionary_path()).unwrap();
    assert_eq!(dict.len(), 1000);
    let corpus = ingest(&fx.manifest, &IngestOptions { dictionary: Some(dict), ..Default::default() }).unwrap();
    assert!(corpus.text_features);
    let vocab = corpus.matrix.vocabulary();
    assert!(vocab.len() > 48);
    assert!(vocab[..48].iter().all(|w| w.contains(':')));
    assert!(vocab.iter().any(|w| w == "marketing"));
    assert!(!vocab.iter().any(|w| w == "xqz3" || w == "roi"));
}

#[test]
fn ingest_is_order_independent_per_document() {
    let fx = build_fixture(2, 3);
    let a = ingest(&fx.manifest, &IngestOptions::default()).unwrap();
    let text = std::fs::read_to_string(&fx.manifest).unwrap();
    let mut lines: Vec<&str> = text.lines().collect();
    lines[1..].reverse();
    let reversed = fx.path("reversed.csv");
    std::fs::write(&reversed, lines.join("\n")).unwrap();
    let b = ingest(&reversed, &IngestOptions::default()).unwrap();
    let n = a.matrix.n_docs();
    for d in 0..n {
        assert_eq!(a.matrix.row(d), b.matrix.row(n - 1 - d));
    }
}

#[test]
fn missing_image_is_io_error_naming_document() {
    let fx = build_fixture(1, 4);
    std::fs::remove_file(fx.path("doc002.png")).unwrap();
    let err = ingest(&fx.manifest, &IngestOptions::default()).unwrap_err();
    assert_eq!(err.exit_code(), 2);
    assert!(err.to_string().contains("doc002"), "{err}");
}

#[test]
fn corrupt_image_names_decode_stage() {
    let fx = build_fixture(1, 5);
    std::fs::write(fx.path("doc001.png"), b"garbage").unwrap();
    let err = ingest(&fx.manifest, &IngestOptions::default()).unwrap_err();
    assert_eq!(err.pipeline_stage(), Some(Stage::Decode));
    assert_eq!(err.exit_code(), 1);
}

#[test]
fn train_score_compare() {
    let fx = build_fixture(6, 6);
    let corpus = ingest(&fx.manifest, &IngestOptions::default()).unwrap();
    let trained = train(&corpus, &opts(4)).unwrap();
    let archive = &trained.archive;
    assert_eq!(archive.k(), 4);
    assert_eq!(archive.labels.len(), 4);
    let freq: usize = archive.cluster_stats.clusters.iter().map(|c| c.frequency).sum();
    assert_eq!(freq, 24);
    assert!(trained.assignments.iter().all(Option::is_some));

    // documents of one style share a cluster
    for style in 0..4 {
        let clusters: Vec<usize> = fx
            .styles
            .iter()
            .zip(&trained.assignments)
            .filter(|(&s, _)| s == style)
            .map(|(_, c)| c.unwrap())
            .collect();
        assert!(clusters.windows(2).all(|w| w[0] == w[1]), "style {style}: {clusters:?}");
    }

    let scorer = Scorer::new(archive.clone()).unwrap();
    for (style, path) in fx.held_out.iter().enumerate() {
        let bytes = std::fs::read(path).unwrap();
        let r = scorer.score(&bytes).unwrap();
        assert!((r.theta.iter().sum::<f64>() - 1.0).abs() < 1e-9);
        assert_eq!(r, scorer.score(&bytes).unwrap());
        let expected_cluster = trained.assignments[fx.styles.iter().position(|&s| s == style).unwrap()].unwrap();
        let argmax = (0..4).max_by(|&a, &b| r.theta[a].total_cmp(&r.theta[b])).unwrap();
        assert_eq!(argmax, expected_cluster, "held-out style {style}");
        let (lo, hi) = archive
            .cluster_stats
            .means()
            .iter()
            .flatten()
            .fold((f64::INFINITY, f64::NEG_INFINITY), |(l, h), &m| (l.min(m), h.max(m)));
        assert!(r.expected_activity >= lo - 1e-9 && r.expected_activity <= hi + 1e-9);
        assert!((0.0..=1.0).contains(&r.viral_probability));
    }

    let a = std::fs::read(&fx.held_out[0]).unwrap();
    let b = std::fs::read(&fx.held_out[1]).unwrap();
    let same = scorer.compare(&a, &a).unwrap();
    assert!(same.delta.theta.iter().all(|d| d.abs() < 1e-9));
    assert!(same.delta.expected_activity.abs() < 1e-9);
    let ab = scorer.compare(&a, &b).unwrap();
    let ba = scorer.compare(&b, &a).unwrap();
    for (x, y) in ab.delta.theta.iter().zip(&ba.delta.theta) {
        assert_eq!(*x, -*y);
    }
    assert_eq!(ab.delta.viral_probability, -ba.delta.viral_probability);

    match scorer.compare(&a, b"nope").unwrap_err() {
        Error::Variant { variant, source } => {
            assert_eq!(variant, "image_b");
            assert_eq!(source.pipeline_stage(), Some(Stage::Decode));
        }
        other => panic!("unexpected {other:?}"),
    }
}

#[test]
fn viral_style_is_flagged() {
    let fx = build_fixture(8, 7);
    let corpus = ingest(&fx.manifest, &IngestOptions::default()).unwrap();
    let trained = train(&corpus, &opts(4)).unwrap();
    let viral_doc = fx.styles.iter().position(|&s| s == 0).unwrap();
    let viral_cluster = trained.assignments[viral_doc].unwrap();
    assert!(trained.archive.viral_clusters.contains(&viral_cluster), "{:?}", trained.archive.viral_clusters);
}

#[test]
fn explicit_viral_override() {
    let fx = build_fixture(2, 8);
    let corpus = ingest(&fx.manifest, &IngestOptions::default()).unwrap();
    let mut o = opts(2);
    o.viral_override = Some(vec![1]);
    let trained = train(&corpus, &o).unwrap();
    assert_eq!(trained.archive.viral_clusters, vec![1]);
    o.viral_override = Some(vec![5]);
    assert!(train(&corpus, &o).is_err());
}

#[test]
fn training_is_deterministic() {
    let fx = build_fixture(2, 9);
    let corpus = ingest(&fx.manifest, &IngestOptions::default()).unwrap();
    let a = train(&corpus, &opts(3)).unwrap().archive;
    let b = train(&corpus, &opts(3)).unwrap().archive;
    assert_eq!(a.to_bytes().unwrap(), b.to_bytes().unwrap());
}

#[test]
fn parallel_selection_matches_sequential() {
    let fx = build_fixture(3, 10);
    let corpus = ingest(&fx.manifest, &IngestOptions::default()).unwrap();
    let mut template = LdaHyperparams::new(2);
    template.sweeps = 60;
    template.burn_in = 20;
    for metric in [SelectionMetric::Training, SelectionMetric::default()] {
        let seq = select_k_with(&corpus.matrix, &[2, 3, 4], 2, &template, metric).unwrap();
        let par = select_k_parallel(&corpus.matrix, &[2, 3, 4], 2, &template, metric).unwrap();
        assert_eq!(seq, par);
    }
    assert!(select_k_parallel(&corpus.matrix, &[], 2, &template, SelectionMetric::Training).is_err());
    assert!(select_k_parallel(&corpus.matrix, &[2], 0, &template, SelectionMetric::Training).is_err());
}

#[test]
fn scoring_uses_only_visual_columns_of_text_archives() {
    let fx = build_fixture(2, 11);
    let dict = load_dictionary(&dictionary_path()).unwrap();
    let corpus = ingest(&fx.manifest, &IngestOptions { dictionary: Some(dict), ..Default::default() }).unwrap();
    let trained = train(&corpus, &opts(2)).unwrap();
    let scorer = Scorer::new(trained.archive).unwrap();
    let r = scorer.score(&style_png(2, 99)).unwrap();
    assert!((r.theta.iter().sum::<f64>() - 1.0).abs() < 1e-9);
}
