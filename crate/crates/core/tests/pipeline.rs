use std::time::{Duration, Instant};

use streamclust::engine::{cluster_stream, StreamOrder};
use streamclust::metrics::{bcubed, evaluate, MetricKind, Partition};
use streamclust::repr::{SparseEncoder, TfidfModels};
use streamclust::synth::{generate, SynthConfig, SynthCorpus};
use streamclust::training::{cross_validate, train_bundle, HyperGrid, NegativeSampling, TrainConfig};
use streamclust::Error;

fn gold_partition(corpus: &SynthCorpus) -> Partition {
    Partition::from_pairs(corpus.docs.iter().map(|d| (d.id.clone(), d.gold_cluster.clone().unwrap()))).unwrap()
}

#[test]
fn planted_events_are_recovered_on_a_fresh_stream() {
    let start = Instant::now();
    let train = generate(&SynthConfig::default()).unwrap();
    let test = generate(&SynthConfig {
        seed: 1,
        ..SynthConfig::default()
    })
    .unwrap();
    let encoder = SparseEncoder::Fitted(TfidfModels::fit(&train.docs).unwrap());
    let (bundle, summary) = train_bundle(&train.docs, &encoder, &train.store, &TrainConfig::default()).unwrap();
    assert_eq!(summary.gold_clusters, 20);

    let test_encoder = SparseEncoder::Fitted(TfidfModels::fit(&test.docs).unwrap());
    let (pool, assignments) =
        cluster_stream(&test.docs, &bundle, &test_encoder, &test.store, StreamOrder::Timestamp).unwrap();
    let pred = Partition::from_pairs(assignments.iter().map(|a| (a.doc_id.clone(), a.cluster_id.to_string()))).unwrap();
    let f1 = bcubed(&pred, &gold_partition(&test)).unwrap().f1;
    assert!(f1 >= 0.99, "B-Cubed F1 {f1}");
    assert!(pool.len().abs_diff(20) <= 1, "{} clusters", pool.len());
    assert!(start.elapsed() < Duration::from_secs(120));
}

#[test]
fn training_is_deterministic() {
    let corpus = generate(&SynthConfig {
        events: 6,
        docs_per_event: 10,
        ..SynthConfig::default()
    })
    .unwrap();
    let encoder = SparseEncoder::Fitted(TfidfModels::fit(&corpus.docs).unwrap());
    let config = TrainConfig::default();
    let a = train_bundle(&corpus.docs, &encoder, &corpus.store, &config).unwrap();
    let b = train_bundle(&corpus.docs, &encoder, &corpus.store, &config).unwrap();
    assert_eq!(a, b);
}

#[test]
fn cross_validation_rejects_a_degenerate_temporal_scale() {
    // odd events reuse the previous event's vocabulary and embedding center,
    // so only time tells each pair apart
    let corpus = generate(&SynthConfig {
        events: 10,
        docs_per_event: 15,
        paired_gap_days: Some(12.0),
        ..SynthConfig::default()
    })
    .unwrap();
    let encoder = SparseEncoder::Fitted(TfidfModels::fit(&corpus.docs).unwrap());
    let grid: HyperGrid = "c=1;sigma=1e-9,3".parse().unwrap();
    let report = cross_validate(&corpus.docs, &encoder, &corpus.store, &grid, 3, 0, NegativeSampling::Uniform).unwrap();
    assert_eq!(report.scores.len(), 2);
    assert_eq!(report.best.sigma, 3.0, "{:?}", report.scores);
    assert!(report.scores[1].1 > report.scores[0].1);
}

#[test]
fn cross_validation_reports_too_few_clusters() {
    let corpus = generate(&SynthConfig {
        events: 2,
        docs_per_event: 5,
        ..SynthConfig::default()
    })
    .unwrap();
    let encoder = SparseEncoder::Fitted(TfidfModels::fit(&corpus.docs).unwrap());
    let r = cross_validate(&corpus.docs, &encoder, &corpus.store, &HyperGrid::default(), 3, 0, NegativeSampling::Uniform);
    assert!(matches!(r, Err(Error::TooFewClusters { found: 2, required: 3 })));
}

#[test]
fn evaluation_of_gold_against_itself_is_perfect() {
    let corpus = generate(&SynthConfig {
        events: 4,
        docs_per_event: 6,
        ..SynthConfig::default()
    })
    .unwrap();
    let gold = gold_partition(&corpus);
    let report = evaluate(&gold, &gold, &MetricKind::ALL).unwrap();
    for kind in MetricKind::ALL {
        assert_eq!(report.score(&kind.to_string()), Some(1.0), "{kind}");
    }
}
