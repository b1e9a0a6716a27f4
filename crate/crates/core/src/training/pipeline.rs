//! End-to-end training and grid-search cross-validation.

use std::collections::{BTreeSet, HashSet};
use std::fmt;
use std::str::FromStr;

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use super::gold::{make_creation_samples, make_svm_triplets, simulate_gold_stream, GoldStreamTrace, NegativeSampling};
use super::net::{accuracy, train_creation_net};
use super::smote::{smote_oversample, DEFAULT_NEIGHBORS};
use super::train_linear_svm;
use crate::engine::{cluster_stream, StreamOrder};
use crate::error::{Error, Result};
use crate::metrics::{bcubed_labels, dense_labels};
use crate::model::{Document, ModelBundle, SimilarityParams, BUNDLE_FORMAT_VERSION};
use crate::repr::{EmbeddingStore, SparseEncoder};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GridPoint {
    pub c: f64,
    pub mu: f64,
    pub sigma: f64,
    pub k: usize,
}

impl fmt::Display for GridPoint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "c={} mu={} sigma={} k={}", self.c, self.mu, self.sigma, self.k)
    }
}

/// Cartesian grid over SVM cost, temporal mean and spread (days), and the
/// SMOTE neighbor count.
#[derive(Debug, Clone, PartialEq)]
pub struct HyperGrid {
    pub c: Vec<f64>,
    pub mu: Vec<f64>,
    pub sigma: Vec<f64>,
    pub k: Vec<usize>,
}

impl Default for HyperGrid {
    fn default() -> Self {
        HyperGrid {
            c: vec![0.1, 1.0, 10.0],
            mu: vec![0.0],
            sigma: vec![1.0, 3.0, 7.0, 14.0],
            k: vec![DEFAULT_NEIGHBORS],
        }
    }
}

impl HyperGrid {
    pub fn single(point: GridPoint) -> Self {
        HyperGrid {
            c: vec![point.c],
            mu: vec![point.mu],
            sigma: vec![point.sigma],
            k: vec![point.k],
        }
    }

    /// Points in row-major order over (c, mu, sigma, k).
    pub fn points(&self) -> Vec<GridPoint> {
        let mut out = Vec::new();
        for &c in &self.c {
            for &mu in &self.mu {
                for &sigma in &self.sigma {
                    for &k in &self.k {
                        out.push(GridPoint { c, mu, sigma, k });
                    }
                }
            }
        }
        out
    }

    fn validate(&self) -> Result<()> {
        if self.points().is_empty() {
            return Err(Error::InvalidParameter("hyper-parameter grid is empty".into()));
        }
        if self.c.iter().any(|c| !(c.is_finite() && *c > 0.0)) {
            return Err(Error::InvalidParameter("grid values for c must be positive".into()));
        }
        for p in self.points() {
            SimilarityParams::new(p.mu, p.sigma)?;
        }
        if self.k.contains(&0) {
            return Err(Error::InvalidParameter("grid values for k must be >= 1".into()));
        }
        Ok(())
    }
}

/// `c=0.1,1,10;mu=0;sigma=1,3,7,14;k=5`. Omitted keys keep their defaults.
impl FromStr for HyperGrid {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let mut grid = HyperGrid::default();
        for part in s.split(';').map(str::trim).filter(|p| !p.is_empty()) {
            let (key, values) = part
                .split_once('=')
                .ok_or_else(|| Error::InvalidParameter(format!("grid entry `{part}` is not key=values")))?;
            let bad = |v: &str| Error::InvalidParameter(format!("bad grid value `{v}` for {key}"));
            let floats = || -> Result<Vec<f64>> {
                values.split(',').map(|v| v.trim().parse::<f64>().map_err(|_| bad(v))).collect()
            };
            match key.trim() {
                "c" | "C" => grid.c = floats()?,
                "mu" => grid.mu = floats()?,
                "sigma" => grid.sigma = floats()?,
                "k" => {
                    grid.k = values
                        .split(',')
                        .map(|v| v.trim().parse::<usize>().map_err(|_| bad(v)))
                        .collect::<Result<_>>()?
                }
                other => return Err(Error::InvalidParameter(format!("unknown grid key `{other}`"))),
            }
        }
        grid.validate()?;
        Ok(grid)
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TrainConfig {
    pub c: f64,
    pub sim_params: SimilarityParams,
    pub smote_k: usize,
    pub seed: u64,
    pub sampling: NegativeSampling,
}

impl Default for TrainConfig {
    fn default() -> Self {
        TrainConfig {
            c: 1.0,
            sim_params: SimilarityParams::default(),
            smote_k: DEFAULT_NEIGHBORS,
            seed: 0,
            sampling: NegativeSampling::Uniform,
        }
    }
}

impl TrainConfig {
    pub fn from_point(point: GridPoint, seed: u64, sampling: NegativeSampling) -> Result<Self> {
        Ok(TrainConfig {
            c: point.c,
            sim_params: SimilarityParams::new(point.mu, point.sigma)?,
            smote_k: point.k,
            seed,
            sampling,
        })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct TrainSummary {
    pub documents: usize,
    pub gold_clusters: usize,
    pub triplets: usize,
    pub creation_samples: usize,
    pub creation_positives: usize,
    pub balanced_samples: usize,
    pub creation_accuracy: f64,
}

/// Trains both stages on an already simulated gold stream.
pub fn train_from_trace(
    trace: &GoldStreamTrace,
    embedding_dim: usize,
    config: &TrainConfig,
) -> Result<(ModelBundle, TrainSummary)> {
    if trace.is_empty() {
        return Err(Error::EmptyCorpus);
    }
    let p = config.sim_params;
    let triplets = make_svm_triplets(trace, &p, config.seed, config.sampling)?;
    let weights = train_linear_svm(&triplets, config.c)?;
    let creation = make_creation_samples(trace, &weights, &p)?;
    let balanced = smote_oversample(&creation, config.smote_k, config.seed.wrapping_add(1))?;
    let net = train_creation_net(&balanced, config.seed.wrapping_add(2))?;
    let summary = TrainSummary {
        documents: trace.len(),
        gold_clusters: trace.cluster_count(),
        triplets: triplets.len(),
        creation_samples: creation.len(),
        creation_positives: creation.iter().filter(|s| s.create).count(),
        balanced_samples: balanced.len(),
        creation_accuracy: accuracy(&net, &creation),
    };
    let bundle = ModelBundle {
        weights,
        creation_net: net,
        sim_params: p,
        embedding_dim,
        format_version: BUNDLE_FORMAT_VERSION,
    };
    Ok((bundle, summary))
}

pub fn train_bundle(
    docs: &[Document],
    encoder: &SparseEncoder,
    store: &EmbeddingStore,
    config: &TrainConfig,
) -> Result<(ModelBundle, TrainSummary)> {
    if docs.is_empty() {
        return Err(Error::EmptyCorpus);
    }
    let trace = simulate_gold_stream(docs, encoder, store)?;
    train_from_trace(&trace, store.dim(), config)
}

#[derive(Debug, Clone, PartialEq)]
pub struct CvReport {
    pub best: GridPoint,
    /// Mean held-out B-Cubed F1 per grid point, in grid order.
    pub scores: Vec<(GridPoint, f64)>,
    pub folds: usize,
}

fn gold_label(doc: &Document) -> Result<&str> {
    doc.gold_cluster
        .as_deref()
        .ok_or_else(|| Error::MissingGoldLabel(doc.id.clone()))
}

/// Held-out B-Cubed F1 of a bundle on `test` docs.
fn held_out_f1(
    test: &[Document],
    bundle: &ModelBundle,
    encoder: &SparseEncoder,
    store: &EmbeddingStore,
) -> Result<f64> {
    let (_, assignments) = cluster_stream(test, bundle, encoder, store, StreamOrder::Timestamp)?;
    let gold_of: std::collections::HashMap<&str, &str> =
        test.iter().map(|d| Ok((d.id.as_str(), gold_label(d)?))).collect::<Result<_>>()?;
    let pred: Vec<u64> = assignments.iter().map(|a| a.cluster_id).collect();
    let gold: Vec<&str> = assignments.iter().map(|a| gold_of[a.doc_id.as_str()]).collect();
    Ok(bcubed_labels(&dense_labels(&pred), &dense_labels(&gold))?.f1)
}

/// Grid search with folds over gold clusters. Ties go to the earliest grid
/// point. The first error from any (point, fold) run is returned.
pub fn cross_validate(
    docs: &[Document],
    encoder: &SparseEncoder,
    store: &EmbeddingStore,
    grid: &HyperGrid,
    folds: usize,
    seed: u64,
    sampling: NegativeSampling,
) -> Result<CvReport> {
    if folds < 2 {
        return Err(Error::InvalidParameter(format!("cross-validation needs >= 2 folds, got {folds}")));
    }
    grid.validate()?;
    let labels: BTreeSet<&str> = docs.iter().map(gold_label).collect::<Result<_>>()?;
    if labels.len() < folds {
        return Err(Error::TooFewClusters {
            found: labels.len(),
            required: folds,
        });
    }
    let mut labels: Vec<&str> = labels.into_iter().collect();
    labels.shuffle(&mut ChaCha8Rng::seed_from_u64(seed));

    let splits: Vec<(Vec<Document>, Vec<Document>)> = (0..folds)
        .map(|f| {
            let held: HashSet<&str> = labels.iter().skip(f).step_by(folds).copied().collect();
            docs.iter()
                .cloned()
                .partition(|d| !held.contains(d.gold_cluster.as_deref().unwrap_or_default()))
        })
        .collect();
    let traces: Vec<GoldStreamTrace> = splits
        .par_iter()
        .map(|(train, _)| simulate_gold_stream(train, encoder, store))
        .collect::<Result<_>>()?;

    let points = grid.points();
    let tasks: Vec<(usize, usize)> = (0..points.len()).flat_map(|g| (0..folds).map(move |f| (g, f))).collect();
    let results: Vec<f64> = tasks
        .par_iter()
        .map(|&(g, f)| {
            let config = TrainConfig::from_point(points[g], seed, sampling)?;
            let (bundle, _) = train_from_trace(&traces[f], store.dim(), &config)?;
            held_out_f1(&splits[f].1, &bundle, encoder, store)
        })
        .collect::<Result<_>>()?;

    let scores: Vec<(GridPoint, f64)> = points
        .iter()
        .enumerate()
        .map(|(g, &p)| (p, results[g * folds..(g + 1) * folds].iter().sum::<f64>() / folds as f64))
        .collect();
    let mut best = 0;
    for (i, (_, s)) in scores.iter().enumerate() {
        if *s > scores[best].1 {
            best = i;
        }
    }
    Ok(CvReport {
        best: scores[best].0,
        scores,
        folds,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn grid_parsing() {
        let g: HyperGrid = "c=0.5,2;sigma=1;k=3".parse().unwrap();
        assert_eq!(g.c, vec![0.5, 2.0]);
        assert_eq!(g.mu, vec![0.0]);
        assert_eq!(g.sigma, vec![1.0]);
        assert_eq!(g.k, vec![3]);
        assert_eq!(g.points().len(), 2);
        assert_eq!(HyperGrid::default().points().len(), 12);
        assert!("sigma=0".parse::<HyperGrid>().is_err());
        assert!("c=-1".parse::<HyperGrid>().is_err());
        assert!("foo=1".parse::<HyperGrid>().is_err());
        assert!("k=0".parse::<HyperGrid>().is_err());
    }

    #[test]
    fn too_few_clusters() {
        let docs: Vec<Document> = (0..4)
            .map(|i| {
                Document::from_text(format!("d{i}"), "t", "b", crate::model::Timestamp(i))
                    .unwrap()
                    .with_gold(format!("e{}", i % 2))
            })
            .collect();
        let enc = SparseEncoder::Fitted(crate::repr::TfidfModels::fit(&docs).unwrap());
        let store = EmbeddingStore::new(2);
        let r = cross_validate(&docs, &enc, &store, &HyperGrid::default(), 5, 0, NegativeSampling::Uniform);
        assert!(matches!(r, Err(Error::TooFewClusters { found: 2, required: 5 })));
    }
}
