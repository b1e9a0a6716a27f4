//! Gold-stream simulation and the training sets derived from it.
//!
//! The labeled training stream is replayed in order and every document is
//! folded into its true cluster. Before each fold the current pool is
//! exposed to a visitor, which is how the triplet and creation samples are
//! produced without materializing one pool snapshot per document.

use std::collections::HashMap;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::model::{sort_stream, ClusterRep, DocRepSet, Document, SimilarityParams, WeightVector, NUM_FEATURES};
use crate::repr::{cluster_from_doc, encode_document, fold_document, EmbeddingStore, SparseEncoder};
use crate::similarity::{best_cluster, similarity_vector};
use crate::training::{CreationSample, SvmTripletSample};

#[derive(Debug, Clone, PartialEq)]
pub struct TraceRecord {
    pub doc_id: String,
    pub rep: DocRepSet,
    /// Pool id of the document's gold cluster (allocated on first sight).
    pub gold_cluster: u64,
    /// Whether the gold cluster already existed when the document arrived.
    pub gold_present: bool,
    /// Pool size when the document arrived.
    pub pool_size: usize,
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct GoldStreamTrace {
    records: Vec<TraceRecord>,
    labels: Vec<String>,
}

impl GoldStreamTrace {
    pub fn records(&self) -> &[TraceRecord] {
        &self.records
    }

    pub fn len(&self) -> usize {
        self.records.len()
    }

    pub fn is_empty(&self) -> bool {
        self.records.is_empty()
    }

    /// Gold label of pool cluster `id`.
    pub fn label(&self, id: u64) -> &str {
        &self.labels[id as usize]
    }

    pub fn cluster_count(&self) -> usize {
        self.labels.len()
    }

    /// Replays the stream, calling `visit` with each record and the pool as
    /// it was before the record's document was folded in. Pool ids equal
    /// positions in the slice.
    pub fn replay<F>(&self, mut visit: F) -> Result<Vec<ClusterRep>>
    where
        F: FnMut(&TraceRecord, &[ClusterRep]) -> Result<()>,
    {
        let mut pool: Vec<ClusterRep> = Vec::with_capacity(self.labels.len());
        for rec in &self.records {
            visit(rec, &pool)?;
            if rec.gold_present {
                let slot = rec.gold_cluster as usize;
                pool[slot] = fold_document(&pool[slot], &rec.rep, &rec.doc_id)?;
            } else {
                debug_assert_eq!(rec.gold_cluster as usize, pool.len());
                pool.push(cluster_from_doc(&rec.rep, rec.gold_cluster, &rec.doc_id));
            }
        }
        Ok(pool)
    }
}

/// Orders `docs` by (timestamp, id), encodes them and records gold-cluster
/// membership as the stream is replayed.
pub fn simulate_gold_stream(
    docs: &[Document],
    encoder: &SparseEncoder,
    store: &EmbeddingStore,
) -> Result<GoldStreamTrace> {
    let mut ordered = docs.to_vec();
    sort_stream(&mut ordered);
    let mut ids: HashMap<String, u64> = HashMap::new();
    let mut labels = Vec::new();
    let mut records = Vec::with_capacity(ordered.len());
    let mut seen = std::collections::HashSet::new();
    for doc in &ordered {
        let label = doc
            .gold_cluster
            .as_ref()
            .ok_or_else(|| Error::MissingGoldLabel(doc.id.clone()))?;
        if !seen.insert(doc.id.as_str()) {
            return Err(Error::DuplicateDocument(doc.id.clone()));
        }
        let rep = encode_document(doc, encoder, store)?;
        let pool_size = labels.len();
        let (gold_cluster, gold_present) = match ids.get(label) {
            Some(&id) => (id, true),
            None => {
                let id = labels.len() as u64;
                ids.insert(label.clone(), id);
                labels.push(label.clone());
                (id, false)
            }
        };
        records.push(TraceRecord {
            doc_id: doc.id.clone(),
            rep,
            gold_cluster,
            gold_present,
            pool_size,
        });
    }
    Ok(GoldStreamTrace { records, labels })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum NegativeSampling {
    /// Uniform over the non-gold clusters in the pool.
    #[default]
    Uniform,
    /// The non-gold cluster with the highest unweighted similarity sum.
    Hard,
}

/// One triplet per eligible record, `x = sim(doc, gold) - sim(doc, negative)`
/// with label +1, after which a seeded half of the set is negated.
pub fn make_svm_triplets(
    trace: &GoldStreamTrace,
    p: &SimilarityParams,
    seed: u64,
    sampling: NegativeSampling,
) -> Result<Vec<SvmTripletSample>> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut samples = Vec::new();
    trace.replay(|rec, pool| {
        if !rec.gold_present || pool.len() < 2 {
            return Ok(());
        }
        let gold = &pool[rec.gold_cluster as usize];
        let positive = similarity_vector(&rec.rep, gold, p)?;
        let negative = match sampling {
            NegativeSampling::Uniform => {
                let mut pick = rng.random_range(0..pool.len() - 1);
                if pick >= rec.gold_cluster as usize {
                    pick += 1;
                }
                similarity_vector(&rec.rep, &pool[pick], p)?
            }
            NegativeSampling::Hard => {
                let mut best = None;
                for c in pool.iter().filter(|c| c.id() != rec.gold_cluster) {
                    let s = similarity_vector(&rec.rep, c, p)?;
                    let total: f64 = s.values().iter().sum();
                    if best.as_ref().map_or(true, |(t, _)| total > *t) {
                        best = Some((total, s));
                    }
                }
                best.expect("pool has a non-gold cluster").1
            }
        };
        samples.push(SvmTripletSample {
            x: positive.sub(&negative),
            y: 1,
        });
        Ok(())
    })?;

    let mut order: Vec<usize> = (0..samples.len()).collect();
    order.shuffle(&mut rng);
    for &i in &order[..samples.len() / 2] {
        samples[i] = samples[i].negated();
    }
    Ok(samples)
}

/// One sample per record with a non-empty pool: the similarity vector to the
/// best cluster under `w`, labelled `create` when the gold cluster was not in
/// the pool yet.
pub fn make_creation_samples(
    trace: &GoldStreamTrace,
    w: &WeightVector,
    p: &SimilarityParams,
) -> Result<Vec<CreationSample>> {
    let mut samples = Vec::new();
    trace.replay(|rec, pool| {
        if pool.is_empty() {
            return Ok(());
        }
        let best = best_cluster(&rec.rep, pool, w, p)?;
        samples.push(CreationSample {
            x: best.similarity,
            create: !rec.gold_present,
        });
        Ok(())
    })?;
    Ok(samples)
}

/// Element-wise negation helper used by the balancing step.
pub(crate) fn negate(x: &[f64; NUM_FEATURES]) -> [f64; NUM_FEATURES] {
    std::array::from_fn(|i| -x[i])
}
