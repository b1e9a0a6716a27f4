//! The online clustering loop.
//!
//! Each incoming document is compared against every cluster in the pool,
//! the best cluster under the learned weights is handed to the creation
//! network, and the document either joins that cluster or starts a new one.
//! The pool only grows; clusters are never merged or retired.

use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::model::{sort_stream, ClusterRep, DocRepSet, Document, ModelBundle};
use crate::repr::{cluster_from_doc, encode_document, fold_document, EmbeddingStore, SparseEncoder};
use crate::similarity::best_cluster;

#[derive(Debug, Clone, PartialEq)]
pub struct Assignment {
    pub doc_id: String,
    pub cluster_id: u64,
    pub created: bool,
    pub c_score: f64,
    pub creation_prob: f64,
}

/// Clusters created so far. Ids are allocated sequentially from zero, so a
/// cluster's id is also its position.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct ClusterPool {
    clusters: Vec<ClusterRep>,
}

impl ClusterPool {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn len(&self) -> usize {
        self.clusters.len()
    }

    pub fn is_empty(&self) -> bool {
        self.clusters.is_empty()
    }

    pub fn next_id(&self) -> u64 {
        self.clusters.len() as u64
    }

    pub fn clusters(&self) -> &[ClusterRep] {
        &self.clusters
    }

    pub fn get(&self, id: u64) -> Option<&ClusterRep> {
        self.clusters.get(id as usize)
    }

    pub fn total_documents(&self) -> usize {
        self.clusters.iter().map(ClusterRep::size).sum()
    }

    /// Clusters one encoded document.
    pub fn step_rep(&mut self, doc_id: &str, rep: &DocRepSet, bundle: &ModelBundle) -> Result<Assignment> {
        if rep.dense.dim() != bundle.embedding_dim {
            return Err(Error::DimensionMismatch {
                expected: bundle.embedding_dim,
                found: rep.dense.dim(),
            });
        }
        if self.clusters.is_empty() {
            return Ok(self.create(doc_id, rep, 0.0, 1.0));
        }
        let best = best_cluster(rep, &self.clusters, &bundle.weights, &bundle.sim_params)?;
        let prob = bundle.creation_net.predict(&best.similarity);
        if bundle.creation_net.should_create(&best.similarity) {
            return Ok(self.create(doc_id, rep, best.score, prob));
        }
        let slot = best.cluster_id as usize;
        self.clusters[slot] = fold_document(&self.clusters[slot], rep, doc_id)?;
        Ok(Assignment {
            doc_id: doc_id.to_owned(),
            cluster_id: best.cluster_id,
            created: false,
            c_score: best.score,
            creation_prob: prob,
        })
    }

    fn create(&mut self, doc_id: &str, rep: &DocRepSet, c_score: f64, creation_prob: f64) -> Assignment {
        let id = self.next_id();
        self.clusters.push(cluster_from_doc(rep, id, doc_id));
        Assignment {
            doc_id: doc_id.to_owned(),
            cluster_id: id,
            created: true,
            c_score,
            creation_prob,
        }
    }
}

/// Functional form of one clustering step.
pub fn step(
    mut pool: ClusterPool,
    doc: &Document,
    bundle: &ModelBundle,
    encoder: &SparseEncoder,
    store: &EmbeddingStore,
) -> Result<(ClusterPool, Assignment)> {
    let rep = encode_document(doc, encoder, store)?;
    let a = pool.step_rep(&doc.id, &rep, bundle)?;
    Ok((pool, a))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum StreamOrder {
    /// Sort by (timestamp, id).
    #[default]
    Timestamp,
    /// Keep the input order.
    Given,
}

impl FromStr for StreamOrder {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "timestamp" => Ok(StreamOrder::Timestamp),
            "given" => Ok(StreamOrder::Given),
            other => Err(Error::InvalidParameter(format!(
                "unknown order `{other}` (expected timestamp or given)"
            ))),
        }
    }
}

impl fmt::Display for StreamOrder {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            StreamOrder::Timestamp => "timestamp",
            StreamOrder::Given => "given",
        })
    }
}

/// Stateful engine over borrowed models.
pub struct Engine<'a> {
    bundle: &'a ModelBundle,
    encoder: &'a SparseEncoder,
    store: &'a EmbeddingStore,
    pool: ClusterPool,
}

impl<'a> Engine<'a> {
    pub fn new(bundle: &'a ModelBundle, encoder: &'a SparseEncoder, store: &'a EmbeddingStore) -> Self {
        Engine {
            bundle,
            encoder,
            store,
            pool: ClusterPool::new(),
        }
    }

    pub fn step(&mut self, doc: &Document) -> Result<Assignment> {
        let rep = encode_document(doc, self.encoder, self.store)?;
        self.pool.step_rep(&doc.id, &rep, self.bundle)
    }

    pub fn pool(&self) -> &ClusterPool {
        &self.pool
    }

    pub fn into_pool(self) -> ClusterPool {
        self.pool
    }

    /// Lazily clusters `docs`, yielding one assignment per document. The
    /// pool can be inspected through [`Stream::engine`] between items.
    pub fn stream<I>(self, docs: I) -> Stream<'a, I::IntoIter>
    where
        I: IntoIterator,
        I::Item: std::borrow::Borrow<Document>,
    {
        Stream {
            engine: self,
            docs: docs.into_iter(),
        }
    }
}

pub struct Stream<'a, I> {
    engine: Engine<'a>,
    docs: I,
}

impl<'a, I> Stream<'a, I> {
    pub fn engine(&self) -> &Engine<'a> {
        &self.engine
    }

    pub fn into_engine(self) -> Engine<'a> {
        self.engine
    }
}

impl<I> Iterator for Stream<'_, I>
where
    I: Iterator,
    I::Item: std::borrow::Borrow<Document>,
{
    type Item = Result<Assignment>;

    fn next(&mut self) -> Option<Self::Item> {
        let doc = self.docs.next()?;
        Some(self.engine.step(std::borrow::Borrow::borrow(&doc)))
    }
}

pub fn cluster_stream(
    docs: &[Document],
    bundle: &ModelBundle,
    encoder: &SparseEncoder,
    store: &EmbeddingStore,
    order: StreamOrder,
) -> Result<(ClusterPool, Vec<Assignment>)> {
    let mut owned;
    let docs = match order {
        StreamOrder::Given => docs,
        StreamOrder::Timestamp => {
            owned = docs.to_vec();
            sort_stream(&mut owned);
            &owned[..]
        }
    };
    let mut stream = Engine::new(bundle, encoder, store).stream(docs.iter());
    let assignments = stream.by_ref().collect::<Result<Vec<_>>>()?;
    Ok((stream.into_engine().into_pool(), assignments))
}
