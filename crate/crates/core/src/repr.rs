//! Document encoding (TF-IDF bags, embedding lookup) and cluster aggregation.

use std::collections::{BTreeMap, BTreeSet, HashMap};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::{
    sparse_slot, ClusterRep, DenseVector, DocRepSet, Document, SectionKind, SparseVector, Unit,
    NUM_SPARSE,
};

/// TF-IDF model for one annotation unit. `idf(t) = ln(N / df(t)) + 1`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TfidfModel {
    unit: Unit,
    doc_count: usize,
    vocabulary: BTreeMap<String, u32>,
    idf: Vec<f64>,
}

impl TfidfModel {
    pub fn unit(&self) -> Unit {
        self.unit
    }

    pub fn doc_count(&self) -> usize {
        self.doc_count
    }

    pub fn vocabulary_size(&self) -> usize {
        self.vocabulary.len()
    }

    pub fn index_of(&self, term: &str) -> Option<u32> {
        self.vocabulary.get(term).copied()
    }

    pub fn idf_of(&self, term: &str) -> Option<f64> {
        self.index_of(term).map(|i| self.idf[i as usize])
    }

    pub fn idf(&self, index: u32) -> f64 {
        self.idf[index as usize]
    }

    /// Builds a model from explicit idf weights, e.g. ones shipped with a corpus.
    pub fn from_weights(unit: Unit, doc_count: usize, weights: BTreeMap<String, f64>) -> Result<TfidfModel> {
        if weights.values().any(|w| !w.is_finite() || *w <= 0.0) {
            return Err(Error::InvalidParameter("idf weights must be finite and positive".into()));
        }
        let mut vocabulary = BTreeMap::new();
        let mut idf = Vec::with_capacity(weights.len());
        for (i, (term, w)) in weights.into_iter().enumerate() {
            vocabulary.insert(term, i as u32);
            idf.push(w);
        }
        Ok(TfidfModel {
            unit,
            doc_count,
            vocabulary,
            idf,
        })
    }

    pub(crate) fn validate(&self) -> Result<()> {
        let n = self.vocabulary.len();
        if self.idf.len() != n || self.vocabulary.values().any(|&i| i as usize >= n) {
            return Err(Error::CorruptFile(format!("{} tf-idf model: vocabulary/idf mismatch", self.unit.name())));
        }
        if self.idf.iter().any(|w| !w.is_finite() || *w <= 0.0) {
            return Err(Error::CorruptFile(format!("{} tf-idf model: non-positive idf", self.unit.name())));
        }
        Ok(())
    }
}

/// Fits one TF-IDF model. Document frequency counts each document once per
/// term over all of its sections, which equals the title+body section when
/// that section is the concatenation of the other two.
pub fn fit_tfidf(corpus: &[Document], unit: Unit) -> Result<TfidfModel> {
    if corpus.is_empty() {
        return Err(Error::EmptyCorpus);
    }
    let mut df: BTreeMap<&str, usize> = BTreeMap::new();
    for doc in corpus {
        let terms: BTreeSet<&str> = SectionKind::ALL
            .iter()
            .flat_map(|s| doc.section(*s).terms(unit))
            .map(String::as_str)
            .collect();
        for t in terms {
            *df.entry(t).or_default() += 1;
        }
    }
    let n = corpus.len() as f64;
    let weights = df
        .into_iter()
        .map(|(t, d)| (t.to_owned(), (n / d as f64).ln() + 1.0))
        .collect();
    TfidfModel::from_weights(unit, corpus.len(), weights)
}

/// `tf(t) * idf(t)` over the in-vocabulary terms of one section.
pub fn encode_sparse(doc: &Document, model: &TfidfModel, section: SectionKind) -> SparseVector {
    let mut counts: BTreeMap<u32, f64> = BTreeMap::new();
    for term in doc.section(section).terms(model.unit) {
        if let Some(i) = model.index_of(term) {
            *counts.entry(i).or_default() += 1.0;
        }
    }
    let pairs = counts.into_iter().map(|(i, tf)| (i, tf * model.idf(i))).collect();
    SparseVector::from_pairs(pairs).expect("tf-idf values are finite")
}

/// The three per-unit TF-IDF models.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TfidfModels {
    token: TfidfModel,
    lemma: TfidfModel,
    entity: TfidfModel,
}

impl TfidfModels {
    pub fn new(token: TfidfModel, lemma: TfidfModel, entity: TfidfModel) -> Result<TfidfModels> {
        for (m, u) in [(&token, Unit::Token), (&lemma, Unit::Lemma), (&entity, Unit::Entity)] {
            if m.unit != u {
                return Err(Error::InvalidParameter(format!(
                    "expected a {} model, got {}",
                    u.name(),
                    m.unit.name()
                )));
            }
        }
        Ok(TfidfModels { token, lemma, entity })
    }

    pub fn fit(corpus: &[Document]) -> Result<TfidfModels> {
        TfidfModels::new(
            fit_tfidf(corpus, Unit::Token)?,
            fit_tfidf(corpus, Unit::Lemma)?,
            fit_tfidf(corpus, Unit::Entity)?,
        )
    }

    pub fn get(&self, unit: Unit) -> &TfidfModel {
        match unit {
            Unit::Token => &self.token,
            Unit::Lemma => &self.lemma,
            Unit::Entity => &self.entity,
        }
    }

    pub fn validate(&self) -> Result<()> {
        self.token.validate()?;
        self.lemma.validate()?;
        self.entity.validate()
    }

    pub fn encode(&self, doc: &Document) -> [SparseVector; NUM_SPARSE] {
        std::array::from_fn(|slot| {
            let unit = Unit::ALL[slot / 3];
            let section = SectionKind::ALL[slot % 3];
            debug_assert_eq!(sparse_slot(unit, section), slot);
            encode_sparse(doc, self.get(unit), section)
        })
    }
}

/// Per-document TF-IDF bags shipped with a corpus, used verbatim.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct ProvidedWeights {
    vocab: [BTreeMap<String, u32>; 3],
    bags: HashMap<String, [SparseVector; NUM_SPARSE]>,
}

impl ProvidedWeights {
    pub fn new() -> Self {
        Self::default()
    }

    /// Registers the weighted bags of one document, indexed by canonical
    /// slot. Term indices are allocated per unit on first sight.
    pub fn insert(&mut self, doc_id: &str, bags: [Vec<(String, f64)>; NUM_SPARSE]) -> Result<()> {
        let mut out: [SparseVector; NUM_SPARSE] = Default::default();
        for (slot, terms) in bags.into_iter().enumerate() {
            let vocab = &mut self.vocab[slot / 3];
            let pairs = terms
                .into_iter()
                .map(|(t, w)| {
                    let next = vocab.len() as u32;
                    (*vocab.entry(t).or_insert(next), w)
                })
                .collect();
            out[slot] = SparseVector::from_pairs(pairs)?;
        }
        self.bags.insert(doc_id.to_owned(), out);
        Ok(())
    }

    pub fn len(&self) -> usize {
        self.bags.len()
    }

    pub fn is_empty(&self) -> bool {
        self.bags.is_empty()
    }

    pub fn vocabulary_size(&self, unit: Unit) -> usize {
        self.vocab[unit.index()].len()
    }

    pub fn bags(&self, doc_id: &str) -> Option<&[SparseVector; NUM_SPARSE]> {
        self.bags.get(doc_id)
    }
}

/// Source of the nine sparse bags of a document.
#[derive(Debug, Clone, PartialEq)]
pub enum SparseEncoder {
    Fitted(TfidfModels),
    Provided(ProvidedWeights),
}

impl SparseEncoder {
    pub fn encode(&self, doc: &Document) -> Result<[SparseVector; NUM_SPARSE]> {
        match self {
            SparseEncoder::Fitted(m) => Ok(m.encode(doc)),
            SparseEncoder::Provided(p) => p
                .bags(&doc.id)
                .cloned()
                .ok_or_else(|| Error::InvalidDocument(format!("no corpus tf-idf weights for `{}`", doc.id))),
        }
    }
}

impl From<TfidfModels> for SparseEncoder {
    fn from(m: TfidfModels) -> Self {
        SparseEncoder::Fitted(m)
    }
}

/// Dense document vectors keyed by document id, kept as 32-bit floats.
#[derive(Debug, Clone, PartialEq)]
pub struct EmbeddingStore {
    dim: usize,
    order: Vec<String>,
    vectors: HashMap<String, Vec<f32>>,
}

impl EmbeddingStore {
    pub fn new(dim: usize) -> Self {
        EmbeddingStore {
            dim,
            order: Vec::new(),
            vectors: HashMap::new(),
        }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn len(&self) -> usize {
        self.order.len()
    }

    pub fn is_empty(&self) -> bool {
        self.order.is_empty()
    }

    /// Inserts or replaces a vector. Rejects wrong dimensions and
    /// non-finite values.
    pub fn insert(&mut self, doc_id: impl Into<String>, vector: Vec<f32>) -> Result<()> {
        if vector.len() != self.dim {
            return Err(Error::DimensionMismatch {
                expected: self.dim,
                found: vector.len(),
            });
        }
        if vector.iter().any(|v| !v.is_finite()) {
            return Err(Error::InvalidParameter("embedding values must be finite".into()));
        }
        let id = doc_id.into();
        if self.vectors.insert(id.clone(), vector).is_none() {
            self.order.push(id);
        }
        Ok(())
    }

    pub fn contains(&self, doc_id: &str) -> bool {
        self.vectors.contains_key(doc_id)
    }

    pub fn get_raw(&self, doc_id: &str) -> Option<&[f32]> {
        self.vectors.get(doc_id).map(Vec::as_slice)
    }

    pub fn get(&self, doc_id: &str) -> Option<DenseVector> {
        self.get_raw(doc_id)
            .map(|v| DenseVector::new(v.iter().map(|&x| x as f64).collect()).expect("finite by construction"))
    }

    /// Ids in insertion order.
    pub fn ids(&self) -> impl Iterator<Item = &str> {
        self.order.iter().map(String::as_str)
    }
}

pub fn encode_document(doc: &Document, encoder: &SparseEncoder, store: &EmbeddingStore) -> Result<DocRepSet> {
    let dense = store.get(&doc.id).ok_or_else(|| Error::MissingEmbedding(doc.id.clone()))?;
    Ok(DocRepSet {
        sparse: encoder.encode(doc)?,
        dense,
        timestamp: doc.timestamp,
    })
}

pub fn cluster_from_doc(rep: &DocRepSet, id: u64, doc_id: &str) -> ClusterRep {
    ClusterRep {
        id,
        member_ids: vec![doc_id.to_owned()],
        sparse_norms: std::array::from_fn(|i| rep.sparse[i].norm()),
        sparse_mean: rep.sparse.clone(),
        dense_norm: rep.dense.norm(),
        dense_mean: rep.dense.clone(),
        ts_min: rep.timestamp,
        ts_max: rep.timestamp,
        ts_sum: rep.timestamp.secs() as i128,
    }
}

/// Returns the cluster with `rep` mean-pooled in.
pub fn fold_document(cluster: &ClusterRep, rep: &DocRepSet, doc_id: &str) -> Result<ClusterRep> {
    if cluster.contains(doc_id) {
        return Err(Error::DuplicateDocument(doc_id.to_owned()));
    }
    let n = cluster.size();
    let dense_mean = cluster.dense_mean.mean_update(n, &rep.dense)?;
    let sparse_mean: [SparseVector; NUM_SPARSE] =
        std::array::from_fn(|i| cluster.sparse_mean[i].mean_update(n, &rep.sparse[i]));
    let mut member_ids = cluster.member_ids.clone();
    member_ids.push(doc_id.to_owned());
    Ok(ClusterRep {
        id: cluster.id,
        member_ids,
        sparse_norms: std::array::from_fn(|i| sparse_mean[i].norm()),
        sparse_mean,
        dense_norm: dense_mean.norm(),
        dense_mean,
        ts_min: cluster.ts_min.min(rep.timestamp),
        ts_max: cluster.ts_max.max(rep.timestamp),
        ts_sum: cluster.ts_sum + rep.timestamp.secs() as i128,
    })
}
