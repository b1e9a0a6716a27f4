//! Domain types shared by every stage of the pipeline.
//!
//! A document carries eleven representations: nine sparse TF-IDF bags
//! (three units over three text sections), one dense embedding and one
//! timestamp. Clusters aggregate those and add two extra timestamps, so a
//! document–cluster comparison yields thirteen similarities. Their order is
//! fixed by [`FEATURE_LABELS`] and every producer and consumer of a
//! [`SimilarityVector`] or [`WeightVector`] relies on it.

use std::fmt;

use chrono::{DateTime, NaiveDate, NaiveDateTime, Utc};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::training::CreationNet;

pub const NUM_SPARSE: usize = 9;
pub const NUM_FEATURES: usize = 13;
pub const DENSE_FEATURE: usize = 9;
pub const TS_MIN_FEATURE: usize = 10;
pub const TS_MAX_FEATURE: usize = 11;
pub const TS_MEAN_FEATURE: usize = 12;

pub const SECONDS_PER_DAY: f64 = 86_400.0;

/// Canonical similarity feature order: the nine sparse bags ordered by
/// unit then section, the dense cosine, then the three temporal
/// similarities against the cluster's min, max and mean timestamps.
pub const FEATURE_LABELS: [&str; NUM_FEATURES] = [
    "tok/title",
    "tok/body",
    "tok/titlebody",
    "lem/title",
    "lem/body",
    "lem/titlebody",
    "ent/title",
    "ent/body",
    "ent/titlebody",
    "dense",
    "ts_min",
    "ts_max",
    "ts_mean",
];

pub fn canonical_feature_order() -> &'static [&'static str; NUM_FEATURES] {
    &FEATURE_LABELS
}

pub fn feature_index(label: &str) -> Option<usize> {
    FEATURE_LABELS.iter().position(|l| *l == label)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum SectionKind {
    Title,
    Body,
    TitleBody,
}

impl SectionKind {
    pub const ALL: [SectionKind; 3] = [SectionKind::Title, SectionKind::Body, SectionKind::TitleBody];

    pub fn index(self) -> usize {
        self as usize
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Unit {
    Token,
    Lemma,
    Entity,
}

impl Unit {
    pub const ALL: [Unit; 3] = [Unit::Token, Unit::Lemma, Unit::Entity];

    pub fn index(self) -> usize {
        self as usize
    }

    pub fn name(self) -> &'static str {
        match self {
            Unit::Token => "token",
            Unit::Lemma => "lemma",
            Unit::Entity => "entity",
        }
    }

    pub fn parse(s: &str) -> Option<Unit> {
        match s.to_ascii_lowercase().as_str() {
            "token" | "tokens" | "tok" => Some(Unit::Token),
            "lemma" | "lemmas" | "lem" => Some(Unit::Lemma),
            "entity" | "entities" | "ent" => Some(Unit::Entity),
            _ => None,
        }
    }
}

/// Position of a (unit, section) bag in the canonical order.
pub fn sparse_slot(unit: Unit, section: SectionKind) -> usize {
    unit.index() * 3 + section.index()
}

/// Seconds since the Unix epoch, UTC.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Timestamp(pub i64);

impl Timestamp {
    pub fn from_secs(secs: i64) -> Self {
        Timestamp(secs)
    }

    pub fn secs(self) -> i64 {
        self.0
    }

    /// Signed difference `self - other` in fractional days.
    pub fn days_since(self, other: Timestamp) -> f64 {
        (self.0 - other.0) as f64 / SECONDS_PER_DAY
    }

    /// Accepts RFC 3339, `YYYY-MM-DD HH:MM:SS`, `YYYY-MM-DDTHH:MM:SS` and
    /// bare `YYYY-MM-DD` (midnight UTC).
    pub fn parse(s: &str) -> Option<Timestamp> {
        let s = s.trim();
        if let Ok(dt) = DateTime::parse_from_rfc3339(s) {
            return Some(Timestamp(dt.timestamp()));
        }
        for fmt in ["%Y-%m-%d %H:%M:%S", "%Y-%m-%dT%H:%M:%S", "%Y-%m-%d %H:%M", "%Y-%m-%d %H:%M:%S%.f"] {
            if let Ok(dt) = NaiveDateTime::parse_from_str(s, fmt) {
                return Some(Timestamp(dt.and_utc().timestamp()));
            }
        }
        NaiveDate::parse_from_str(s, "%Y-%m-%d")
            .ok()
            .and_then(|d| d.and_hms_opt(0, 0, 0))
            .map(|dt| Timestamp(dt.and_utc().timestamp()))
    }
}

impl fmt::Display for Timestamp {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match DateTime::<Utc>::from_timestamp(self.0, 0) {
            Some(dt) => write!(f, "{}", dt.format("%Y-%m-%d %H:%M:%S")),
            None => write!(f, "@{}", self.0),
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct SectionAnnotations {
    pub tokens: Vec<String>,
    pub lemmas: Vec<String>,
    pub entities: Vec<String>,
}

impl SectionAnnotations {
    pub fn terms(&self, unit: Unit) -> &[String] {
        match unit {
            Unit::Token => &self.tokens,
            Unit::Lemma => &self.lemmas,
            Unit::Entity => &self.entities,
        }
    }

    pub fn concat(a: &SectionAnnotations, b: &SectionAnnotations) -> SectionAnnotations {
        let join = |x: &[String], y: &[String]| x.iter().chain(y).cloned().collect::<Vec<_>>();
        SectionAnnotations {
            tokens: join(&a.tokens, &b.tokens),
            lemmas: join(&a.lemmas, &b.lemmas),
            entities: join(&a.entities, &b.entities),
        }
    }

    /// Whitespace tokenization with surrounding punctuation stripped and
    /// lowercasing; lemmas mirror tokens and no entities are produced.
    pub fn from_raw_text(text: &str) -> SectionAnnotations {
        let tokens: Vec<String> = text
            .split_whitespace()
            .map(|w| w.trim_matches(|c: char| !c.is_alphanumeric()).to_lowercase())
            .filter(|w| !w.is_empty())
            .collect();
        SectionAnnotations {
            lemmas: tokens.clone(),
            tokens,
            entities: Vec::new(),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Document {
    pub id: String,
    pub title: String,
    pub body: String,
    pub timestamp: Timestamp,
    sections: [SectionAnnotations; 3],
    pub gold_cluster: Option<String>,
}

impl Document {
    /// Builds a document; a missing title+body section is derived by
    /// concatenating the title and body annotations.
    pub fn new(
        id: impl Into<String>,
        title: impl Into<String>,
        body: impl Into<String>,
        timestamp: Timestamp,
        title_ann: SectionAnnotations,
        body_ann: SectionAnnotations,
        title_body_ann: Option<SectionAnnotations>,
    ) -> Result<Document> {
        let id = id.into();
        if id.is_empty() {
            return Err(Error::InvalidDocument("empty document id".into()));
        }
        let tb = title_body_ann.unwrap_or_else(|| SectionAnnotations::concat(&title_ann, &body_ann));
        Ok(Document {
            id,
            title: title.into(),
            body: body.into(),
            timestamp,
            sections: [title_ann, body_ann, tb],
            gold_cluster: None,
        })
    }

    /// Document whose annotations are synthesized from its raw text.
    pub fn from_text(
        id: impl Into<String>,
        title: impl Into<String>,
        body: impl Into<String>,
        timestamp: Timestamp,
    ) -> Result<Document> {
        let title = title.into();
        let body = body.into();
        let t = SectionAnnotations::from_raw_text(&title);
        let b = SectionAnnotations::from_raw_text(&body);
        Document::new(id, title, body, timestamp, t, b, None)
    }

    pub fn with_gold(mut self, label: impl Into<String>) -> Self {
        self.gold_cluster = Some(label.into());
        self
    }

    pub fn section(&self, kind: SectionKind) -> &SectionAnnotations {
        &self.sections[kind.index()]
    }
}

/// Stream order: timestamp, then id.
pub fn sort_stream(docs: &mut [Document]) {
    docs.sort_by(|a, b| a.timestamp.cmp(&b.timestamp).then_with(|| a.id.cmp(&b.id)));
}

/// Sparse vector with strictly increasing indices and no stored zeros.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct SparseVector {
    indices: Vec<u32>,
    values: Vec<f64>,
}

impl SparseVector {
    pub fn new(indices: Vec<u32>, values: Vec<f64>) -> Result<SparseVector> {
        if indices.len() != values.len() {
            return Err(Error::DimensionMismatch {
                expected: indices.len(),
                found: values.len(),
            });
        }
        if indices.windows(2).any(|w| w[0] >= w[1]) {
            return Err(Error::InvalidParameter("sparse indices must be strictly increasing".into()));
        }
        if values.iter().any(|v| !v.is_finite() || *v == 0.0) {
            return Err(Error::InvalidParameter("sparse values must be finite and nonzero".into()));
        }
        Ok(SparseVector { indices, values })
    }

    /// Sums duplicate indices and drops zeros. Non-finite values are rejected.
    pub fn from_pairs(mut pairs: Vec<(u32, f64)>) -> Result<SparseVector> {
        if pairs.iter().any(|(_, v)| !v.is_finite()) {
            return Err(Error::InvalidParameter("sparse values must be finite".into()));
        }
        pairs.sort_by_key(|p| p.0);
        let mut indices = Vec::with_capacity(pairs.len());
        let mut values: Vec<f64> = Vec::with_capacity(pairs.len());
        for (i, v) in pairs {
            if indices.last() == Some(&i) {
                *values.last_mut().unwrap() += v;
            } else {
                indices.push(i);
                values.push(v);
            }
        }
        let (indices, values) = indices.into_iter().zip(values).filter(|(_, v)| *v != 0.0).unzip();
        Ok(SparseVector { indices, values })
    }

    pub fn indices(&self) -> &[u32] {
        &self.indices
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn nnz(&self) -> usize {
        self.indices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.indices.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = (u32, f64)> + '_ {
        self.indices.iter().copied().zip(self.values.iter().copied())
    }

    pub fn get(&self, index: u32) -> f64 {
        match self.indices.binary_search(&index) {
            Ok(p) => self.values[p],
            Err(_) => 0.0,
        }
    }

    pub fn norm(&self) -> f64 {
        self.values.iter().map(|v| v * v).sum::<f64>().sqrt()
    }

    pub fn dot(&self, other: &SparseVector) -> f64 {
        // Probe the larger vector from the smaller one; cluster means can be
        // far denser than a single document.
        let (small, large) = if self.nnz() <= other.nnz() { (self, other) } else { (other, self) };
        if small.nnz() * 8 < large.nnz() {
            small.iter().map(|(i, v)| v * large.get(i)).sum()
        } else {
            let (mut a, mut b, mut acc) = (0, 0, 0.0);
            while a < small.indices.len() && b < large.indices.len() {
                match small.indices[a].cmp(&large.indices[b]) {
                    std::cmp::Ordering::Less => a += 1,
                    std::cmp::Ordering::Greater => b += 1,
                    std::cmp::Ordering::Equal => {
                        acc += small.values[a] * large.values[b];
                        a += 1;
                        b += 1;
                    }
                }
            }
            acc
        }
    }

    /// `(count * mean + other) / (count + 1)` over the union support.
    pub fn mean_update(&self, count: usize, other: &SparseVector) -> SparseVector {
        let n = count as f64;
        let denom = n + 1.0;
        let mut indices = Vec::with_capacity(self.nnz() + other.nnz());
        let mut values = Vec::with_capacity(self.nnz() + other.nnz());
        let (mut a, mut b) = (0, 0);
        loop {
            let next = match (self.indices.get(a), other.indices.get(b)) {
                (None, None) => break,
                (Some(&i), None) => {
                    a += 1;
                    (i, n * self.values[a - 1])
                }
                (None, Some(&j)) => {
                    b += 1;
                    (j, other.values[b - 1])
                }
                (Some(&i), Some(&j)) => {
                    if i < j {
                        a += 1;
                        (i, n * self.values[a - 1])
                    } else if j < i {
                        b += 1;
                        (j, other.values[b - 1])
                    } else {
                        a += 1;
                        b += 1;
                        (i, n * self.values[a - 1] + other.values[b - 1])
                    }
                }
            };
            let v = next.1 / denom;
            if v != 0.0 {
                indices.push(next.0);
                values.push(v);
            }
        }
        SparseVector { indices, values }
    }

    pub fn scaled(&self, k: f64) -> SparseVector {
        let (indices, values) = self.iter().map(|(i, v)| (i, v * k)).filter(|(_, v)| *v != 0.0).unzip();
        SparseVector { indices, values }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct DenseVector(Vec<f64>);

impl DenseVector {
    pub fn new(values: Vec<f64>) -> Result<DenseVector> {
        if values.iter().any(|v| !v.is_finite()) {
            return Err(Error::InvalidParameter("dense values must be finite".into()));
        }
        Ok(DenseVector(values))
    }

    pub fn zeros(dim: usize) -> DenseVector {
        DenseVector(vec![0.0; dim])
    }

    pub fn dim(&self) -> usize {
        self.0.len()
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.0
    }

    pub fn norm(&self) -> f64 {
        self.0.iter().map(|v| v * v).sum::<f64>().sqrt()
    }

    pub fn dot(&self, other: &DenseVector) -> Result<f64> {
        if self.dim() != other.dim() {
            return Err(Error::DimensionMismatch {
                expected: self.dim(),
                found: other.dim(),
            });
        }
        Ok(self.0.iter().zip(&other.0).map(|(a, b)| a * b).sum())
    }

    pub fn mean_update(&self, count: usize, other: &DenseVector) -> Result<DenseVector> {
        if self.dim() != other.dim() {
            return Err(Error::DimensionMismatch {
                expected: self.dim(),
                found: other.dim(),
            });
        }
        let n = count as f64;
        Ok(DenseVector(
            self.0.iter().zip(&other.0).map(|(m, v)| (n * m + v) / (n + 1.0)).collect(),
        ))
    }
}

/// All eleven representations of one document.
#[derive(Debug, Clone, PartialEq)]
pub struct DocRepSet {
    pub sparse: [SparseVector; NUM_SPARSE],
    pub dense: DenseVector,
    pub timestamp: Timestamp,
}

impl DocRepSet {
    pub fn sparse_bag(&self, unit: Unit, section: SectionKind) -> &SparseVector {
        &self.sparse[sparse_slot(unit, section)]
    }
}

/// Aggregated state of one cluster. Values are built by
/// [`crate::repr::cluster_from_doc`] and [`crate::repr::fold_document`].
#[derive(Debug, Clone, PartialEq)]
pub struct ClusterRep {
    pub(crate) id: u64,
    pub(crate) member_ids: Vec<String>,
    pub(crate) sparse_mean: [SparseVector; NUM_SPARSE],
    pub(crate) sparse_norms: [f64; NUM_SPARSE],
    pub(crate) dense_mean: DenseVector,
    pub(crate) dense_norm: f64,
    pub(crate) ts_min: Timestamp,
    pub(crate) ts_max: Timestamp,
    // exact sum of member timestamps; the mean is derived from it
    pub(crate) ts_sum: i128,
}

impl ClusterRep {
    pub fn id(&self) -> u64 {
        self.id
    }

    pub fn size(&self) -> usize {
        self.member_ids.len()
    }

    pub fn member_ids(&self) -> &[String] {
        &self.member_ids
    }

    pub fn contains(&self, doc_id: &str) -> bool {
        self.member_ids.iter().any(|m| m == doc_id)
    }

    pub fn sparse_mean(&self) -> &[SparseVector; NUM_SPARSE] {
        &self.sparse_mean
    }

    pub fn sparse_norm(&self, slot: usize) -> f64 {
        self.sparse_norms[slot]
    }

    pub fn dense_mean(&self) -> &DenseVector {
        &self.dense_mean
    }

    pub fn dense_norm(&self) -> f64 {
        self.dense_norm
    }

    pub fn ts_min(&self) -> Timestamp {
        self.ts_min
    }

    pub fn ts_max(&self) -> Timestamp {
        self.ts_max
    }

    /// Mean member timestamp rounded to the nearest second.
    pub fn ts_mean(&self) -> Timestamp {
        let n = self.member_ids.len() as i128;
        // round half away from zero
        let q = if self.ts_sum >= 0 {
            (2 * self.ts_sum + n) / (2 * n)
        } else {
            -((-2 * self.ts_sum + n) / (2 * n))
        };
        Timestamp(q as i64)
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SimilarityVector(pub [f64; NUM_FEATURES]);

impl SimilarityVector {
    pub fn values(&self) -> &[f64; NUM_FEATURES] {
        &self.0
    }

    pub fn get(&self, i: usize) -> f64 {
        self.0[i]
    }

    /// Checks the range invariants: cosines in [-1, 1], temporal in [0, 1].
    /// Temporal similarities may underflow to exactly zero for very large
    /// gaps, which is accepted here.
    pub fn is_valid(&self) -> bool {
        let eps = 1e-12;
        self.0.iter().all(|v| v.is_finite())
            && self.0[..=DENSE_FEATURE].iter().all(|v| (-1.0 - eps..=1.0 + eps).contains(v))
            && self.0[TS_MIN_FEATURE..].iter().all(|v| (0.0..=1.0).contains(v))
    }

    pub fn sub(&self, other: &SimilarityVector) -> [f64; NUM_FEATURES] {
        let mut out = [0.0; NUM_FEATURES];
        for (o, (a, b)) in out.iter_mut().zip(self.0.iter().zip(other.0.iter())) {
            *o = a - b;
        }
        out
    }
}

/// Hyper-parameters of the temporal Gaussian, in days.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SimilarityParams {
    mu: f64,
    sigma: f64,
}

impl SimilarityParams {
    pub fn new(mu: f64, sigma: f64) -> Result<SimilarityParams> {
        if !mu.is_finite() || !sigma.is_finite() || sigma <= 0.0 {
            return Err(Error::InvalidParameter(format!(
                "temporal similarity needs finite mu and sigma > 0 (mu = {mu}, sigma = {sigma})"
            )));
        }
        Ok(SimilarityParams { mu, sigma })
    }

    pub fn mu(&self) -> f64 {
        self.mu
    }

    pub fn sigma(&self) -> f64 {
        self.sigma
    }
}

impl Default for SimilarityParams {
    fn default() -> Self {
        SimilarityParams { mu: 0.0, sigma: 3.0 }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WeightVector([f64; NUM_FEATURES]);

impl WeightVector {
    pub fn new(w: [f64; NUM_FEATURES]) -> Result<WeightVector> {
        if w.iter().any(|v| !v.is_finite()) {
            return Err(Error::InvalidParameter("weights must be finite".into()));
        }
        if w.iter().all(|v| *v == 0.0) {
            return Err(Error::InvalidParameter("weight vector is all zeros".into()));
        }
        Ok(WeightVector(w))
    }

    pub fn values(&self) -> &[f64; NUM_FEATURES] {
        &self.0
    }

    pub fn scaled(&self, k: f64) -> Result<WeightVector> {
        let mut w = self.0;
        w.iter_mut().for_each(|v| *v *= k);
        WeightVector::new(w)
    }
}

pub const BUNDLE_FORMAT_VERSION: u32 = 1;

/// Everything the online engine needs besides the sparse encoders and the
/// embedding store.
#[derive(Debug, Clone, PartialEq)]
pub struct ModelBundle {
    pub weights: WeightVector,
    pub creation_net: CreationNet,
    pub sim_params: SimilarityParams,
    pub embedding_dim: usize,
    pub format_version: u32,
}
