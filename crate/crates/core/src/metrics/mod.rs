//! Clustering evaluation: B-Cubed, CEAF, MUC, BLANC, pair-counting and
//! information-theoretic scores, and cluster-count fragmentation.
//!
//! Every metric compares a predicted [`Partition`] against a gold one over
//! the same document ids. Internally both are reduced to a contingency
//! table, so relabeling clusters never changes a score.

mod bootstrap;
mod coref;
mod hungarian;
mod info;
mod pairwise;
mod report;

use std::collections::{BTreeMap, HashMap};

pub use bootstrap::{paired_bootstrap, BootstrapResult};
pub use coref::{bcubed, bcubed_labels, ceaf, ceaf_labels, muc, muc_labels, CeafMode};
pub use hungarian::{assignment_value, hungarian};
pub use info::{info_metrics, info_metrics_labels, InfoScores};
pub use pairwise::{pairwise_metrics, pairwise_metrics_labels, PairCounts, PairwiseScores};
pub use report::{evaluate, fragmentation_report, FragmentationReport, MetricKind, MetricsReport, ReportEntry, ReportValue};

use crate::error::{Error, Result};

/// Precision, recall and F1.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Prf {
    pub precision: f64,
    pub recall: f64,
    pub f1: f64,
}

impl Prf {
    /// F1 is the harmonic mean, 0 when both inputs are 0.
    pub fn new(precision: f64, recall: f64) -> Prf {
        let f1 = if precision + recall > 0.0 {
            2.0 * precision * recall / (precision + recall)
        } else {
            0.0
        };
        Prf { precision, recall, f1 }
    }

    pub fn perfect() -> Prf {
        Prf::new(1.0, 1.0)
    }
}

/// Document id to cluster label.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Partition {
    assignment: BTreeMap<String, String>,
}

impl Partition {
    pub fn new() -> Self {
        Self::default()
    }

    /// Fails on a repeated document id.
    pub fn from_pairs<I, D, L>(pairs: I) -> Result<Partition>
    where
        I: IntoIterator<Item = (D, L)>,
        D: Into<String>,
        L: Into<String>,
    {
        let mut p = Partition::new();
        for (d, l) in pairs {
            p.insert(d, l)?;
        }
        Ok(p)
    }

    pub fn insert(&mut self, doc: impl Into<String>, label: impl Into<String>) -> Result<()> {
        let doc = doc.into();
        if self.assignment.contains_key(&doc) {
            return Err(Error::DuplicateDocument(doc));
        }
        self.assignment.insert(doc, label.into());
        Ok(())
    }

    pub fn len(&self) -> usize {
        self.assignment.len()
    }

    pub fn is_empty(&self) -> bool {
        self.assignment.is_empty()
    }

    pub fn label(&self, doc: &str) -> Option<&str> {
        self.assignment.get(doc).map(String::as_str)
    }

    pub fn iter(&self) -> impl Iterator<Item = (&str, &str)> {
        self.assignment.iter().map(|(d, l)| (d.as_str(), l.as_str()))
    }

    pub fn cluster_count(&self) -> usize {
        self.assignment.values().collect::<std::collections::BTreeSet<_>>().len()
    }
}

fn compact<'a>(labels: impl Iterator<Item = &'a str>) -> Vec<usize> {
    let mut ids: HashMap<&str, usize> = HashMap::new();
    labels
        .map(|l| {
            let next = ids.len();
            *ids.entry(l).or_insert(next)
        })
        .collect()
}

/// Dense label indices for `pred` and `gold` over their shared id set.
pub fn align(pred: &Partition, gold: &Partition) -> Result<(Vec<usize>, Vec<usize>)> {
    if pred.len() != gold.len() {
        return Err(Error::IdSetMismatch);
    }
    let mut gold_labels = Vec::with_capacity(gold.len());
    for (doc, _) in pred.iter() {
        gold_labels.push(gold.label(doc).ok_or(Error::IdSetMismatch)?);
    }
    let p = compact(pred.iter().map(|(_, l)| l));
    let g = compact(gold_labels.into_iter());
    Ok((p, g))
}

/// Cluster overlap counts between a predicted (rows) and gold (columns)
/// labeling of the same items.
#[derive(Debug, Clone, PartialEq)]
pub struct Contingency {
    pub n: usize,
    pub pred_sizes: Vec<usize>,
    pub gold_sizes: Vec<usize>,
    /// Non-zero cells as (pred, gold, count).
    pub cells: Vec<(usize, usize, usize)>,
}

impl Contingency {
    /// Labels may be any values; rows and columns follow first appearance.
    pub fn new(pred: &[usize], gold: &[usize]) -> Contingency {
        assert_eq!(pred.len(), gold.len());
        let pred = &dense_labels(pred)[..];
        let gold = &dense_labels(gold)[..];
        let rows = pred.iter().max().map_or(0, |m| m + 1);
        let cols = gold.iter().max().map_or(0, |m| m + 1);
        let mut pred_sizes = vec![0; rows];
        let mut gold_sizes = vec![0; cols];
        let mut cells: BTreeMap<(usize, usize), usize> = BTreeMap::new();
        for (&p, &g) in pred.iter().zip(gold) {
            pred_sizes[p] += 1;
            gold_sizes[g] += 1;
            *cells.entry((p, g)).or_default() += 1;
        }
        Contingency {
            n: pred.len(),
            pred_sizes,
            gold_sizes,
            cells: cells.into_iter().map(|((p, g), c)| (p, g, c)).collect(),
        }
    }

    /// True when the two labelings are identical up to renaming.
    pub fn is_identity(&self) -> bool {
        self.pred_sizes.len() == self.gold_sizes.len() && self.cells.len() == self.pred_sizes.len()
    }
}

pub(crate) fn check_labels(pred: &[usize], gold: &[usize]) -> Result<()> {
    if pred.len() != gold.len() {
        return Err(Error::IdSetMismatch);
    }
    Ok(())
}

/// Relabels arbitrary label values to dense indices.
pub fn dense_labels<T: std::hash::Hash + Eq>(labels: &[T]) -> Vec<usize> {
    let mut ids: HashMap<&T, usize> = HashMap::new();
    labels
        .iter()
        .map(|l| {
            let next = ids.len();
            *ids.entry(l).or_insert(next)
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sparse_label_values_are_compacted() {
        let t = Contingency::new(&[5, 5, 9], &[0, 2, 2]);
        assert_eq!(t.pred_sizes, vec![2, 1]);
        assert_eq!(t.gold_sizes, vec![1, 2]);
        assert!(!t.is_identity());
        assert!(Contingency::new(&[4, 4, 7], &[1, 1, 0]).is_identity());
    }

    #[test]
    fn align_checks_id_sets() {
        let a = Partition::from_pairs([("a", "1"), ("b", "1")]).unwrap();
        let b = Partition::from_pairs([("a", "x"), ("c", "y")]).unwrap();
        assert!(matches!(align(&a, &b), Err(Error::IdSetMismatch)));
        let c = Partition::from_pairs([("a", "x")]).unwrap();
        assert!(matches!(align(&a, &c), Err(Error::IdSetMismatch)));
        assert!(Partition::from_pairs([("a", "x"), ("a", "y")]).is_err());
    }

    #[test]
    fn contingency_counts() {
        let t = Contingency::new(&[0, 0, 1, 1], &[0, 1, 1, 1]);
        assert_eq!(t.pred_sizes, vec![2, 2]);
        assert_eq!(t.gold_sizes, vec![1, 3]);
        assert_eq!(t.cells, vec![(0, 0, 1), (0, 1, 1), (1, 1, 2)]);
        assert!(!t.is_identity());
        assert!(Contingency::new(&[1, 1, 0], &[0, 0, 1]).is_identity());
    }
}
