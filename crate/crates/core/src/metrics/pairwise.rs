use super::{align, check_labels, Contingency, Partition, Prf};
use crate::error::{Error, Result};

/// Pair-confusion counts over all unordered document pairs. A pair is
/// positive when both documents share a cluster.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct PairCounts {
    pub tp: u64,
    pub fp: u64,
    pub fn_: u64,
    pub tn: u64,
}

fn pairs(k: usize) -> u64 {
    let k = k as u64;
    k * k.saturating_sub(1) / 2
}

impl PairCounts {
    pub fn from_contingency(t: &Contingency) -> PairCounts {
        let tp: u64 = t.cells.iter().map(|&(_, _, c)| pairs(c)).sum();
        let pred: u64 = t.pred_sizes.iter().map(|&s| pairs(s)).sum();
        let gold: u64 = t.gold_sizes.iter().map(|&s| pairs(s)).sum();
        let total = pairs(t.n);
        PairCounts {
            tp,
            fp: pred - tp,
            fn_: gold - tp,
            tn: total + tp - pred - gold,
        }
    }

    pub fn total(&self) -> u64 {
        self.tp + self.fp + self.fn_ + self.tn
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PairwiseScores {
    pub counts: PairCounts,
    pub rand_index: f64,
    pub adjusted_rand: f64,
    pub fowlkes_mallows: f64,
    /// Precision and recall are the means of the coreference and
    /// non-coreference values; `f1` is the mean of the two F1 scores, not
    /// the harmonic mean of the averaged precision and recall.
    pub blanc: Prf,
}

pub fn pairwise_metrics(pred: &Partition, gold: &Partition) -> Result<PairwiseScores> {
    let (p, g) = align(pred, gold)?;
    pairwise_metrics_labels(&p, &g)
}

pub fn pairwise_metrics_labels(pred: &[usize], gold: &[usize]) -> Result<PairwiseScores> {
    check_labels(pred, gold)?;
    if pred.len() < 2 {
        return Err(Error::InvalidParameter(format!(
            "pairwise metrics need at least 2 documents, got {}",
            pred.len()
        )));
    }
    let c = PairCounts::from_contingency(&Contingency::new(pred, gold));
    Ok(PairwiseScores {
        counts: c,
        rand_index: (c.tp + c.tn) as f64 / c.total() as f64,
        adjusted_rand: adjusted_rand(&c),
        fowlkes_mallows: fowlkes_mallows(&c),
        blanc: blanc(&c),
    })
}

fn adjusted_rand(c: &PairCounts) -> f64 {
    let total = c.total() as f64;
    let pred = (c.tp + c.fp) as f64;
    let gold = (c.tp + c.fn_) as f64;
    let expected = pred * gold / total;
    let max = (pred + gold) / 2.0;
    if max == expected {
        return 1.0;
    }
    (c.tp as f64 - expected) / (max - expected)
}

fn fowlkes_mallows(c: &PairCounts) -> f64 {
    let pred = c.tp + c.fp;
    let gold = c.tp + c.fn_;
    if pred == 0 && gold == 0 {
        return 1.0;
    }
    if pred == 0 || gold == 0 {
        return 0.0;
    }
    c.tp as f64 / (pred as f64 * gold as f64).sqrt()
}

fn ratio(num: u64, den: u64) -> f64 {
    if den == 0 {
        0.0
    } else {
        num as f64 / den as f64
    }
}

fn blanc(c: &PairCounts) -> Prf {
    let coref = Prf::new(ratio(c.tp, c.tp + c.fp), ratio(c.tp, c.tp + c.fn_));
    let non = Prf::new(ratio(c.tn, c.tn + c.fn_), ratio(c.tn, c.tn + c.fp));
    let no_coref = c.tp + c.fp == 0 && c.tp + c.fn_ == 0;
    let no_non = c.tn + c.fn_ == 0 && c.tn + c.fp == 0;
    if no_coref {
        return non;
    }
    if no_non {
        return coref;
    }
    Prf {
        precision: (coref.precision + non.precision) / 2.0,
        recall: (coref.recall + non.recall) / 2.0,
        f1: (coref.f1 + non.f1) / 2.0,
    }
}
