use std::str::FromStr;

use super::hungarian::{assignment_value, hungarian};
use super::{align, check_labels, Contingency, Partition, Prf};
use crate::error::{Error, Result};

/// Document-averaged precision and recall of cluster co-membership.
pub fn bcubed(pred: &Partition, gold: &Partition) -> Result<Prf> {
    let (p, g) = align(pred, gold)?;
    bcubed_labels(&p, &g)
}

pub fn bcubed_labels(pred: &[usize], gold: &[usize]) -> Result<Prf> {
    check_labels(pred, gold)?;
    if pred.is_empty() {
        return Ok(Prf::perfect());
    }
    let t = Contingency::new(pred, gold);
    let (mut p, mut r) = (0.0, 0.0);
    // each of the c documents in a cell has overlap c
    for &(i, j, c) in &t.cells {
        let c = c as f64;
        p += c * c / t.pred_sizes[i] as f64;
        r += c * c / t.gold_sizes[j] as f64;
    }
    let n = t.n as f64;
    Ok(Prf::new(p / n, r / n))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CeafMode {
    /// Entity-based: `phi = 2 |G ∩ O| / (|G| + |O|)`.
    Entity,
    /// Mention-based: `phi = |G ∩ O|`.
    Mention,
    /// Entity-based with Jaccard overlap `|G ∩ O| / |G ∪ O|`.
    EntityJaccard,
}

impl FromStr for CeafMode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "entity" | "e" => Ok(CeafMode::Entity),
            "mention" | "m" => Ok(CeafMode::Mention),
            "jaccard" => Ok(CeafMode::EntityJaccard),
            _ => Err(Error::InvalidParameter(format!("unknown CEAF mode `{s}`"))),
        }
    }
}

fn phi(mode: CeafMode, overlap: usize, gold: usize, pred: usize) -> f64 {
    let o = overlap as f64;
    match mode {
        CeafMode::Mention => o,
        CeafMode::Entity => 2.0 * o / (gold + pred) as f64,
        CeafMode::EntityJaccard => o / (gold + pred - overlap) as f64,
    }
}

/// CEAF under the optimal one-to-one alignment of gold and predicted
/// clusters. Unaligned clusters only enter the denominators.
pub fn ceaf(pred: &Partition, gold: &Partition, mode: CeafMode) -> Result<Prf> {
    let (p, g) = align(pred, gold)?;
    ceaf_labels(&p, &g, mode)
}

pub fn ceaf_labels(pred: &[usize], gold: &[usize], mode: CeafMode) -> Result<Prf> {
    check_labels(pred, gold)?;
    if pred.is_empty() {
        return Ok(Prf::perfect());
    }
    let t = Contingency::new(pred, gold);
    let mut sim = vec![vec![0.0; t.pred_sizes.len()]; t.gold_sizes.len()];
    for &(i, j, c) in &t.cells {
        sim[j][i] = phi(mode, c, t.gold_sizes[j], t.pred_sizes[i]);
    }
    let best = assignment_value(&sim, &hungarian(&sim));
    let self_sim = |sizes: &[usize]| -> f64 { sizes.iter().map(|&s| phi(mode, s, s, s)).sum() };
    Ok(Prf::new(best / self_sim(&t.pred_sizes), best / self_sim(&t.gold_sizes)))
}

/// Link-based MUC. With no links on either side the partitions agree
/// trivially and score 1; otherwise an empty denominator scores 0.
pub fn muc(pred: &Partition, gold: &Partition) -> Result<Prf> {
    let (p, g) = align(pred, gold)?;
    muc_labels(&p, &g)
}

pub fn muc_labels(pred: &[usize], gold: &[usize]) -> Result<Prf> {
    check_labels(pred, gold)?;
    let t = Contingency::new(pred, gold);
    // number of gold (resp. predicted) clusters each cluster is split across
    let mut pred_parts = vec![0usize; t.pred_sizes.len()];
    let mut gold_parts = vec![0usize; t.gold_sizes.len()];
    for &(i, j, _) in &t.cells {
        pred_parts[i] += 1;
        gold_parts[j] += 1;
    }
    let links = |sizes: &[usize]| -> usize { sizes.iter().map(|s| s - 1).sum() };
    let kept = |sizes: &[usize], parts: &[usize]| -> usize { sizes.iter().zip(parts).map(|(s, k)| s - k).sum() };
    let pred_links = links(&t.pred_sizes);
    let gold_links = links(&t.gold_sizes);
    if pred_links == 0 && gold_links == 0 {
        return Ok(Prf::perfect());
    }
    let ratio = |num: usize, den: usize| if den == 0 { 0.0 } else { num as f64 / den as f64 };
    Ok(Prf::new(
        ratio(kept(&t.pred_sizes, &pred_parts), pred_links),
        ratio(kept(&t.gold_sizes, &gold_parts), gold_links),
    ))
}
