use super::coref::muc_labels;
use super::{align, check_labels, Contingency, Partition, Prf};
use crate::error::Result;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct InfoScores {
    pub homogeneity: f64,
    pub completeness: f64,
    pub v_measure: f64,
    pub mutual_information: f64,
    pub adjusted_mutual_information: f64,
    pub muc: Prf,
}

pub fn info_metrics(pred: &Partition, gold: &Partition) -> Result<InfoScores> {
    let (p, g) = align(pred, gold)?;
    info_metrics_labels(&p, &g)
}

pub fn info_metrics_labels(pred: &[usize], gold: &[usize]) -> Result<InfoScores> {
    check_labels(pred, gold)?;
    let muc = muc_labels(pred, gold)?;
    let t = Contingency::new(pred, gold);
    if t.n == 0 {
        return Ok(InfoScores {
            homogeneity: 1.0,
            completeness: 1.0,
            v_measure: 1.0,
            mutual_information: 0.0,
            adjusted_mutual_information: 1.0,
            muc,
        });
    }
    let h_pred = entropy(&t.pred_sizes, t.n);
    let h_gold = entropy(&t.gold_sizes, t.n);
    let mi = mutual_information(&t);
    let homogeneity = if h_gold == 0.0 { 1.0 } else { mi / h_gold };
    let completeness = if h_pred == 0.0 { 1.0 } else { mi / h_pred };
    let v_measure = if homogeneity + completeness == 0.0 {
        0.0
    } else {
        2.0 * homogeneity * completeness / (homogeneity + completeness)
    };
    Ok(InfoScores {
        homogeneity,
        completeness,
        v_measure,
        mutual_information: mi,
        adjusted_mutual_information: ami(&t, mi, h_pred, h_gold),
        muc,
    })
}

/// Shannon entropy in nats of a labeling with the given cluster sizes.
pub(crate) fn entropy(sizes: &[usize], n: usize) -> f64 {
    let n = n as f64;
    -sizes
        .iter()
        .filter(|&&s| s > 0)
        .map(|&s| {
            let p = s as f64 / n;
            p * p.ln()
        })
        .sum::<f64>()
}

fn mutual_information(t: &Contingency) -> f64 {
    let n = t.n as f64;
    let mi: f64 = t
        .cells
        .iter()
        .map(|&(i, j, c)| {
            let c = c as f64;
            c / n * (n * c / (t.pred_sizes[i] as f64 * t.gold_sizes[j] as f64)).ln()
        })
        .sum();
    mi.max(0.0)
}

/// Expected mutual information of two random labelings with the given
/// marginals under the hypergeometric permutation model.
pub(crate) fn expected_mutual_information(pred_sizes: &[usize], gold_sizes: &[usize], n: usize) -> f64 {
    let mut lf = vec![0.0f64; n + 1];
    for k in 1..=n {
        lf[k] = lf[k - 1] + (k as f64).ln();
    }
    let nf = n as f64;
    let mut emi = 0.0;
    for &a in pred_sizes {
        for &b in gold_sizes {
            let lo = (a + b).saturating_sub(n).max(1);
            let hi = a.min(b);
            for nij in lo..=hi {
                let x = nij as f64;
                let term = x / nf * (nf * x / (a as f64 * b as f64)).ln();
                let log_p = lf[a] + lf[b] + lf[n - a] + lf[n - b]
                    - lf[n]
                    - lf[nij]
                    - lf[a - nij]
                    - lf[b - nij]
                    - lf[n + nij - a - b];
                emi += term * log_p.exp();
            }
        }
    }
    emi
}

fn ami(t: &Contingency, mi: f64, h_pred: f64, h_gold: f64) -> f64 {
    // both labelings trivial in the same way, or identical up to renaming
    let (kp, kg) = (t.pred_sizes.len(), t.gold_sizes.len());
    if (kp == kg && (kp == 1 || kp == t.n)) || t.is_identity() {
        return 1.0;
    }
    let emi = expected_mutual_information(&t.pred_sizes, &t.gold_sizes, t.n);
    let mut den = h_pred.max(h_gold) - emi;
    if den < 0.0 {
        den = den.min(-f64::EPSILON);
    } else {
        den = den.max(f64::EPSILON);
    }
    (mi - emi) / den
}
