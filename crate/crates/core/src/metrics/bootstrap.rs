use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::{check_labels, dense_labels};
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BootstrapResult {
    /// `metric(a) - metric(b)` on the full sample.
    pub observed_delta: f64,
    pub ci_low: f64,
    pub ci_high: f64,
    /// Two-sided: twice the smaller tail mass of resampled deltas around 0.
    pub p_value: f64,
    pub resamples: usize,
}

/// Paired bootstrap over documents comparing two systems on one gold
/// labeling. `metric` receives `(pred, gold)` dense label slices.
pub fn paired_bootstrap<F>(
    pred_a: &[usize],
    pred_b: &[usize],
    gold: &[usize],
    metric: F,
    resamples: usize,
    confidence: f64,
    seed: u64,
) -> Result<BootstrapResult>
where
    F: Fn(&[usize], &[usize]) -> Result<f64>,
{
    check_labels(pred_a, gold)?;
    check_labels(pred_b, gold)?;
    if gold.is_empty() || resamples == 0 || !(0.0..1.0).contains(&confidence) {
        return Err(Error::InvalidParameter(
            "bootstrap needs documents, resamples > 0 and confidence in [0,1)".into(),
        ));
    }
    let observed_delta = metric(pred_a, gold)? - metric(pred_b, gold)?;
    let n = gold.len();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut deltas = Vec::with_capacity(resamples);
    let (mut a, mut b, mut g) = (vec![0; n], vec![0; n], vec![0; n]);
    for _ in 0..resamples {
        for k in 0..n {
            let i = rng.random_range(0..n);
            a[k] = pred_a[i];
            b[k] = pred_b[i];
            g[k] = gold[i];
        }
        let (da, db, dg) = (dense_labels(&a), dense_labels(&b), dense_labels(&g));
        deltas.push(metric(&da, &dg)? - metric(&db, &dg)?);
    }
    deltas.sort_by(f64::total_cmp);
    let tail = (1.0 - confidence) / 2.0;
    let at = |q: f64| deltas[((q * resamples as f64).floor() as usize).min(resamples - 1)];
    let below = deltas.iter().filter(|&&d| d <= 0.0).count();
    let above = deltas.iter().filter(|&&d| d >= 0.0).count();
    Ok(BootstrapResult {
        observed_delta,
        ci_low: at(tail),
        ci_high: at(1.0 - tail),
        p_value: (2.0 * below.min(above) as f64 / resamples as f64).min(1.0),
        resamples,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::metrics::bcubed_labels;

    fn f1(p: &[usize], g: &[usize]) -> Result<f64> {
        Ok(bcubed_labels(p, g)?.f1)
    }

    #[test]
    fn better_system_wins() {
        let gold: Vec<usize> = (0..60).map(|i| i / 6).collect();
        let good = gold.clone();
        let bad: Vec<usize> = (0..60).collect();
        let r = paired_bootstrap(&good, &bad, &gold, f1, 200, 0.95, 7).unwrap();
        assert!(r.observed_delta > 0.5);
        assert!(r.ci_low > 0.0);
        assert!(r.p_value < 0.05);
        let again = paired_bootstrap(&good, &bad, &gold, f1, 200, 0.95, 7).unwrap();
        assert_eq!(r, again);
    }

    #[test]
    fn same_system_is_not_significant() {
        let gold: Vec<usize> = (0..30).map(|i| i % 4).collect();
        let pred: Vec<usize> = (0..30).map(|i| i % 3).collect();
        let r = paired_bootstrap(&pred, &pred, &gold, f1, 100, 0.9, 1).unwrap();
        assert_eq!(r.observed_delta, 0.0);
        assert_eq!(r.p_value, 1.0);
    }
}
