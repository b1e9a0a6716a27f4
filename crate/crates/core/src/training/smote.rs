//! Minority oversampling by interpolation between nearest minority
//! neighbors (SMOTE).
//!
//! This is the plain variant: base points are drawn uniformly from the
//! minority class rather than concentrated near an SVM decision boundary.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::model::{SimilarityVector, NUM_FEATURES};
use crate::training::CreationSample;

pub const DEFAULT_NEIGHBORS: usize = 5;

fn sq_dist(a: &[f64; NUM_FEATURES], b: &[f64; NUM_FEATURES]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum()
}

/// Returns the input followed by synthetic minority samples so that both
/// classes end up the same size. Majority samples are never touched.
pub fn smote_oversample(samples: &[CreationSample], k: usize, seed: u64) -> Result<Vec<CreationSample>> {
    if k == 0 {
        return Err(Error::InvalidParameter("SMOTE needs k >= 1".into()));
    }
    let positives = samples.iter().filter(|s| s.create).count();
    let negatives = samples.len() - positives;
    if positives == negatives {
        return Ok(samples.to_vec());
    }
    let minority_label = positives < negatives;
    let minority: Vec<&[f64; NUM_FEATURES]> = samples
        .iter()
        .filter(|s| s.create == minority_label)
        .map(|s| s.x.values())
        .collect();
    if minority.len() < 2 {
        return Err(Error::TooFewMinority { found: minority.len() });
    }
    let needed = positives.max(negatives) - minority.len();
    let k = k.min(minority.len() - 1);

    // k nearest minority neighbors of each minority point, ties by index
    let neighbors: Vec<Vec<usize>> = (0..minority.len())
        .map(|i| {
            let mut order: Vec<(f64, usize)> = (0..minority.len())
                .filter(|&j| j != i)
                .map(|j| (sq_dist(minority[i], minority[j]), j))
                .collect();
            order.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)));
            order.into_iter().take(k).map(|(_, j)| j).collect()
        })
        .collect();

    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out = samples.to_vec();
    out.reserve(needed);
    for _ in 0..needed {
        let base = rng.random_range(0..minority.len());
        let nn = neighbors[base][rng.random_range(0..k)];
        let u: f64 = rng.random();
        let (a, b) = (minority[base], minority[nn]);
        let x: [f64; NUM_FEATURES] = std::array::from_fn(|d| a[d] + u * (b[d] - a[d]));
        out.push(CreationSample {
            x: SimilarityVector(x),
            create: minority_label,
        });
    }
    Ok(out)
}
