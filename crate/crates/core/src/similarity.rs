//! Document–cluster similarities, the weighted c-score and the argmax over
//! the cluster pool.

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::model::{
    ClusterRep, DenseVector, DocRepSet, SimilarityParams, SimilarityVector, SparseVector, Timestamp,
    WeightVector, DENSE_FEATURE, NUM_FEATURES, NUM_SPARSE, TS_MAX_FEATURE, TS_MEAN_FEATURE,
    TS_MIN_FEATURE,
};

// below this pool size a sequential scan is faster than fanning out
const PARALLEL_POOL_SIZE: usize = 128;

fn cosine_from_parts(dot: f64, na: f64, nb: f64) -> f64 {
    if na == 0.0 || nb == 0.0 {
        return 0.0;
    }
    (dot / (na * nb)).clamp(-1.0, 1.0)
}

/// Cosine similarity, 0 when either vector is zero.
pub fn cosine_sparse(a: &SparseVector, b: &SparseVector) -> f64 {
    cosine_from_parts(a.dot(b), a.norm(), b.norm())
}

pub fn cosine_dense(a: &DenseVector, b: &DenseVector) -> Result<f64> {
    let dot = a.dot(b)?;
    Ok(cosine_from_parts(dot, a.norm(), b.norm()))
}

/// Gaussian similarity `exp(-(delta - mu)^2 / (2 sigma^2))` where `delta` is
/// `doc_ts - cluster_ts` in fractional days.
pub fn temporal_sim(doc_ts: Timestamp, cluster_ts: Timestamp, p: &SimilarityParams) -> f64 {
    temporal_sim_days(doc_ts.days_since(cluster_ts), p)
}

pub fn temporal_sim_days(delta_days: f64, p: &SimilarityParams) -> f64 {
    let z = delta_days - p.mu();
    (-(z * z) / (2.0 * p.sigma() * p.sigma())).exp()
}

pub fn similarity_vector(doc: &DocRepSet, cluster: &ClusterRep, p: &SimilarityParams) -> Result<SimilarityVector> {
    let mut out = [0.0; NUM_FEATURES];
    for (slot, o) in out.iter_mut().enumerate().take(NUM_SPARSE) {
        let d = &doc.sparse[slot];
        *o = cosine_from_parts(d.dot(&cluster.sparse_mean()[slot]), d.norm(), cluster.sparse_norm(slot));
    }
    out[DENSE_FEATURE] = cosine_from_parts(
        doc.dense.dot(cluster.dense_mean())?,
        doc.dense.norm(),
        cluster.dense_norm(),
    );
    out[TS_MIN_FEATURE] = temporal_sim(doc.timestamp, cluster.ts_min(), p);
    out[TS_MAX_FEATURE] = temporal_sim(doc.timestamp, cluster.ts_max(), p);
    out[TS_MEAN_FEATURE] = temporal_sim(doc.timestamp, cluster.ts_mean(), p);
    Ok(SimilarityVector(out))
}

pub fn c_score(s: &SimilarityVector, w: &WeightVector) -> f64 {
    s.values().iter().zip(w.values()).map(|(a, b)| a * b).sum()
}

#[derive(Debug, Clone, PartialEq)]
pub struct BestCluster {
    pub cluster_id: u64,
    pub similarity: SimilarityVector,
    pub score: f64,
}

fn better(a: BestCluster, b: BestCluster) -> BestCluster {
    if b.score > a.score || (b.score == a.score && b.cluster_id < a.cluster_id) {
        b
    } else {
        a
    }
}

/// The pool member with maximal c-score; ties go to the lowest cluster id.
pub fn best_cluster(
    doc: &DocRepSet,
    pool: &[ClusterRep],
    w: &WeightVector,
    p: &SimilarityParams,
) -> Result<BestCluster> {
    if pool.is_empty() {
        return Err(Error::EmptyPool);
    }
    let score = |c: &ClusterRep| -> Result<BestCluster> {
        let similarity = similarity_vector(doc, c, p)?;
        Ok(BestCluster {
            cluster_id: c.id(),
            score: c_score(&similarity, w),
            similarity,
        })
    };
    if pool.len() < PARALLEL_POOL_SIZE {
        let mut best: Option<BestCluster> = None;
        for c in pool {
            let cand = score(c)?;
            best = Some(match best {
                None => cand,
                Some(b) => better(b, cand),
            });
        }
        Ok(best.expect("pool is non-empty"))
    } else {
        // `better` is associative and commutative, so the reduction order
        // does not affect the result.
        pool.par_iter()
            .map(score)
            .try_reduce_with(|a, b| Ok(better(a, b)))
            .expect("pool is non-empty")
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::repr::{cluster_from_doc, fold_document};

    fn sv(pairs: &[(u32, f64)]) -> SparseVector {
        SparseVector::from_pairs(pairs.to_vec()).unwrap()
    }

    #[test]
    fn sparse_cosine_examples() {
        let a = sv(&[(0, 1.0), (1, 1.0)]);
        let b = sv(&[(1, 1.0), (2, 1.0)]);
        assert!((cosine_sparse(&a, &b) - 0.5).abs() < 1e-15);
        assert!((cosine_sparse(&a, &a) - 1.0).abs() < 1e-15);
        assert_eq!(cosine_sparse(&a, &sv(&[(5, 3.0)])), 0.0);
        assert_eq!(cosine_sparse(&a, &SparseVector::default()), 0.0);
    }

    #[test]
    fn dense_cosine_examples() {
        let d = |v: &[f64]| DenseVector::new(v.to_vec()).unwrap();
        assert_eq!(cosine_dense(&d(&[1.0, 0.0]), &d(&[0.0, 1.0])).unwrap(), 0.0);
        assert_eq!(cosine_dense(&d(&[3.0, 4.0]), &d(&[3.0, 4.0])).unwrap(), 1.0);
        let c = cosine_dense(&d(&[1.0, 1.0]), &d(&[1.0, 0.0])).unwrap();
        assert!((c - std::f64::consts::FRAC_1_SQRT_2).abs() < 1e-15);
        assert!((c - 0.7071).abs() < 1e-4);
        assert_eq!(cosine_dense(&d(&[0.0, 0.0]), &d(&[1.0, 0.0])).unwrap(), 0.0);
        assert!(matches!(
            cosine_dense(&d(&[1.0]), &d(&[1.0, 0.0])),
            Err(Error::DimensionMismatch { .. })
        ));
    }

    #[test]
    fn temporal_examples() {
        let day = 86_400;
        let p0 = SimilarityParams::new(0.0, 1.0).unwrap();
        assert_eq!(temporal_sim(Timestamp(5 * day), Timestamp(5 * day), &p0), 1.0);
        let e = (-0.5f64).exp();
        assert!((temporal_sim(Timestamp(day), Timestamp(0), &p0) - e).abs() < 1e-15);
        let p3 = SimilarityParams::new(0.0, 3.0).unwrap();
        assert!((temporal_sim(Timestamp(0), Timestamp(3 * day), &p3) - e).abs() < 1e-15);
        assert!((e - 0.6065).abs() < 1e-4);
        let shifted = SimilarityParams::new(2.0, 1.0).unwrap();
        assert_eq!(temporal_sim(Timestamp(2 * day), Timestamp(0), &shifted), 1.0);
    }

    fn rep(ts: i64, dense: &[f64], bags: &[&[(u32, f64)]]) -> DocRepSet {
        DocRepSet {
            sparse: std::array::from_fn(|i| bags.get(i).map(|b| sv(b)).unwrap_or_default()),
            dense: DenseVector::new(dense.to_vec()).unwrap(),
            timestamp: Timestamp(ts),
        }
    }

    #[test]
    fn self_similarity() {
        let r = rep(1000, &[0.3, 0.4], &[&[(0, 1.0)], &[(1, 2.0), (4, 0.5)]]);
        let c = cluster_from_doc(&r, 0, "d");
        let p = SimilarityParams::new(0.0, 2.0).unwrap();
        let s = similarity_vector(&r, &c, &p).unwrap();
        assert!(s.is_valid());
        assert_eq!(s.values().len(), 13);
        assert_eq!(s.get(0), 1.0);
        assert_eq!(s.get(1), 1.0);
        assert!(s.values()[2..NUM_SPARSE].iter().all(|v| *v == 0.0));
        assert_eq!(s.get(DENSE_FEATURE), 1.0);
        assert_eq!(&s.values()[TS_MIN_FEATURE..], &[1.0, 1.0, 1.0]);
    }

    #[test]
    fn composed_similarity_matches_per_feature_oracles() {
        let day = 86_400;
        let a = rep(0, &[1.0, 0.0], &[&[(0, 1.0), (1, 1.0)]]);
        let b = rep(2 * day, &[1.0, 0.0], &[&[(1, 1.0), (2, 1.0)]]);
        let c = fold_document(&cluster_from_doc(&a, 0, "a"), &b, "b").unwrap();
        let doc = rep(day, &[1.0, 1.0], &[&[(1, 1.0), (2, 1.0)]]);
        let p = SimilarityParams::new(0.0, 1.0).unwrap();
        let s = similarity_vector(&doc, &c, &p).unwrap();
        // cluster mean bag {0: .5, 1: 1, 2: .5}; dot with {1,2} = 1.5
        let expected = 1.5 / (2f64.sqrt() * 1.5f64.sqrt());
        assert!((s.get(0) - expected).abs() < 1e-15);
        assert!((s.get(DENSE_FEATURE) - std::f64::consts::FRAC_1_SQRT_2).abs() < 1e-15);
        let e = (-0.5f64).exp();
        assert!((s.get(TS_MIN_FEATURE) - e).abs() < 1e-15);
        assert!((s.get(TS_MAX_FEATURE) - e).abs() < 1e-15);
        assert_eq!(s.get(TS_MEAN_FEATURE), 1.0);
    }

    #[test]
    fn c_score_examples() {
        let mut vals = [0.0; NUM_FEATURES];
        for (i, v) in vals.iter_mut().enumerate() {
            *v = i as f64 / 20.0;
        }
        vals[DENSE_FEATURE] = 0.7;
        let s = SimilarityVector(vals);
        let mut one_hot = [0.0; NUM_FEATURES];
        one_hot[DENSE_FEATURE] = 1.0;
        assert_eq!(c_score(&s, &WeightVector::new(one_hot).unwrap()), 0.7);
        let ones = WeightVector::new([1.0; NUM_FEATURES]).unwrap();
        let hand: f64 = (0..NUM_FEATURES).filter(|&i| i != DENSE_FEATURE).map(|i| i as f64 / 20.0).sum::<f64>() + 0.7;
        assert!((c_score(&s, &ones) - hand).abs() < 1e-12);
    }

    #[test]
    fn best_cluster_picks_dominating_cluster() {
        let day = 86_400;
        let doc = rep(0, &[1.0, 0.0], &[&[(0, 1.0)]]);
        let other = rep(5 * day, &[0.5, 0.5], &[&[(0, 1.0), (3, 1.0)]]);
        let pool = vec![cluster_from_doc(&other, 0, "o"), cluster_from_doc(&doc, 1, "d")];
        let w = WeightVector::new([1.0; NUM_FEATURES]).unwrap();
        let p = SimilarityParams::new(0.0, 3.0).unwrap();
        assert_eq!(best_cluster(&doc, &pool, &w, &p).unwrap().cluster_id, 1);
        assert_eq!(best_cluster(&doc, &pool[..1], &w, &p).unwrap().cluster_id, 0);
        assert!(matches!(best_cluster(&doc, &[], &w, &p), Err(Error::EmptyPool)));
    }

    #[test]
    fn ties_break_to_lowest_id() {
        let doc = rep(0, &[1.0, 0.0], &[&[(0, 1.0)]]);
        let pool: Vec<_> = [4u64, 2, 9].iter().map(|&id| cluster_from_doc(&doc, id, "x")).collect();
        let w = WeightVector::new([1.0; NUM_FEATURES]).unwrap();
        let p = SimilarityParams::default();
        assert_eq!(best_cluster(&doc, &pool, &w, &p).unwrap().cluster_id, 2);
    }
}
