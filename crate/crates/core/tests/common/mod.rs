//! Independent oracles and generators shared by the integration tests.
//!
//! Every oracle here works from raw label arrays, member sets or pair
//! enumeration, never from the library's contingency tables.

#![allow(dead_code)]

use std::collections::{BTreeSet, HashMap};

use nalgebra::{DMatrix, DVector};
use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;
use statrs::distribution::{Discrete, Hypergeometric};
use streamclust::model::{DenseVector, DocRepSet, SimilarityVector, SparseVector, Timestamp, NUM_FEATURES, NUM_SPARSE};
use streamclust::training::CreationSample;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// `n` labels drawn from `0..k`.
pub fn random_labels(rng: &mut impl Rng, n: usize, k: usize) -> Vec<usize> {
    (0..n).map(|_| rng.random_range(0..k)).collect()
}

/// A random (pred, gold) pair with `2..=max_docs` documents and at most
/// `max_clusters` clusters per side.
pub fn random_pair(rng: &mut impl Rng, max_docs: usize, max_clusters: usize) -> (Vec<usize>, Vec<usize>) {
    let n = rng.random_range(2..=max_docs);
    let kp = rng.random_range(1..=max_clusters);
    let kg = rng.random_range(1..=max_clusters);
    (random_labels(rng, n, kp), random_labels(rng, n, kg))
}

pub fn f1(p: f64, r: f64) -> f64 {
    if p + r == 0.0 {
        0.0
    } else {
        2.0 * p * r / (p + r)
    }
}

pub fn clusters(labels: &[usize]) -> Vec<BTreeSet<usize>> {
    let mut by: HashMap<usize, BTreeSet<usize>> = HashMap::new();
    for (doc, &l) in labels.iter().enumerate() {
        by.entry(l).or_default().insert(doc);
    }
    let mut out: Vec<_> = by.into_values().collect();
    out.sort();
    out
}

/// Per-document B-Cubed by scanning every other document.
pub fn bcubed(pred: &[usize], gold: &[usize]) -> (f64, f64, f64) {
    let n = pred.len();
    let (mut p, mut r) = (0.0, 0.0);
    for i in 0..n {
        let both = (0..n).filter(|&j| pred[j] == pred[i] && gold[j] == gold[i]).count() as f64;
        p += both / (0..n).filter(|&j| pred[j] == pred[i]).count() as f64;
        r += both / (0..n).filter(|&j| gold[j] == gold[i]).count() as f64;
    }
    let (p, r) = (p / n as f64, r / n as f64);
    (p, r, f1(p, r))
}

#[derive(Clone, Copy)]
pub enum Phi {
    Entity,
    Mention,
    Jaccard,
}

fn phi(kind: Phi, a: &BTreeSet<usize>, b: &BTreeSet<usize>) -> f64 {
    let inter = a.intersection(b).count() as f64;
    match kind {
        Phi::Entity => 2.0 * inter / (a.len() + b.len()) as f64,
        Phi::Mention => inter,
        Phi::Jaccard => inter / a.union(b).count() as f64,
    }
}

/// Calls `visit` with every injective map from `0..small` into `0..large`.
pub fn injections(small: usize, large: usize, visit: &mut impl FnMut(&[usize])) {
    fn go(pos: usize, small: usize, used: &mut Vec<bool>, cur: &mut Vec<usize>, visit: &mut impl FnMut(&[usize])) {
        if pos == small {
            visit(cur);
            return;
        }
        for j in 0..used.len() {
            if !used[j] {
                used[j] = true;
                cur.push(j);
                go(pos + 1, small, used, cur, visit);
                cur.pop();
                used[j] = false;
            }
        }
    }
    go(0, small, &mut vec![false; large], &mut Vec::new(), visit);
}

/// CEAF by enumerating every alignment of gold and predicted clusters.
pub fn ceaf(pred: &[usize], gold: &[usize], kind: Phi) -> (f64, f64, f64) {
    let p = clusters(pred);
    let g = clusters(gold);
    let mut best = 0.0f64;
    if g.len() <= p.len() {
        injections(g.len(), p.len(), &mut |m| {
            best = best.max(m.iter().enumerate().map(|(i, &j)| phi(kind, &g[i], &p[j])).sum());
        });
    } else {
        injections(p.len(), g.len(), &mut |m| {
            best = best.max(m.iter().enumerate().map(|(j, &i)| phi(kind, &g[i], &p[j])).sum());
        });
    }
    let self_p: f64 = p.iter().map(|c| phi(kind, c, c)).sum();
    let self_g: f64 = g.iter().map(|c| phi(kind, c, c)).sum();
    let (pp, rr) = (best / self_p, best / self_g);
    (pp, rr, f1(pp, rr))
}

/// MUC through link counting: a key cluster of size s split into m parts
/// keeps s - m of its s - 1 links.
pub fn muc(pred: &[usize], gold: &[usize]) -> (f64, f64, f64) {
    let side = |key: &[usize], resp: &[usize]| -> (usize, usize) {
        let (mut kept, mut links) = (0, 0);
        for c in clusters(key) {
            let parts: BTreeSet<usize> = c.iter().map(|&d| resp[d]).collect();
            kept += c.len() - parts.len();
            links += c.len() - 1;
        }
        (kept, links)
    };
    let (rk, rl) = side(gold, pred);
    let (pk, pl) = side(pred, gold);
    if rl == 0 && pl == 0 {
        return (1.0, 1.0, 1.0);
    }
    let div = |a: usize, b: usize| if b == 0 { 0.0 } else { a as f64 / b as f64 };
    let (p, r) = (div(pk, pl), div(rk, rl));
    (p, r, f1(p, r))
}

/// (tp, fp, fn, tn) over all unordered document pairs.
pub fn pairs(pred: &[usize], gold: &[usize]) -> (u64, u64, u64, u64) {
    let (mut tp, mut fp, mut fn_, mut tn) = (0, 0, 0, 0);
    for i in 0..pred.len() {
        for j in i + 1..pred.len() {
            match (pred[i] == pred[j], gold[i] == gold[j]) {
                (true, true) => tp += 1,
                (true, false) => fp += 1,
                (false, true) => fn_ += 1,
                (false, false) => tn += 1,
            }
        }
    }
    (tp, fp, fn_, tn)
}

pub fn rand_index(pred: &[usize], gold: &[usize]) -> f64 {
    let (tp, fp, fn_, tn) = pairs(pred, gold);
    (tp + tn) as f64 / (tp + fp + fn_ + tn) as f64
}

/// ARI in pair-count form; a zero denominator means both partitions are
/// equally trivial and scores 1.
pub fn ari(pred: &[usize], gold: &[usize]) -> f64 {
    let (a, b, c, d) = pairs(pred, gold);
    let (a, b, c, d) = (a as f64, b as f64, c as f64, d as f64);
    let den = (a + b) * (b + d) + (a + c) * (c + d);
    if den == 0.0 {
        1.0
    } else {
        2.0 * (a * d - b * c) / den
    }
}

pub fn fowlkes_mallows(pred: &[usize], gold: &[usize]) -> f64 {
    let (tp, fp, fn_, _) = pairs(pred, gold);
    match (tp + fp, tp + fn_) {
        (0, 0) => 1.0,
        (0, _) | (_, 0) => 0.0,
        (p, g) => tp as f64 / ((p * g) as f64).sqrt(),
    }
}

pub fn blanc(pred: &[usize], gold: &[usize]) -> (f64, f64, f64) {
    let (tp, fp, fn_, tn) = pairs(pred, gold);
    let div = |a: u64, b: u64| if b == 0 { 0.0 } else { a as f64 / b as f64 };
    let (pc, rc) = (div(tp, tp + fp), div(tp, tp + fn_));
    let (pn, rn) = (div(tn, tn + fn_), div(tn, tn + fp));
    if tp + fp == 0 && tp + fn_ == 0 {
        return (pn, rn, f1(pn, rn));
    }
    if tn + fn_ == 0 && tn + fp == 0 {
        return (pc, rc, f1(pc, rc));
    }
    ((pc + pn) / 2.0, (rc + rn) / 2.0, (f1(pc, rc) + f1(pn, rn)) / 2.0)
}

fn counts(labels: &[usize]) -> HashMap<usize, usize> {
    let mut m = HashMap::new();
    for &l in labels {
        *m.entry(l).or_insert(0) += 1;
    }
    m
}

fn entropy_of(labels: &[usize]) -> f64 {
    let n = labels.len() as f64;
    -counts(labels).values().map(|&c| c as f64 / n * (c as f64 / n).ln()).sum::<f64>()
}

/// H(a | b).
fn conditional_entropy(a: &[usize], b: &[usize]) -> f64 {
    let n = a.len() as f64;
    let joint = counts(&a.iter().zip(b).map(|(x, y)| x * 1000 + y).collect::<Vec<_>>());
    let cb = counts(b);
    -joint
        .iter()
        .map(|(&k, &c)| {
            let nb = cb[&(k % 1000)] as f64;
            c as f64 / n * (c as f64 / nb).ln()
        })
        .sum::<f64>()
}

/// (homogeneity, completeness, V) through conditional entropies.
pub fn v_measure(pred: &[usize], gold: &[usize]) -> (f64, f64, f64) {
    let hg = entropy_of(gold);
    let hp = entropy_of(pred);
    let h = if hg == 0.0 { 1.0 } else { 1.0 - conditional_entropy(gold, pred) / hg };
    let c = if hp == 0.0 { 1.0 } else { 1.0 - conditional_entropy(pred, gold) / hp };
    let v = if h + c == 0.0 { 0.0 } else { 2.0 * h * c / (h + c) };
    (h, c, v)
}

pub fn mutual_information(pred: &[usize], gold: &[usize]) -> f64 {
    entropy_of(gold) - conditional_entropy(gold, pred)
}

/// Expected mutual information under the permutation model, summed with
/// hypergeometric probabilities.
pub fn expected_mi(pred: &[usize], gold: &[usize]) -> f64 {
    let n = pred.len() as u64;
    let cp = counts(pred);
    let cg = counts(gold);
    let mut emi = 0.0;
    for &a in cp.values() {
        for &b in cg.values() {
            let (a, b) = (a as u64, b as u64);
            let h = Hypergeometric::new(n, a, b).expect("valid hypergeometric");
            let lo = (a + b).saturating_sub(n).max(1);
            for k in lo..=a.min(b) {
                let kf = k as f64;
                emi += kf / n as f64 * (n as f64 * kf / (a * b) as f64).ln() * h.pmf(k);
            }
        }
    }
    emi
}

fn same_up_to_renaming(pred: &[usize], gold: &[usize]) -> bool {
    let (_, fp, fn_, _) = pairs(pred, gold);
    fp == 0 && fn_ == 0
}

/// AMI with max normalization. Both labelings being trivial in the same way
/// or identical up to renaming scores 1; the denominator is kept at least
/// machine epsilon away from zero.
pub fn ami(pred: &[usize], gold: &[usize]) -> f64 {
    let kp = counts(pred).len();
    let kg = counts(gold).len();
    let n = pred.len();
    if (kp == kg && (kp == 1 || kp == n)) || same_up_to_renaming(pred, gold) {
        return 1.0;
    }
    let emi = expected_mi(pred, gold);
    let mi = mutual_information(pred, gold);
    let mut den = entropy_of(pred).max(entropy_of(gold)) - emi;
    den = if den < 0.0 { den.min(-f64::EPSILON) } else { den.max(f64::EPSILON) };
    (mi - emi) / den
}

/// Maximum-profit assignment value by enumerating every injection of the
/// shorter side.
pub fn brute_assignment(profit: &[Vec<f64>]) -> f64 {
    let rows = profit.len();
    let cols = profit.first().map_or(0, Vec::len);
    let mut best = f64::NEG_INFINITY;
    if rows <= cols {
        injections(rows, cols, &mut |m| {
            best = best.max(m.iter().enumerate().map(|(i, &j)| profit[i][j]).sum());
        });
    } else {
        injections(cols, rows, &mut |m| {
            best = best.max(m.iter().enumerate().map(|(j, &i)| profit[i][j]).sum());
        });
    }
    best
}

/// How far `point` is from the convex hull of affinely independent
/// `vertices`: solves for barycentric coordinates by least squares and
/// returns the larger of the reconstruction residual and the most negative
/// coordinate.
pub fn hull_distance(vertices: &[Vec<f64>], point: &[f64]) -> f64 {
    let d = point.len();
    let m = vertices.len();
    assert!(m <= d + 1, "vertices must be affinely independent");
    let a = DMatrix::from_fn(d + 1, m, |r, c| if r < d { vertices[c][r] } else { 1.0 });
    let b = DVector::from_fn(d + 1, |r, _| if r < d { point[r] } else { 1.0 });
    let lambda = a.clone().svd(true, true).solve(&b, 1e-12).expect("svd solve");
    let residual = (&a * &lambda - &b).norm();
    let negative = lambda.iter().fold(0.0f64, |m, &l| m.max(-l));
    residual.max(negative)
}

pub fn hinge_objective(w: &[f64], b: f64, xs: &[Vec<f64>], ys: &[f64], c: f64) -> f64 {
    let reg: f64 = 0.5 * w.iter().map(|v| v * v).sum::<f64>();
    let loss: f64 = xs
        .iter()
        .zip(ys)
        .map(|(x, y)| (1.0 - y * (x.iter().zip(w).map(|(a, b)| a * b).sum::<f64>() + b)).max(0.0))
        .sum();
    reg + c * loss
}

/// Best bias for fixed `w`: the objective is piecewise linear in b with
/// breakpoints where a margin equals one.
fn best_bias_objective(w: &[f64], xs: &[Vec<f64>], ys: &[f64], c: f64) -> f64 {
    xs.iter()
        .zip(ys)
        .map(|(x, y)| y - x.iter().zip(w).map(|(a, b)| a * b).sum::<f64>())
        .map(|b| hinge_objective(w, b, xs, ys, c))
        .fold(f64::INFINITY, f64::min)
}

/// Projects `v` onto `{0 <= a <= c, sum a_i y_i = 0}` by bisection on the
/// multiplier of the equality.
fn project_dual(v: &[f64], ys: &[f64], c: f64) -> Vec<f64> {
    let at = |tau: f64| -> Vec<f64> { v.iter().zip(ys).map(|(vi, y)| (vi - tau * y).clamp(0.0, c)).collect() };
    let excess = |a: &[f64]| a.iter().zip(ys).map(|(a, y)| a * y).sum::<f64>();
    let bound = v.iter().fold(0.0f64, |m, x| m.max(x.abs())) + c + 1.0;
    let (mut lo, mut hi) = (-bound, bound);
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if excess(&at(mid)) > 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    at(0.5 * (lo + hi))
}

/// Brackets the optimal soft-margin primal value `0.5|w|^2 + C sum hinge`
/// over (w, b). Runs accelerated projected gradient ascent on the dual;
/// every candidate yields a lower bound (its dual value) and an upper bound
/// (the primal at `w = sum a_i y_i x_i` with the exact best bias). Returns
/// `(upper, lower)`.
pub fn svm_qp_oracle(xs: &[Vec<f64>], ys: &[f64], c: f64) -> (f64, f64) {
    let n = xs.len();
    let dot = |a: &[f64], b: &[f64]| a.iter().zip(b).map(|(x, y)| x * y).sum::<f64>();
    let q: Vec<Vec<f64>> = (0..n).map(|i| (0..n).map(|j| ys[i] * ys[j] * dot(&xs[i], &xs[j])).collect()).collect();
    let lipschitz = (0..n).map(|i| q[i][i]).sum::<f64>().max(1e-12);
    let dual = |a: &[f64]| {
        let qa: f64 = (0..n).map(|i| a[i] * (0..n).map(|j| q[i][j] * a[j]).sum::<f64>()).sum();
        a.iter().sum::<f64>() - 0.5 * qa
    };
    let primal = |a: &[f64]| {
        let w: Vec<f64> = (0..xs[0].len()).map(|k| (0..n).map(|i| a[i] * ys[i] * xs[i][k]).sum()).collect();
        best_bias_objective(&w, xs, ys, c)
    };
    let mut a = vec![0.0; n];
    let mut z = a.clone();
    let mut t = 1.0f64;
    let (mut upper, mut lower) = (primal(&a), dual(&a));
    for iter in 1..=2_000_000usize {
        let grad: Vec<f64> = (0..n).map(|i| 1.0 - (0..n).map(|j| q[i][j] * z[j]).sum::<f64>()).collect();
        let step: Vec<f64> = (0..n).map(|i| z[i] + grad[i] / lipschitz).collect();
        let next = project_dual(&step, ys, c);
        let t_next = 0.5 * (1.0 + (1.0 + 4.0 * t * t).sqrt());
        z = (0..n).map(|i| next[i] + (t - 1.0) / t_next * (next[i] - a[i])).collect();
        a = next;
        t = t_next;
        if iter % 500 == 0 {
            upper = upper.min(primal(&a));
            lower = lower.max(dual(&a));
            if upper - lower <= 1e-9 * upper.abs().max(1.0) {
                break;
            }
        }
    }
    (upper, lower)
}

/// Largest relative deviation between `grad` and central differences of
/// `f` at `x`, with denominators floored at `floor`.
pub fn gradient_error(f: &mut impl FnMut(&[f64]) -> f64, x: &[f64], grad: &[f64], h: f64, floor: f64) -> f64 {
    let mut worst = 0.0f64;
    let mut probe = x.to_vec();
    for k in 0..x.len() {
        probe[k] = x[k] + h;
        let up = f(&probe);
        probe[k] = x[k] - h;
        let down = f(&probe);
        probe[k] = x[k];
        let fd = (up - down) / (2.0 * h);
        let den = grad[k].abs().max(fd.abs()).max(floor);
        worst = worst.max((grad[k] - fd).abs() / den);
    }
    worst
}

/// A document representation with random sparse bags, a `dim`-dimensional
/// dense vector and a timestamp within a week of `base`.
pub fn random_rep(rng: &mut impl Rng, dim: usize, base: i64) -> DocRepSet {
    let sparse = std::array::from_fn::<_, NUM_SPARSE, _>(|_| {
        let pairs: Vec<(u32, f64)> = (0..rng.random_range(0..6))
            .map(|_| (rng.random_range(0..20u32), rng.random_range(0.1..3.0)))
            .collect();
        let mut dedup: Vec<(u32, f64)> = Vec::new();
        for (i, v) in pairs {
            if !dedup.iter().any(|(j, _)| *j == i) {
                dedup.push((i, v));
            }
        }
        SparseVector::from_pairs(dedup).expect("valid sparse vector")
    });
    let dense = DenseVector::new((0..dim).map(|_| rng.random_range(-1.0..1.0)).collect()).expect("finite");
    DocRepSet {
        sparse,
        dense,
        timestamp: Timestamp(base + rng.random_range(0..7 * 86_400)),
    }
}

/// `|a - b|_inf <= tol * max(|a|_inf, |b|_inf)`.
pub fn vec_rel_close(a: &[f64], b: &[f64], tol: f64) -> bool {
    let scale = a.iter().chain(b).fold(0.0f64, |m, v| m.max(v.abs()));
    a.len() == b.len() && a.iter().zip(b).all(|(x, y)| (x - y).abs() <= tol * scale)
}

/// Creation samples whose label is the XOR of two thresholded features.
pub fn xor_samples(rng: &mut impl Rng, per_corner: usize) -> Vec<CreationSample> {
    let mut out = Vec::new();
    for (a, b) in [(false, false), (false, true), (true, false), (true, true)] {
        for _ in 0..per_corner {
            let mut x = [0.5; NUM_FEATURES];
            x[0] = if a { 0.9 } else { 0.1 } + rng.random_range(-0.05..0.05);
            x[9] = if b { 0.9 } else { 0.1 } + rng.random_range(-0.05..0.05);
            out.push(CreationSample {
                x: SimilarityVector(x),
                create: a != b,
            });
        }
    }
    out
}
