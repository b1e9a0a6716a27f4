//! Linear soft-margin SVM trained in the dual with SMO.
//!
//! Minimizes `0.5 |w|^2 + C sum_i max(0, 1 - y_i (w . x_i + b))` with an
//! unregularized bias. Pairs are selected with the second-order working set
//! rule and the solver stops once the maximal KKT violation drops below the
//! configured tolerance.

use crate::error::{Error, Result};

const TAU: f64 = 1e-12;

#[derive(Debug, Clone)]
pub struct SvmConfig {
    pub c: f64,
    pub tol: f64,
    pub max_iter: usize,
}

impl SvmConfig {
    pub fn new(c: f64) -> Self {
        SvmConfig {
            c,
            tol: 1e-6,
            max_iter: 50_000_000,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct LinearSvm {
    pub weights: Vec<f64>,
    pub bias: f64,
    pub iterations: usize,
}

impl LinearSvm {
    pub fn decision(&self, x: &[f64]) -> f64 {
        dot(&self.weights, x) + self.bias
    }

    /// Trains on rows `xs` with labels `ys` in {+1, -1}.
    pub fn fit<X: AsRef<[f64]>>(xs: &[X], ys: &[f64], config: &SvmConfig) -> Result<LinearSvm> {
        if !(config.c > 0.0 && config.c.is_finite()) {
            return Err(Error::InvalidParameter(format!("SVM C must be positive, got {}", config.c)));
        }
        if xs.len() != ys.len() {
            return Err(Error::DimensionMismatch {
                expected: xs.len(),
                found: ys.len(),
            });
        }
        if ys.iter().any(|y| *y != 1.0 && *y != -1.0) {
            return Err(Error::InvalidParameter("labels must be +1 or -1".into()));
        }
        let pos = ys.iter().filter(|y| **y > 0.0).count();
        if pos == 0 || pos == ys.len() {
            return Err(Error::DegenerateData("SVM training needs both labels".into()));
        }
        let dim = xs[0].as_ref().len();
        if let Some(bad) = xs.iter().find(|x| x.as_ref().len() != dim) {
            return Err(Error::DimensionMismatch {
                expected: dim,
                found: bad.as_ref().len(),
            });
        }
        if xs.iter().flat_map(|x| x.as_ref()).any(|v| !v.is_finite()) {
            return Err(Error::InvalidParameter("SVM inputs must be finite".into()));
        }
        Ok(smo(xs, ys, config, dim))
    }
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

fn smo<X: AsRef<[f64]>>(xs: &[X], ys: &[f64], config: &SvmConfig, dim: usize) -> LinearSvm {
    let n = xs.len();
    let c = config.c;
    let x = |i: usize| xs[i].as_ref();
    let diag: Vec<f64> = (0..n).map(|i| dot(x(i), x(i))).collect();
    let mut alpha = vec![0.0; n];
    let mut w = vec![0.0; dim];
    // gradient of the dual objective 0.5 a'Qa - e'a, i.e. y_i (w . x_i) - 1
    let mut grad = vec![-1.0; n];
    let mut iterations = 0;

    let is_upper = |a: f64| a >= c;
    let is_lower = |a: f64| a <= 0.0;

    while iterations < config.max_iter {
        // i maximizes -y G over I_up
        let mut gmax = f64::NEG_INFINITY;
        let mut i_sel = usize::MAX;
        for t in 0..n {
            if ys[t] > 0.0 {
                if !is_upper(alpha[t]) && -grad[t] >= gmax {
                    gmax = -grad[t];
                    i_sel = t;
                }
            } else if !is_lower(alpha[t]) && grad[t] >= gmax {
                gmax = grad[t];
                i_sel = t;
            }
        }
        let mut gmax2 = f64::NEG_INFINITY;
        let mut j_sel = usize::MAX;
        let mut obj_min = f64::INFINITY;
        for t in 0..n {
            let (in_low, g) = if ys[t] > 0.0 {
                (!is_lower(alpha[t]), grad[t])
            } else {
                (!is_upper(alpha[t]), -grad[t])
            };
            if !in_low {
                continue;
            }
            gmax2 = gmax2.max(g);
            if i_sel == usize::MAX {
                continue;
            }
            let grad_diff = gmax + g;
            if grad_diff > 0.0 {
                let k_ij = dot(x(i_sel), x(t));
                let mut quad = diag[i_sel] + diag[t] - 2.0 * k_ij;
                if quad <= 0.0 {
                    quad = TAU;
                }
                let obj = -(grad_diff * grad_diff) / quad;
                if obj <= obj_min {
                    obj_min = obj;
                    j_sel = t;
                }
            }
        }
        if gmax + gmax2 < config.tol || i_sel == usize::MAX || j_sel == usize::MAX {
            break;
        }
        iterations += 1;

        let (i, j) = (i_sel, j_sel);
        let (old_i, old_j) = (alpha[i], alpha[j]);
        let k_ij = dot(x(i), x(j));
        let mut quad = diag[i] + diag[j] - 2.0 * k_ij;
        if quad <= 0.0 {
            quad = TAU;
        }
        let (mut ai, mut aj) = (old_i, old_j);
        if ys[i] != ys[j] {
            let delta = (-grad[i] - grad[j]) / quad;
            let diff = ai - aj;
            ai += delta;
            aj += delta;
            if diff > 0.0 {
                if aj < 0.0 {
                    aj = 0.0;
                    ai = diff;
                }
            } else if ai < 0.0 {
                ai = 0.0;
                aj = -diff;
            }
            if diff > 0.0 {
                if ai > c {
                    ai = c;
                    aj = c - diff;
                }
            } else if aj > c {
                aj = c;
                ai = c + diff;
            }
        } else {
            let delta = (grad[i] - grad[j]) / quad;
            let sum = ai + aj;
            ai -= delta;
            aj += delta;
            if sum > c {
                if ai > c {
                    ai = c;
                    aj = sum - c;
                }
            } else if aj < 0.0 {
                aj = 0.0;
                ai = sum;
            }
            if sum > c {
                if aj > c {
                    aj = c;
                    ai = sum - c;
                }
            } else if ai < 0.0 {
                ai = 0.0;
                aj = sum;
            }
        }
        alpha[i] = ai;
        alpha[j] = aj;
        let di = (ai - old_i) * ys[i];
        let dj = (aj - old_j) * ys[j];
        for (wk, (xi, xj)) in w.iter_mut().zip(x(i).iter().zip(x(j))) {
            *wk += di * xi + dj * xj;
        }
        for t in 0..n {
            grad[t] = ys[t] * dot(&w, x(t)) - 1.0;
        }
    }

    LinearSvm {
        bias: -rho(&alpha, &grad, ys, c),
        weights: w,
        iterations,
    }
}

/// Offset from the free support vectors, or the midpoint of the feasible
/// interval when none are free.
fn rho(alpha: &[f64], grad: &[f64], ys: &[f64], c: f64) -> f64 {
    let mut ub = f64::INFINITY;
    let mut lb = f64::NEG_INFINITY;
    let mut sum_free = 0.0;
    let mut n_free = 0usize;
    for t in 0..alpha.len() {
        let yg = ys[t] * grad[t];
        if alpha[t] >= c {
            if ys[t] < 0.0 {
                ub = ub.min(yg);
            } else {
                lb = lb.max(yg);
            }
        } else if alpha[t] <= 0.0 {
            if ys[t] > 0.0 {
                ub = ub.min(yg);
            } else {
                lb = lb.max(yg);
            }
        } else {
            n_free += 1;
            sum_free += yg;
        }
    }
    if n_free > 0 {
        sum_free / n_free as f64
    } else {
        (ub + lb) / 2.0
    }
}

/// Primal objective `0.5 |w|^2 + C sum hinge`.
pub fn primal_objective<X: AsRef<[f64]>>(w: &[f64], b: f64, xs: &[X], ys: &[f64], c: f64) -> f64 {
    let reg = 0.5 * dot(w, w);
    let hinge: f64 = xs
        .iter()
        .zip(ys)
        .map(|(x, y)| (1.0 - y * (dot(w, x.as_ref()) + b)).max(0.0))
        .sum();
    reg + c * hinge
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn one_dimensional_separable() {
        let xs = vec![vec![2.0], vec![-2.0]];
        let ys = vec![1.0, -1.0];
        let m = LinearSvm::fit(&xs, &ys, &SvmConfig::new(1e3)).unwrap();
        assert!(m.weights[0] > 0.0);
        // hard-margin solution w = 0.5, b = 0: both points on the margin
        assert!((m.weights[0] - 0.5).abs() < 1e-6, "{:?}", m);
        assert!((m.decision(&[2.0]) - 1.0).abs() < 1e-6);
        assert!(m.bias.abs() < 1e-6);
    }

    #[test]
    fn rejects_single_label() {
        let xs = vec![vec![1.0], vec![2.0]];
        assert!(matches!(
            LinearSvm::fit(&xs, &[1.0, 1.0], &SvmConfig::new(1.0)),
            Err(Error::DegenerateData(_))
        ));
        assert!(LinearSvm::fit(&xs, &[1.0, 0.0], &SvmConfig::new(1.0)).is_err());
        assert!(LinearSvm::fit(&xs, &[1.0, -1.0], &SvmConfig::new(0.0)).is_err());
    }

    #[test]
    fn objective_not_worse_than_zero() {
        let xs = vec![vec![1.0, 0.2], vec![0.5, 0.9], vec![-0.3, -1.0], vec![-1.0, 0.1], vec![0.2, -0.1]];
        let ys = vec![1.0, 1.0, -1.0, -1.0, 1.0];
        let c = 2.0;
        let m = LinearSvm::fit(&xs, &ys, &SvmConfig::new(c)).unwrap();
        let at_zero = primal_objective(&[0.0, 0.0], 0.0, &xs, &ys, c);
        assert!(primal_objective(&m.weights, m.bias, &xs, &ys, c) <= at_zero);
    }
}
