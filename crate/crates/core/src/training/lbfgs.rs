//! Limited-memory BFGS with two-loop recursion and Armijo backtracking.

use std::collections::VecDeque;

use crate::error::{Error, Result};

#[derive(Debug, Clone)]
pub struct LbfgsConfig {
    /// Number of curvature pairs kept.
    pub memory: usize,
    /// Stop when the infinity norm of the gradient falls to this value.
    pub tol: f64,
    /// Stop when the relative decrease of the objective over one step falls
    /// below this value. Zero disables the test.
    pub ftol: f64,
    pub max_iter: usize,
    pub max_backtracks: usize,
    /// Armijo sufficient-decrease constant.
    pub c1: f64,
}

impl Default for LbfgsConfig {
    fn default() -> Self {
        LbfgsConfig {
            memory: 10,
            tol: 1e-6,
            ftol: 0.0,
            max_iter: 10_000,
            max_backtracks: 60,
            c1: 1e-4,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Termination {
    GradientTolerance,
    FunctionTolerance,
    MaxIterations,
}

#[derive(Debug, Clone)]
pub struct LbfgsResult {
    pub x: Vec<f64>,
    pub f: f64,
    pub grad_inf_norm: f64,
    pub iterations: usize,
    pub termination: Termination,
}

impl LbfgsResult {
    pub fn converged(&self) -> bool {
        self.termination == Termination::GradientTolerance
    }
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

fn inf_norm(a: &[f64]) -> f64 {
    a.iter().fold(0.0, |m, v| m.max(v.abs()))
}

struct Pair {
    s: Vec<f64>,
    y: Vec<f64>,
    rho: f64,
}

/// Returns `-H g` for the inverse-Hessian approximation held in `history`.
fn two_loop(g: &[f64], history: &VecDeque<Pair>) -> Vec<f64> {
    let mut q = g.to_vec();
    let mut alpha = vec![0.0; history.len()];
    for (k, p) in history.iter().enumerate().rev() {
        alpha[k] = p.rho * dot(&p.s, &q);
        q.iter_mut().zip(&p.y).for_each(|(qi, yi)| *qi -= alpha[k] * yi);
    }
    if let Some(last) = history.back() {
        let gamma = dot(&last.s, &last.y) / dot(&last.y, &last.y);
        q.iter_mut().for_each(|v| *v *= gamma);
    }
    for (k, p) in history.iter().enumerate() {
        let beta = p.rho * dot(&p.y, &q);
        q.iter_mut().zip(&p.s).for_each(|(qi, si)| *qi += (alpha[k] - beta) * si);
    }
    q.iter_mut().for_each(|v| *v = -*v);
    q
}

/// Minimizes `objective`, which writes the gradient into its second argument
/// and returns the function value.
pub fn lbfgs_minimize<F>(mut objective: F, x0: &[f64], config: &LbfgsConfig) -> Result<LbfgsResult>
where
    F: FnMut(&[f64], &mut [f64]) -> f64,
{
    let n = x0.len();
    let mut x = x0.to_vec();
    let mut g = vec![0.0; n];
    let mut f = objective(&x, &mut g);
    if !f.is_finite() || g.iter().any(|v| !v.is_finite()) {
        return Err(Error::InvalidParameter("objective is not finite at the starting point".into()));
    }
    let mut history: VecDeque<Pair> = VecDeque::with_capacity(config.memory);
    let mut x_new = vec![0.0; n];
    let mut g_new = vec![0.0; n];

    for iter in 0..config.max_iter {
        let gnorm = inf_norm(&g);
        if gnorm <= config.tol {
            return Ok(LbfgsResult {
                x,
                f,
                grad_inf_norm: gnorm,
                iterations: iter,
                termination: Termination::GradientTolerance,
            });
        }

        let mut restarted = false;
        let f_next = loop {
            let mut d = two_loop(&g, &history);
            let mut slope = dot(&g, &d);
            if history.is_empty() || slope >= 0.0 {
                history.clear();
                d = g.iter().map(|v| -v).collect();
                slope = dot(&g, &d);
            }
            // Without curvature information the first step is scaled to unit length.
            let mut alpha = if history.is_empty() {
                1.0 / dot(&g, &g).sqrt().max(1.0)
            } else {
                1.0
            };
            let mut accepted = None;
            for _ in 0..config.max_backtracks {
                x_new.iter_mut().zip(x.iter().zip(&d)).for_each(|(xn, (xi, di))| *xn = xi + alpha * di);
                if x_new == x {
                    // step underflowed
                    break;
                }
                let fx = objective(&x_new, &mut g_new);
                if fx.is_finite() && fx <= f + config.c1 * alpha * slope {
                    accepted = Some(fx);
                    break;
                }
                alpha *= 0.5;
            }
            match accepted {
                Some(fx) => break fx,
                None if !restarted && !history.is_empty() => {
                    history.clear();
                    restarted = true;
                }
                None => {
                    return Err(Error::LineSearchFailure {
                        retries: config.max_backtracks,
                    })
                }
            }
        };

        let s: Vec<f64> = x_new.iter().zip(&x).map(|(a, b)| a - b).collect();
        let y: Vec<f64> = g_new.iter().zip(&g).map(|(a, b)| a - b).collect();
        let sy = dot(&s, &y);
        if sy > 1e-12 * dot(&s, &s).sqrt() * dot(&y, &y).sqrt() && sy > 0.0 {
            if history.len() == config.memory {
                history.pop_front();
            }
            history.push_back(Pair { rho: 1.0 / sy, s, y });
        }

        let f_prev = f;
        std::mem::swap(&mut x, &mut x_new);
        std::mem::swap(&mut g, &mut g_new);
        f = f_next;

        let rel = (f_prev - f) / f_prev.abs().max(f.abs()).max(1.0);
        if config.ftol > 0.0 && rel <= config.ftol {
            return Ok(LbfgsResult {
                grad_inf_norm: inf_norm(&g),
                x,
                f,
                iterations: iter + 1,
                termination: Termination::FunctionTolerance,
            });
        }
    }
    Ok(LbfgsResult {
        grad_inf_norm: inf_norm(&g),
        x,
        f,
        iterations: config.max_iter,
        termination: Termination::MaxIterations,
    })
}

/// Rosenbrock function `(1 - x)^2 + 100 (y - x^2)^2` and its gradient.
pub fn rosenbrock(x: &[f64], grad: &mut [f64]) -> f64 {
    let (a, b) = (x[0], x[1]);
    grad[0] = -2.0 * (1.0 - a) - 400.0 * a * (b - a * a);
    grad[1] = 200.0 * (b - a * a);
    (1.0 - a).powi(2) + 100.0 * (b - a * a).powi(2)
}
