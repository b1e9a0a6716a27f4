//! Cluster-creation classifier: 13 inputs, one hidden layer of two logistic
//! units, one logistic output. Trained with L-BFGS on mean binary
//! cross-entropy plus an L2 penalty.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::model::{SimilarityVector, NUM_FEATURES};
use crate::training::lbfgs::{lbfgs_minimize, LbfgsConfig};
use crate::training::CreationSample;

pub const HIDDEN_UNITS: usize = 2;
/// Flattened parameter count: hidden weights, hidden biases, output weights,
/// output bias.
pub const NUM_PARAMS: usize = HIDDEN_UNITS * NUM_FEATURES + HIDDEN_UNITS + HIDDEN_UNITS + 1;
pub const L2_PENALTY: f64 = 1e-4;
pub const CREATE_THRESHOLD: f64 = 0.5;

const RESTARTS: usize = 4;

#[derive(Debug, Clone, PartialEq)]
pub struct CreationNet {
    params: [f64; NUM_PARAMS],
}

fn sigmoid(z: f64) -> f64 {
    if z >= 0.0 {
        1.0 / (1.0 + (-z).exp())
    } else {
        let e = z.exp();
        e / (1.0 + e)
    }
}

// log(1 + e^z) without overflow
fn softplus(z: f64) -> f64 {
    if z > 0.0 {
        z + (-z).exp().ln_1p()
    } else {
        z.exp().ln_1p()
    }
}

const OUT_W: usize = HIDDEN_UNITS * NUM_FEATURES + HIDDEN_UNITS;
const OUT_B: usize = OUT_W + HIDDEN_UNITS;

fn hidden_w(h: usize, k: usize) -> usize {
    h * NUM_FEATURES + k
}

fn hidden_b(h: usize) -> usize {
    HIDDEN_UNITS * NUM_FEATURES + h
}

struct Forward {
    hidden: [f64; HIDDEN_UNITS],
    logit: f64,
}

fn forward(params: &[f64], x: &[f64; NUM_FEATURES]) -> Forward {
    let mut hidden = [0.0; HIDDEN_UNITS];
    for (h, out) in hidden.iter_mut().enumerate() {
        let z: f64 = params[hidden_b(h)]
            + x.iter().enumerate().map(|(k, v)| params[hidden_w(h, k)] * v).sum::<f64>();
        *out = sigmoid(z);
    }
    let logit = params[OUT_B] + hidden.iter().enumerate().map(|(h, a)| params[OUT_W + h] * a).sum::<f64>();
    Forward { hidden, logit }
}

/// Mean binary cross-entropy plus `lambda * |theta|^2` over flattened
/// parameters; writes the analytic gradient into `grad`.
pub fn loss_and_grad(
    params: &[f64],
    xs: &[[f64; NUM_FEATURES]],
    ys: &[f64],
    lambda: f64,
    grad: &mut [f64],
) -> f64 {
    assert_eq!(params.len(), NUM_PARAMS);
    assert_eq!(grad.len(), NUM_PARAMS);
    grad.iter_mut().for_each(|g| *g = 0.0);
    let n = xs.len().max(1) as f64;
    let mut loss = 0.0;
    for (x, &y) in xs.iter().zip(ys) {
        let fw = forward(params, x);
        loss += softplus(fw.logit) - y * fw.logit;
        let d_logit = (sigmoid(fw.logit) - y) / n;
        grad[OUT_B] += d_logit;
        for h in 0..HIDDEN_UNITS {
            let a = fw.hidden[h];
            grad[OUT_W + h] += d_logit * a;
            let d_z = d_logit * params[OUT_W + h] * a * (1.0 - a);
            grad[hidden_b(h)] += d_z;
            for (k, v) in x.iter().enumerate() {
                grad[hidden_w(h, k)] += d_z * v;
            }
        }
    }
    let mut reg = 0.0;
    for (g, p) in grad.iter_mut().zip(params) {
        reg += p * p;
        *g += 2.0 * lambda * p;
    }
    loss / n + lambda * reg
}

impl CreationNet {
    pub fn from_params(params: [f64; NUM_PARAMS]) -> Result<CreationNet> {
        if params.iter().any(|p| !p.is_finite()) {
            return Err(Error::InvalidParameter("network parameters must be finite".into()));
        }
        Ok(CreationNet { params })
    }

    pub fn params(&self) -> &[f64; NUM_PARAMS] {
        &self.params
    }

    /// Probability that a new cluster should be created.
    pub fn predict(&self, x: &SimilarityVector) -> f64 {
        sigmoid(forward(&self.params, x.values()).logit)
    }

    pub fn should_create(&self, x: &SimilarityVector) -> bool {
        self.predict(x) >= CREATE_THRESHOLD
    }

    /// Glorot-uniform initialization.
    pub fn random_init(rng: &mut impl Rng) -> CreationNet {
        let hidden_limit = (6.0 / (NUM_FEATURES + HIDDEN_UNITS) as f64).sqrt();
        let out_limit = (6.0 / (HIDDEN_UNITS + 1) as f64).sqrt();
        let mut params = [0.0; NUM_PARAMS];
        for (i, p) in params.iter_mut().enumerate() {
            let limit = if i < OUT_W { hidden_limit } else { out_limit };
            *p = rng.random_range(-limit..limit);
        }
        CreationNet { params }
    }
}

fn split(samples: &[CreationSample]) -> (Vec<[f64; NUM_FEATURES]>, Vec<f64>) {
    samples
        .iter()
        .map(|s| (*s.x.values(), if s.create { 1.0 } else { 0.0 }))
        .unzip()
}

/// Trains from several seeded initializations and keeps the one with the
/// lowest regularized loss.
pub fn train_creation_net(samples: &[CreationSample], seed: u64) -> Result<CreationNet> {
    let positives = samples.iter().filter(|s| s.create).count();
    if positives == 0 || positives == samples.len() {
        return Err(Error::DegenerateData("creation network needs both classes".into()));
    }
    let (xs, ys) = split(samples);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let config = LbfgsConfig {
        memory: 10,
        tol: 1e-7,
        ftol: 1e-13,
        max_iter: 3000,
        ..Default::default()
    };
    let mut best: Option<(f64, [f64; NUM_PARAMS])> = None;
    for _ in 0..RESTARTS {
        let init = CreationNet::random_init(&mut rng);
        let result = lbfgs_minimize(
            |p, g| loss_and_grad(p, &xs, &ys, L2_PENALTY, g),
            init.params(),
            &config,
        );
        let (f, x) = match result {
            Ok(r) => (r.f, r.x),
            // a stalled restart is skipped rather than failing training
            Err(Error::LineSearchFailure { .. }) => continue,
            Err(e) => return Err(e),
        };
        if best.as_ref().map_or(true, |(bf, _)| f < *bf) {
            let mut params = [0.0; NUM_PARAMS];
            params.copy_from_slice(&x);
            best = Some((f, params));
        }
    }
    let (_, params) = best.ok_or(Error::LineSearchFailure { retries: RESTARTS })?;
    CreationNet::from_params(params)
}

/// Fraction of samples whose thresholded prediction matches the label.
pub fn accuracy(net: &CreationNet, samples: &[CreationSample]) -> f64 {
    if samples.is_empty() {
        return 0.0;
    }
    let hits = samples.iter().filter(|s| net.should_create(&s.x) == s.create).count();
    hits as f64 / samples.len() as f64
}
