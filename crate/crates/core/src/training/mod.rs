//! Trainers for the weighted similarity model and the cluster-creation
//! network, plus the sample generators that feed them.

mod gold;
pub mod lbfgs;
pub mod net;
mod pipeline;
pub mod smote;
pub mod svm;

use std::io::{BufRead, Write};

pub use gold::{
    make_creation_samples, make_svm_triplets, simulate_gold_stream, GoldStreamTrace, NegativeSampling,
    TraceRecord,
};
pub use lbfgs::{lbfgs_minimize, LbfgsConfig, LbfgsResult};
pub use net::{train_creation_net, CreationNet};
pub use pipeline::{
    cross_validate, train_bundle, train_from_trace, CvReport, GridPoint, HyperGrid, TrainConfig, TrainSummary,
};
pub use smote::smote_oversample;
pub use svm::{LinearSvm, SvmConfig};

use crate::error::{Error, Result};
use crate::model::{SimilarityVector, WeightVector, NUM_FEATURES};

/// Difference of two similarity vectors with a ±1 target.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SvmTripletSample {
    pub x: [f64; NUM_FEATURES],
    pub y: i8,
}

impl SvmTripletSample {
    pub fn negated(&self) -> SvmTripletSample {
        SvmTripletSample {
            x: gold::negate(&self.x),
            y: -self.y,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CreationSample {
    pub x: SimilarityVector,
    /// true when the document started a new cluster.
    pub create: bool,
}

/// Fits the SVM on triplet samples and returns its weights; the bias is
/// dropped because the c-score is a pure weighted sum.
pub fn train_linear_svm(samples: &[SvmTripletSample], c: f64) -> Result<WeightVector> {
    let xs: Vec<&[f64]> = samples.iter().map(|s| &s.x[..]).collect();
    let ys: Vec<f64> = samples.iter().map(|s| s.y as f64).collect();
    let svm = LinearSvm::fit(&xs, &ys, &SvmConfig::new(c))?;
    let mut w = [0.0; NUM_FEATURES];
    w.copy_from_slice(&svm.weights);
    WeightVector::new(w).map_err(|_| Error::DegenerateData("SVM returned an all-zero weight vector".into()))
}

const SVM_HEADER: &str = "# streamclust svm-triplet v1";
const CREATION_HEADER: &str = "# streamclust creation v1";

fn write_rows<W: Write>(mut out: W, header: &str, rows: impl Iterator<Item = ([f64; NUM_FEATURES], i64)>) -> Result<()> {
    writeln!(out, "{header}")?;
    let names: Vec<String> = (0..NUM_FEATURES).map(|i| format!("f{i}")).collect();
    writeln!(out, "{}\tlabel", names.join("\t"))?;
    for (x, label) in rows {
        for v in x {
            write!(out, "{v}\t")?;
        }
        writeln!(out, "{label}")?;
    }
    Ok(())
}

fn read_rows<R: BufRead>(input: R, header: &str) -> Result<Vec<([f64; NUM_FEATURES], i64)>> {
    let mut rows = Vec::new();
    for (n, line) in input.lines().enumerate() {
        let line = line?;
        let lineno = n + 1;
        if n == 0 {
            if line.trim() != header {
                return Err(Error::Parse {
                    line: lineno,
                    message: format!("expected header `{header}`"),
                });
            }
            continue;
        }
        if n == 1 || line.trim().is_empty() {
            continue;
        }
        let fields: Vec<&str> = line.split('\t').collect();
        if fields.len() != NUM_FEATURES + 1 {
            return Err(Error::Parse {
                line: lineno,
                message: format!("expected {} fields, found {}", NUM_FEATURES + 1, fields.len()),
            });
        }
        let mut x = [0.0; NUM_FEATURES];
        for (slot, f) in x.iter_mut().zip(&fields) {
            *slot = f.parse().map_err(|_| Error::Parse {
                line: lineno,
                message: format!("bad number `{f}`"),
            })?;
        }
        let label = fields[NUM_FEATURES].parse().map_err(|_| Error::Parse {
            line: lineno,
            message: format!("bad label `{}`", fields[NUM_FEATURES]),
        })?;
        rows.push((x, label));
    }
    Ok(rows)
}

pub fn write_svm_samples<W: Write>(out: W, samples: &[SvmTripletSample]) -> Result<()> {
    write_rows(out, SVM_HEADER, samples.iter().map(|s| (s.x, s.y as i64)))
}

pub fn read_svm_samples<R: BufRead>(input: R) -> Result<Vec<SvmTripletSample>> {
    read_rows(input, SVM_HEADER)?
        .into_iter()
        .enumerate()
        .map(|(i, (x, y))| match y {
            1 | -1 => Ok(SvmTripletSample { x, y: y as i8 }),
            _ => Err(Error::Parse {
                line: i + 3,
                message: format!("svm label must be +1 or -1, got {y}"),
            }),
        })
        .collect()
}

pub fn write_creation_samples<W: Write>(out: W, samples: &[CreationSample]) -> Result<()> {
    write_rows(out, CREATION_HEADER, samples.iter().map(|s| (*s.x.values(), s.create as i64)))
}

pub fn read_creation_samples<R: BufRead>(input: R) -> Result<Vec<CreationSample>> {
    read_rows(input, CREATION_HEADER)?
        .into_iter()
        .enumerate()
        .map(|(i, (x, y))| match y {
            0 | 1 => Ok(CreationSample {
                x: SimilarityVector(x),
                create: y == 1,
            }),
            _ => Err(Error::Parse {
                line: i + 3,
                message: format!("creation label must be 0 or 1, got {y}"),
            }),
        })
        .collect()
}
