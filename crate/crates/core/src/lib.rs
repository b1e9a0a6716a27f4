//! Online news-stream event clustering.
//!
//! Documents arrive one at a time and are assigned to an existing event
//! cluster or start a new one. The decision combines sparse TF-IDF,
//! dense-embedding and temporal similarities with weights learned by a
//! linear SVM, and a small neural network decides when to create a cluster.
//!
//! ```no_run
//! use streamclust::engine::{cluster_stream, StreamOrder};
//! use streamclust::repr::{SparseEncoder, TfidfModels};
//! use streamclust::synth::{generate, SynthConfig};
//! use streamclust::training::{train_bundle, TrainConfig};
//!
//! let train = generate(&SynthConfig { seed: 1, ..Default::default() })?;
//! let encoder = SparseEncoder::Fitted(TfidfModels::fit(&train.docs)?);
//! let (bundle, _) = train_bundle(&train.docs, &encoder, &train.store, &TrainConfig::default())?;
//! let (pool, assignments) = cluster_stream(&train.docs, &bundle, &encoder, &train.store, StreamOrder::Timestamp)?;
//! println!("{} clusters for {} documents", pool.len(), assignments.len());
//! # Ok::<(), streamclust::Error>(())
//! ```

pub mod cli;
pub mod engine;
pub mod error;
pub mod io;
pub mod metrics;
pub mod model;
pub mod repr;
pub mod similarity;
pub mod synth;
pub mod training;

pub use error::{Error, Result};
