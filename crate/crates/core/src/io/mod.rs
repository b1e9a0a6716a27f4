//! Readers and writers for corpora, embeddings, models and results.

pub mod assignments;
pub mod bundle;
pub mod config;
pub mod corpus;
pub mod embeddings;
pub mod tdt;
pub mod tfidf;

use std::fs::File;
use std::io::{BufReader, BufWriter};
use std::path::Path;

use crate::error::{Error, Result};

pub use assignments::{load_assignments, load_gold, save_assignments, write_assignments};
pub use bundle::{load_bundle, save_bundle};
pub use config::Config;
pub use corpus::{load_miranda, save_corpus, MirandaCorpus, MirandaOptions};
pub use embeddings::{load_embeddings, load_embeddings_text, save_embeddings, save_embeddings_text};
pub use tdt::{load_tdt, SplitSide, SplitTable};
pub use tfidf::{load_tfidf, save_tfidf};

pub(crate) fn open(path: &Path) -> Result<BufReader<File>> {
    File::open(path).map(BufReader::new).map_err(|e| Error::file(path, e))
}

pub(crate) fn create(path: &Path) -> Result<BufWriter<File>> {
    File::create(path).map(BufWriter::new).map_err(|e| Error::file(path, e))
}

pub(crate) fn read_to_string(path: &Path) -> Result<String> {
    std::fs::read_to_string(path).map_err(|e| Error::file(path, e))
}

pub(crate) fn read_bytes(path: &Path) -> Result<Vec<u8>> {
    std::fs::read(path).map_err(|e| Error::file(path, e))
}

pub(crate) fn hex(bytes: &[u8]) -> String {
    bytes.iter().map(|b| format!("{b:02x}")).collect()
}
