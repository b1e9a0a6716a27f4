//! Trained model bundles.
//!
//! Little-endian layout:
//!
//! ```text
//! magic          8 bytes  "SCBUNDLE"
//! version        u32
//! embedding_dim  u32
//! mu, sigma      2 x f64
//! weights        13 x f64
//! creation net   31 x f64
//! sha256         32 bytes over everything above
//! ```

use std::path::Path;

use sha2::{Digest, Sha256};

use super::{create, read_bytes};
use crate::error::{Error, Result};
use crate::model::{ModelBundle, SimilarityParams, WeightVector, BUNDLE_FORMAT_VERSION, NUM_FEATURES};
use crate::training::net::NUM_PARAMS;
use crate::training::CreationNet;

pub const BUNDLE_MAGIC: [u8; 8] = *b"SCBUNDLE";
const BODY_LEN: usize = 8 + 4 + 4 + 16 + 8 * NUM_FEATURES + 8 * NUM_PARAMS;
pub const BUNDLE_LEN: usize = BODY_LEN + 32;

pub fn encode_bundle(bundle: &ModelBundle) -> Vec<u8> {
    let mut out = Vec::with_capacity(BUNDLE_LEN);
    out.extend_from_slice(&BUNDLE_MAGIC);
    out.extend_from_slice(&bundle.format_version.to_le_bytes());
    out.extend_from_slice(&(bundle.embedding_dim as u32).to_le_bytes());
    out.extend_from_slice(&bundle.sim_params.mu().to_le_bytes());
    out.extend_from_slice(&bundle.sim_params.sigma().to_le_bytes());
    for w in bundle.weights.values() {
        out.extend_from_slice(&w.to_le_bytes());
    }
    for p in bundle.creation_net.params() {
        out.extend_from_slice(&p.to_le_bytes());
    }
    let digest = Sha256::digest(&out);
    out.extend_from_slice(&digest);
    out
}

pub fn decode_bundle(bytes: &[u8]) -> Result<ModelBundle> {
    if bytes.len() < 12 {
        return Err(Error::CorruptFile(format!("bundle is truncated ({} bytes)", bytes.len())));
    }
    if bytes[..8] != BUNDLE_MAGIC {
        return Err(Error::BadMagic);
    }
    let version = u32::from_le_bytes(bytes[8..12].try_into().expect("4 bytes"));
    if version > BUNDLE_FORMAT_VERSION {
        return Err(Error::VersionMismatch {
            found: version,
            supported: BUNDLE_FORMAT_VERSION,
        });
    }
    if version == 0 {
        return Err(Error::CorruptFile("bundle version 0".into()));
    }
    if bytes.len() != BUNDLE_LEN {
        return Err(Error::CorruptFile(format!(
            "bundle has {} bytes, expected {BUNDLE_LEN}",
            bytes.len()
        )));
    }
    let (body, checksum) = bytes.split_at(BODY_LEN);
    if Sha256::digest(body).as_slice() != checksum {
        return Err(Error::CorruptFile("bundle checksum mismatch".into()));
    }
    let mut at = 12;
    let mut u32_at = || {
        let v = u32::from_le_bytes(body[at..at + 4].try_into().expect("4 bytes"));
        at += 4;
        v
    };
    let embedding_dim = u32_at() as usize;
    let mut floats = body[at..].chunks_exact(8).map(|c| f64::from_le_bytes(c.try_into().expect("8 bytes")));
    let mut next = || floats.next().expect("length checked");
    let mu = next();
    let sigma = next();
    let weights: [f64; NUM_FEATURES] = std::array::from_fn(|_| next());
    let params: [f64; NUM_PARAMS] = std::array::from_fn(|_| next());
    let corrupt = |e: Error| Error::CorruptFile(e.to_string());
    Ok(ModelBundle {
        weights: WeightVector::new(weights).map_err(corrupt)?,
        creation_net: CreationNet::from_params(params).map_err(corrupt)?,
        sim_params: SimilarityParams::new(mu, sigma).map_err(corrupt)?,
        embedding_dim,
        format_version: version,
    })
}

pub fn save_bundle(bundle: &ModelBundle, path: &Path) -> Result<()> {
    use std::io::Write;
    let mut out = create(path)?;
    out.write_all(&encode_bundle(bundle)).map_err(|e| Error::file(path, e))?;
    out.flush().map_err(|e| Error::file(path, e))?;
    Ok(())
}

pub fn load_bundle(path: &Path) -> Result<ModelBundle> {
    decode_bundle(&read_bytes(path)?)
}
