//! TF-IDF model files: JSON with a format tag, version and a SHA-256 of the
//! serialized models.

use std::path::Path;

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use super::{create, hex, read_to_string};
use crate::error::{Error, Result};
use crate::repr::TfidfModels;

const FORMAT: &str = "streamclust-tfidf";
pub const TFIDF_VERSION: u32 = 1;

#[derive(Serialize, Deserialize)]
struct Envelope {
    format: String,
    version: u32,
    sha256: String,
    models: TfidfModels,
}

fn digest(models: &TfidfModels) -> Result<String> {
    let json = serde_json::to_string(models).map_err(std::io::Error::from)?;
    Ok(hex(&Sha256::digest(json.as_bytes())))
}

pub fn encode_tfidf(models: &TfidfModels) -> Result<String> {
    let env = Envelope {
        format: FORMAT.into(),
        version: TFIDF_VERSION,
        sha256: digest(models)?,
        models: models.clone(),
    };
    Ok(serde_json::to_string(&env).map_err(std::io::Error::from)? + "\n")
}

pub fn decode_tfidf(text: &str) -> Result<TfidfModels> {
    let value: serde_json::Value = serde_json::from_str(text).map_err(|e| Error::Parse {
        line: e.line(),
        message: e.to_string(),
    })?;
    if value.get("format").and_then(|f| f.as_str()) != Some(FORMAT) {
        return Err(Error::BadMagic);
    }
    match value.get("version").and_then(|v| v.as_u64()) {
        Some(v) if v > TFIDF_VERSION as u64 => {
            return Err(Error::VersionMismatch {
                found: v.min(u32::MAX as u64) as u32,
                supported: TFIDF_VERSION,
            })
        }
        Some(v) if v >= 1 => {}
        _ => return Err(Error::CorruptFile("missing or invalid version".into())),
    }
    let env: Envelope = serde_json::from_value(value).map_err(|e| Error::CorruptFile(e.to_string()))?;
    if digest(&env.models)? != env.sha256 {
        return Err(Error::CorruptFile("tf-idf checksum mismatch".into()));
    }
    env.models.validate().map_err(|e| Error::CorruptFile(e.to_string()))?;
    Ok(env.models)
}

pub fn save_tfidf(models: &TfidfModels, path: &Path) -> Result<()> {
    use std::io::Write;
    let mut out = create(path)?;
    out.write_all(encode_tfidf(models)?.as_bytes())
        .and_then(|_| out.flush())
        .map_err(|e| Error::file(path, e))
}

pub fn load_tfidf(path: &Path) -> Result<TfidfModels> {
    decode_tfidf(&read_to_string(path)?)
}
