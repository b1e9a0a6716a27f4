//! Embedding files.
//!
//! Binary layout, all integers and floats little-endian:
//!
//! ```text
//! magic    8 bytes  "SCEMBED\0"
//! version  u32      1
//! dim      u32
//! count    u64
//! count records of:
//!   id_len u32, id (UTF-8, id_len bytes), dim x f32
//! ```
//!
//! The text form has one record per line: the id, a tab, then the values
//! separated by single spaces.

use std::io::{BufRead, Read, Write};
use std::path::Path;

use super::{create, open};
use crate::error::{Error, Result};
use crate::repr::EmbeddingStore;

pub const EMBEDDING_MAGIC: [u8; 8] = *b"SCEMBED\0";
pub const EMBEDDING_VERSION: u32 = 1;

pub fn write_embeddings<W: Write>(mut out: W, store: &EmbeddingStore) -> Result<()> {
    out.write_all(&EMBEDDING_MAGIC)?;
    out.write_all(&EMBEDDING_VERSION.to_le_bytes())?;
    out.write_all(&(store.dim() as u32).to_le_bytes())?;
    out.write_all(&(store.len() as u64).to_le_bytes())?;
    for id in store.ids() {
        let v = store.get_raw(id).expect("id comes from the store");
        out.write_all(&(id.len() as u32).to_le_bytes())?;
        out.write_all(id.as_bytes())?;
        for x in v {
            out.write_all(&x.to_le_bytes())?;
        }
    }
    out.flush()?;
    Ok(())
}

pub fn save_embeddings(store: &EmbeddingStore, path: &Path) -> Result<()> {
    write_embeddings(create(path)?, store)
}

fn read_exact_or<R: Read>(input: &mut R, buf: &mut [u8], what: &str) -> Result<()> {
    input.read_exact(buf).map_err(|e| match e.kind() {
        std::io::ErrorKind::UnexpectedEof => Error::TruncatedFile(format!("unexpected end of file in {what}")),
        _ => Error::Io(e),
    })
}

fn read_u32<R: Read>(input: &mut R, what: &str) -> Result<u32> {
    let mut b = [0u8; 4];
    read_exact_or(input, &mut b, what)?;
    Ok(u32::from_le_bytes(b))
}

pub fn read_embeddings<R: Read>(mut input: R) -> Result<EmbeddingStore> {
    let mut magic = [0u8; 8];
    input.read_exact(&mut magic).map_err(|_| Error::BadMagic)?;
    if magic != EMBEDDING_MAGIC {
        return Err(Error::BadMagic);
    }
    let version = read_u32(&mut input, "header")?;
    if version == 0 || version > EMBEDDING_VERSION {
        return Err(Error::VersionMismatch {
            found: version,
            supported: EMBEDDING_VERSION,
        });
    }
    let dim = read_u32(&mut input, "header")? as usize;
    let mut count = [0u8; 8];
    read_exact_or(&mut input, &mut count, "header")?;
    let count = u64::from_le_bytes(count);
    let mut store = EmbeddingStore::new(dim);
    let mut floats = vec![0u8; dim * 4];
    for i in 0..count {
        let what = format!("record {i} of {count}");
        let len = read_u32(&mut input, &what)? as usize;
        let mut id = vec![0u8; len];
        read_exact_or(&mut input, &mut id, &what)?;
        let id = String::from_utf8(id).map_err(|_| Error::CorruptFile(format!("{what}: id is not UTF-8")))?;
        if store.contains(&id) {
            return Err(Error::CorruptFile(format!("duplicate embedding id `{id}`")));
        }
        read_exact_or(&mut input, &mut floats, &what)?;
        let v: Vec<f32> = floats
            .chunks_exact(4)
            .map(|c| f32::from_le_bytes([c[0], c[1], c[2], c[3]]))
            .collect();
        store.insert(id, v)?;
    }
    let mut probe = [0u8; 1];
    if input.read(&mut probe)? != 0 {
        return Err(Error::TruncatedFile(format!(
            "header declares {count} records but more data follows"
        )));
    }
    Ok(store)
}

pub fn load_embeddings(path: &Path) -> Result<EmbeddingStore> {
    read_embeddings(open(path)?)
}

pub fn write_embeddings_text<W: Write>(mut out: W, store: &EmbeddingStore) -> Result<()> {
    for id in store.ids() {
        let v = store.get_raw(id).expect("id comes from the store");
        let values: Vec<String> = v.iter().map(|x| x.to_string()).collect();
        writeln!(out, "{id}\t{}", values.join(" "))?;
    }
    out.flush()?;
    Ok(())
}

pub fn save_embeddings_text(store: &EmbeddingStore, path: &Path) -> Result<()> {
    write_embeddings_text(create(path)?, store)
}

/// The dimension is taken from the first record.
pub fn read_embeddings_text<R: BufRead>(input: R) -> Result<EmbeddingStore> {
    let mut store: Option<EmbeddingStore> = None;
    for (i, line) in input.lines().enumerate() {
        let line = line?;
        if line.trim().is_empty() {
            continue;
        }
        let bad = |message: String| Error::Parse { line: i + 1, message };
        let (id, rest) = line.split_once('\t').ok_or_else(|| bad("expected `id<TAB>values`".into()))?;
        let v = rest
            .split_whitespace()
            .map(|x| x.parse::<f32>().map_err(|_| bad(format!("bad float `{x}`"))))
            .collect::<Result<Vec<f32>>>()?;
        let s = store.get_or_insert_with(|| EmbeddingStore::new(v.len()));
        if s.contains(id) {
            return Err(bad(format!("duplicate embedding id `{id}`")));
        }
        s.insert(id, v)?;
    }
    Ok(store.unwrap_or_else(|| EmbeddingStore::new(0)))
}

pub fn load_embeddings_text(path: &Path) -> Result<EmbeddingStore> {
    read_embeddings_text(open(path)?)
}
