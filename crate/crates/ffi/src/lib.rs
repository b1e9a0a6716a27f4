//! C ABI for the streamclust engine and metrics.
//!
//! Every fallible function returns an [`ScStatus`]. On failure the message is
//! kept per thread and read with [`sc_last_error_message`]. Handles are opaque
//! and released with their `_free` function; passing NULL to a `_free`
//! function is a no-op.

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::path::PathBuf;
use std::ptr;

use streamclust::engine::ClusterPool;
use streamclust::io::{load_bundle, load_tfidf};
use streamclust::metrics::{bcubed_labels, ceaf_labels, info_metrics_labels, pairwise_metrics_labels, CeafMode, Prf};
use streamclust::model::{Document, ModelBundle, Timestamp, NUM_FEATURES};
use streamclust::repr::{encode_document, EmbeddingStore, SparseEncoder};
use streamclust::Error;

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ScStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidArgument = 2,
    Io = 3,
    Parse = 4,
    BadMagic = 5,
    VersionMismatch = 6,
    CorruptFile = 7,
    MissingEmbedding = 8,
    DimensionMismatch = 9,
    Data = 10,
    Panic = 11,
}

impl From<&Error> for ScStatus {
    fn from(e: &Error) -> Self {
        match e {
            Error::InvalidParameter(_) | Error::InvalidDocument(_) => ScStatus::InvalidArgument,
            Error::File { .. } | Error::Io(_) => ScStatus::Io,
            Error::Parse { .. } | Error::MissingField { .. } => ScStatus::Parse,
            Error::BadMagic => ScStatus::BadMagic,
            Error::VersionMismatch { .. } => ScStatus::VersionMismatch,
            Error::CorruptFile(_) | Error::TruncatedFile(_) => ScStatus::CorruptFile,
            Error::MissingEmbedding(_) => ScStatus::MissingEmbedding,
            Error::DimensionMismatch { .. } => ScStatus::DimensionMismatch,
            _ => ScStatus::Data,
        }
    }
}

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_error(msg: impl Into<String>) {
    let msg = CString::new(msg.into().replace('\0', " ")).expect("nul bytes removed");
    LAST_ERROR.with(|e| *e.borrow_mut() = Some(msg));
}

fn fail(status: ScStatus, msg: impl Into<String>) -> ScStatus {
    set_error(msg);
    status
}

fn guard(f: impl FnOnce() -> Result<(), ScStatus>) -> ScStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => {
            LAST_ERROR.with(|e| *e.borrow_mut() = None);
            ScStatus::Ok
        }
        Ok(Err(s)) => s,
        Err(_) => fail(ScStatus::Panic, "internal panic"),
    }
}

fn check(r: streamclust::Result<()>) -> Result<(), ScStatus> {
    r.map_err(|e| fail(ScStatus::from(&e), e.to_string()))
}

fn lift<T>(r: streamclust::Result<T>) -> Result<T, ScStatus> {
    r.map_err(|e| fail(ScStatus::from(&e), e.to_string()))
}

unsafe fn c_str<'a>(p: *const c_char, what: &str) -> Result<&'a str, ScStatus> {
    if p.is_null() {
        return Err(fail(ScStatus::NullPointer, format!("{what} is NULL")));
    }
    CStr::from_ptr(p)
        .to_str()
        .map_err(|_| fail(ScStatus::InvalidArgument, format!("{what} is not valid UTF-8")))
}

unsafe fn slice<'a, T>(p: *const T, len: usize, what: &str) -> Result<&'a [T], ScStatus> {
    if len == 0 {
        return Ok(&[]);
    }
    if p.is_null() {
        return Err(fail(ScStatus::NullPointer, format!("{what} is NULL")));
    }
    Ok(std::slice::from_raw_parts(p, len))
}

fn out_ptr<T>(p: *mut T, what: &str) -> Result<(), ScStatus> {
    if p.is_null() {
        Err(fail(ScStatus::NullPointer, format!("{what} is NULL")))
    } else {
        Ok(())
    }
}

/// Message for the last failed call on this thread, or NULL after a
/// successful call. Valid until the next call on the same thread.
#[no_mangle]
pub extern "C" fn sc_last_error_message() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(ptr::null(), |s| s.as_ptr()))
}

/// Library version as a static NUL-terminated string.
#[no_mangle]
pub extern "C" fn sc_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr().cast()
}

/// A trained model bundle.
pub struct ScBundle {
    bundle: ModelBundle,
}

/// # Safety
/// `path` must be a NUL-terminated string and `out` a writable pointer.
#[no_mangle]
pub unsafe extern "C" fn sc_bundle_load(path: *const c_char, out: *mut *mut ScBundle) -> ScStatus {
    guard(|| {
        out_ptr(out, "out")?;
        let path = c_str(path, "path")?;
        let bundle = lift(load_bundle(&PathBuf::from(path)))?;
        *out = Box::into_raw(Box::new(ScBundle { bundle }));
        Ok(())
    })
}

/// # Safety
/// `bundle` must come from [`sc_bundle_load`] and not be used afterwards.
#[no_mangle]
pub unsafe extern "C" fn sc_bundle_free(bundle: *mut ScBundle) {
    if !bundle.is_null() {
        drop(Box::from_raw(bundle));
    }
}

/// # Safety
/// `bundle` must be a live handle and `out` a writable pointer.
#[no_mangle]
pub unsafe extern "C" fn sc_bundle_embedding_dim(bundle: *const ScBundle, out: *mut usize) -> ScStatus {
    guard(|| {
        let b = bundle.as_ref().ok_or_else(|| fail(ScStatus::NullPointer, "bundle is NULL"))?;
        out_ptr(out, "out")?;
        *out = b.bundle.embedding_dim;
        Ok(())
    })
}

/// Copies the 13 feature weights into `out`, which must hold `len >= 13`
/// doubles.
///
/// # Safety
/// `bundle` must be a live handle and `out` must point to `len` doubles.
#[no_mangle]
pub unsafe extern "C" fn sc_bundle_weights(bundle: *const ScBundle, out: *mut f64, len: usize) -> ScStatus {
    guard(|| {
        let b = bundle.as_ref().ok_or_else(|| fail(ScStatus::NullPointer, "bundle is NULL"))?;
        out_ptr(out, "out")?;
        if len < NUM_FEATURES {
            return Err(fail(ScStatus::InvalidArgument, format!("need room for {NUM_FEATURES} weights")));
        }
        ptr::copy_nonoverlapping(b.bundle.weights.values().as_ptr(), out, NUM_FEATURES);
        Ok(())
    })
}

/// An online clustering session.
pub struct ScEngine {
    bundle: ModelBundle,
    encoder: SparseEncoder,
    pool: ClusterPool,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ScAssignment {
    pub cluster_id: u64,
    /// 1 when the document opened a new cluster.
    pub created: i32,
    pub c_score: f64,
    pub creation_prob: f64,
}

/// Starts an empty session with a copy of `bundle` and the TF-IDF models in
/// `tfidf_path`.
///
/// # Safety
/// `bundle` must be a live handle, `tfidf_path` a NUL-terminated string and
/// `out` a writable pointer.
#[no_mangle]
pub unsafe extern "C" fn sc_engine_new(
    bundle: *const ScBundle,
    tfidf_path: *const c_char,
    out: *mut *mut ScEngine,
) -> ScStatus {
    guard(|| {
        let b = bundle.as_ref().ok_or_else(|| fail(ScStatus::NullPointer, "bundle is NULL"))?;
        out_ptr(out, "out")?;
        let path = c_str(tfidf_path, "tfidf_path")?;
        let models = lift(load_tfidf(&PathBuf::from(path)))?;
        *out = Box::into_raw(Box::new(ScEngine {
            bundle: b.bundle.clone(),
            encoder: SparseEncoder::Fitted(models),
            pool: ClusterPool::new(),
        }));
        Ok(())
    })
}

/// # Safety
/// `engine` must come from [`sc_engine_new`] and not be used afterwards.
#[no_mangle]
pub unsafe extern "C" fn sc_engine_free(engine: *mut ScEngine) {
    if !engine.is_null() {
        drop(Box::from_raw(engine));
    }
}

/// Clusters one document given as raw text, a Unix timestamp in seconds and
/// its embedding of `dim` floats.
///
/// # Safety
/// Strings must be NUL-terminated, `embedding` must point to `dim` floats and
/// `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn sc_engine_step(
    engine: *mut ScEngine,
    doc_id: *const c_char,
    title: *const c_char,
    body: *const c_char,
    timestamp: i64,
    embedding: *const f32,
    dim: usize,
    out: *mut ScAssignment,
) -> ScStatus {
    guard(|| {
        let e = engine.as_mut().ok_or_else(|| fail(ScStatus::NullPointer, "engine is NULL"))?;
        out_ptr(out, "out")?;
        let doc_id = c_str(doc_id, "doc_id")?;
        let title = c_str(title, "title")?;
        let body = c_str(body, "body")?;
        let vector = slice(embedding, dim, "embedding")?;
        if dim != e.bundle.embedding_dim {
            return Err(fail(
                ScStatus::DimensionMismatch,
                format!("dimension mismatch: expected {}, found {dim}", e.bundle.embedding_dim),
            ));
        }
        let doc = lift(Document::from_text(doc_id, title, body, Timestamp::from_secs(timestamp)))?;
        let mut store = EmbeddingStore::new(dim);
        check(store.insert(doc_id, vector.to_vec()))?;
        let rep = lift(encode_document(&doc, &e.encoder, &store))?;
        let a = lift(e.pool.step_rep(doc_id, &rep, &e.bundle))?;
        *out = ScAssignment {
            cluster_id: a.cluster_id,
            created: a.created as i32,
            c_score: a.c_score,
            creation_prob: a.creation_prob,
        };
        Ok(())
    })
}

/// # Safety
/// `engine` must be a live handle and `out` a writable pointer.
#[no_mangle]
pub unsafe extern "C" fn sc_engine_cluster_count(engine: *const ScEngine, out: *mut usize) -> ScStatus {
    guard(|| {
        let e = engine.as_ref().ok_or_else(|| fail(ScStatus::NullPointer, "engine is NULL"))?;
        out_ptr(out, "out")?;
        *out = e.pool.len();
        Ok(())
    })
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct ScPrf {
    pub precision: f64,
    pub recall: f64,
    pub f1: f64,
}

impl From<Prf> for ScPrf {
    fn from(p: Prf) -> Self {
        ScPrf {
            precision: p.precision,
            recall: p.recall,
            f1: p.f1,
        }
    }
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct ScMetrics {
    pub bcubed: ScPrf,
    pub ceaf_e: ScPrf,
    pub ceaf_m: ScPrf,
    pub muc: ScPrf,
    pub blanc: ScPrf,
    pub homogeneity: f64,
    pub completeness: f64,
    pub v_measure: f64,
    pub adjusted_rand: f64,
    pub adjusted_mutual_information: f64,
    pub fowlkes_mallows: f64,
    pub rand_index: f64,
}

/// Scores a predicted labeling against gold labels over the same `n >= 2`
/// documents. Labels are arbitrary integers.
///
/// # Safety
/// `pred` and `gold` must point to `n` values and `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn sc_evaluate(pred: *const u64, gold: *const u64, n: usize, out: *mut ScMetrics) -> ScStatus {
    guard(|| {
        out_ptr(out, "out")?;
        let p = streamclust::metrics::dense_labels(slice(pred, n, "pred")?);
        let g = streamclust::metrics::dense_labels(slice(gold, n, "gold")?);
        let pair = lift(pairwise_metrics_labels(&p, &g))?;
        let info = lift(info_metrics_labels(&p, &g))?;
        *out = ScMetrics {
            bcubed: lift(bcubed_labels(&p, &g))?.into(),
            ceaf_e: lift(ceaf_labels(&p, &g, CeafMode::Entity))?.into(),
            ceaf_m: lift(ceaf_labels(&p, &g, CeafMode::Mention))?.into(),
            muc: info.muc.into(),
            blanc: pair.blanc.into(),
            homogeneity: info.homogeneity,
            completeness: info.completeness,
            v_measure: info.v_measure,
            adjusted_rand: pair.adjusted_rand,
            adjusted_mutual_information: info.adjusted_mutual_information,
            fowlkes_mallows: pair.fowlkes_mallows,
            rand_index: pair.rand_index,
        };
        Ok(())
    })
}
