//! C ABI over the `stanceforest` core.
//!
//! Models and embedding tables are exposed as opaque handles created by
//! `*_load_*` / `sf_model_fit` and released with the matching `*_free`.
//! Fallible calls return an [`SfStatus`]; on failure a description is kept
//! per thread and can be fetched with [`sf_last_error`].
//!
//! Stance labels cross the boundary as their codes: 0 non-conspiracy,
//! 1 discusses, 2 promotes.

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::path::Path;
use std::ptr;
use std::slice;

use stanceforest::embedding::{load_embeddings, read_embeddings};
use stanceforest::forest::{fit_forest, load_model, save_model};
use stanceforest::metrics::{confusion, f1_average, mcc_binary, mcc_multiclass, F1Average};
use stanceforest::{
    ConfusionMatrix, EmbeddingMatrix, Error, ForestModel, ForestParams, MaxFeatures, StanceLabel,
};

#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SfStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidArgument = 2,
    Io = 3,
    Format = 4,
    DimMismatch = 5,
    BufferTooSmall = 6,
    Panic = 7,
}

/// Trained forest. Opaque.
pub struct SfModel(ForestModel);

/// Embedding table read from a `CEV1` file. Opaque.
pub struct SfEmbeddings(EmbeddingMatrix);

/// Forest hyper-parameters. `max_depth` 0 means unlimited; `max_features`
/// 0 means floor(sqrt(dim)).
#[repr(C)]
#[derive(Clone, Copy, Debug)]
pub struct SfForestParams {
    pub n_trees: usize,
    pub max_depth: usize,
    pub min_samples_split: usize,
    pub max_features: usize,
    pub seed: u64,
    pub bootstrap: bool,
}

impl From<SfForestParams> for ForestParams {
    fn from(p: SfForestParams) -> Self {
        ForestParams {
            n_trees: p.n_trees,
            max_depth: (p.max_depth > 0).then_some(p.max_depth),
            min_samples_split: p.min_samples_split,
            max_features: match p.max_features {
                0 => MaxFeatures::Sqrt,
                m => MaxFeatures::Fixed(m),
            },
            seed: p.seed,
            bootstrap: p.bootstrap,
        }
    }
}

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_error(message: String) {
    let c = CString::new(message.replace('\0', " ")).expect("nul bytes removed");
    LAST_ERROR.with(|e| *e.borrow_mut() = Some(c));
}

fn clear_error() {
    LAST_ERROR.with(|e| *e.borrow_mut() = None);
}

fn status_of(e: &Error) -> SfStatus {
    match e.root() {
        Error::Io(_) => SfStatus::Io,
        Error::EmbeddingFormat { .. }
        | Error::ModelFormat { .. }
        | Error::UnsupportedVersion(_)
        | Error::NonFinite { .. }
        | Error::DuplicateEmbeddingId(_)
        | Error::Csv(_) => SfStatus::Format,
        Error::DimMismatch { .. } => SfStatus::DimMismatch,
        _ => SfStatus::InvalidArgument,
    }
}

struct Fail(SfStatus, String);

impl From<Error> for Fail {
    fn from(e: Error) -> Self {
        Fail(status_of(&e), e.to_string())
    }
}

fn null(what: &str) -> Fail {
    Fail(SfStatus::NullPointer, format!("`{what}` is null"))
}

/// Runs `f`, records any failure and turns panics into [`SfStatus::Panic`].
fn guard(f: impl FnOnce() -> Result<(), Fail>) -> SfStatus {
    clear_error();
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => SfStatus::Ok,
        Ok(Err(Fail(status, message))) => {
            set_error(message);
            status
        }
        Err(payload) => {
            let message = payload
                .downcast_ref::<&str>()
                .map(|s| s.to_string())
                .or_else(|| payload.downcast_ref::<String>().cloned())
                .unwrap_or_else(|| "unknown panic".into());
            set_error(format!("panic: {message}"));
            SfStatus::Panic
        }
    }
}

unsafe fn slice_arg<'a, T>(ptr: *const T, len: usize, what: &str) -> Result<&'a [T], Fail> {
    if len == 0 {
        return Ok(&[]);
    }
    if ptr.is_null() {
        return Err(null(what));
    }
    Ok(slice::from_raw_parts(ptr, len))
}

unsafe fn ref_arg<'a, T>(ptr: *const T, what: &str) -> Result<&'a T, Fail> {
    ptr.as_ref().ok_or_else(|| null(what))
}

unsafe fn path_arg<'a>(path: *const c_char) -> Result<&'a Path, Fail> {
    if path.is_null() {
        return Err(null("path"));
    }
    let s = CStr::from_ptr(path)
        .to_str()
        .map_err(|_| Fail(SfStatus::InvalidArgument, "path is not valid UTF-8".into()))?;
    Ok(Path::new(s))
}

unsafe fn put<T>(out: *mut *mut T, value: T) -> Result<(), Fail> {
    if out.is_null() {
        return Err(null("out"));
    }
    *out = Box::into_raw(Box::new(value));
    Ok(())
}

/// Copies `bytes` plus a terminating NUL into `buf`. `needed` (optional)
/// receives the required capacity including the NUL.
unsafe fn copy_out(
    bytes: &[u8],
    buf: *mut c_char,
    cap: usize,
    needed: *mut usize,
) -> Result<(), Fail> {
    let want = bytes.len() + 1;
    if !needed.is_null() {
        *needed = want;
    }
    if cap < want || buf.is_null() {
        return Err(Fail(
            SfStatus::BufferTooSmall,
            format!("buffer holds {cap} bytes, need {want}"),
        ));
    }
    ptr::copy_nonoverlapping(bytes.as_ptr(), buf.cast::<u8>(), bytes.len());
    *buf.add(bytes.len()) = 0;
    Ok(())
}

fn labels_from(codes: &[u8]) -> Result<Vec<StanceLabel>, Fail> {
    codes
        .iter()
        .map(|&c| {
            StanceLabel::from_code(c).ok_or_else(|| {
                Fail(
                    SfStatus::InvalidArgument,
                    format!("invalid stance code {c}"),
                )
            })
        })
        .collect()
}

fn check_dim(model: &ForestModel, dim: usize) -> Result<(), Fail> {
    if dim != model.dim() {
        return Err(Error::DimMismatch {
            expected: model.dim(),
            found: dim,
        }
        .into());
    }
    Ok(())
}

/// Message for the most recent failed call on this thread, or NULL.
/// Valid until the next `sf_*` call on the same thread.
#[no_mangle]
pub extern "C" fn sf_last_error() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(ptr::null(), |c| c.as_ptr()))
}

/// Library version as a static NUL-terminated string.
#[no_mangle]
pub extern "C" fn sf_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr().cast()
}

#[no_mangle]
pub extern "C" fn sf_forest_params_default() -> SfForestParams {
    let d = ForestParams::default();
    SfForestParams {
        n_trees: d.n_trees,
        max_depth: 0,
        min_samples_split: d.min_samples_split,
        max_features: 0,
        seed: d.seed,
        bootstrap: d.bootstrap,
    }
}

/// # Safety
/// `path` must be a NUL-terminated string and `out` a writable pointer.
#[no_mangle]
pub unsafe extern "C" fn sf_model_load_file(
    path: *const c_char,
    out: *mut *mut SfModel,
) -> SfStatus {
    guard(|| {
        let path = path_arg(path)?;
        let bytes = std::fs::read(path).map_err(|e| Error::from(e).at_path(path))?;
        let model = load_model(&bytes).map_err(|e| e.at_path(path))?;
        put(out, SfModel(model))
    })
}

/// # Safety
/// `data` must point to `len` readable bytes and `out` be writable.
#[no_mangle]
pub unsafe extern "C" fn sf_model_load_bytes(
    data: *const u8,
    len: usize,
    out: *mut *mut SfModel,
) -> SfStatus {
    guard(|| {
        let bytes = slice_arg(data, len, "data")?;
        put(out, SfModel(load_model(bytes)?))
    })
}

/// Fits a forest on `n_rows` row-major rows of `dim` floats.
///
/// # Safety
/// `rows` must hold `n_rows * dim` floats, `labels` `n_rows` codes, and
/// `params` may be NULL for defaults.
#[no_mangle]
pub unsafe extern "C" fn sf_model_fit(
    rows: *const f32,
    labels: *const u8,
    n_rows: usize,
    dim: usize,
    params: *const SfForestParams,
    out: *mut *mut SfModel,
) -> SfStatus {
    guard(|| {
        let len = n_rows
            .checked_mul(dim)
            .ok_or_else(|| Fail(SfStatus::InvalidArgument, "n_rows * dim overflows".into()))?;
        let values = slice_arg(rows, len, "rows")?;
        let labels = labels_from(slice_arg(labels, n_rows, "labels")?)?;
        let params: ForestParams = match params.as_ref() {
            Some(p) => (*p).into(),
            None => ForestParams::default(),
        };
        let rows: Vec<&[f32]> = if dim == 0 {
            vec![&[][..]; n_rows]
        } else {
            values.chunks_exact(dim).collect()
        };
        put(out, SfModel(fit_forest(&rows, &labels, &params, None)?))
    })
}

/// Serialises the model as JSON into `buf` (NUL-terminated).
///
/// # Safety
/// `buf` must have room for `cap` bytes; `needed` may be NULL.
#[no_mangle]
pub unsafe extern "C" fn sf_model_to_json(
    model: *const SfModel,
    buf: *mut c_char,
    cap: usize,
    needed: *mut usize,
) -> SfStatus {
    guard(|| {
        let model = ref_arg(model, "model")?;
        copy_out(&save_model(&model.0), buf, cap, needed)
    })
}

/// Feature dimension, or 0 for a NULL handle.
///
/// # Safety
/// `model` must be NULL or a live handle.
#[no_mangle]
pub unsafe extern "C" fn sf_model_dim(model: *const SfModel) -> usize {
    model.as_ref().map_or(0, |m| m.0.dim())
}

/// # Safety
/// `model` must be NULL or a live handle.
#[no_mangle]
pub unsafe extern "C" fn sf_model_n_trees(model: *const SfModel) -> usize {
    model.as_ref().map_or(0, |m| m.0.trees().len())
}

/// # Safety
/// `x` must hold `dim` floats and `out_label` be writable.
#[no_mangle]
pub unsafe extern "C" fn sf_model_predict(
    model: *const SfModel,
    x: *const f32,
    dim: usize,
    out_label: *mut u8,
) -> SfStatus {
    guard(|| {
        let model = &ref_arg(model, "model")?.0;
        check_dim(model, dim)?;
        let x = slice_arg(x, dim, "x")?;
        if out_label.is_null() {
            return Err(null("out_label"));
        }
        *out_label = model.predict(x)?.code();
        Ok(())
    })
}

/// Writes the three class probabilities (vote shares) to `out`.
///
/// # Safety
/// `x` must hold `dim` floats and `out` have room for 3 doubles.
#[no_mangle]
pub unsafe extern "C" fn sf_model_predict_proba(
    model: *const SfModel,
    x: *const f32,
    dim: usize,
    out: *mut f64,
) -> SfStatus {
    guard(|| {
        let model = &ref_arg(model, "model")?.0;
        check_dim(model, dim)?;
        let x = slice_arg(x, dim, "x")?;
        if out.is_null() {
            return Err(null("out"));
        }
        let p = model.predict_proba(x)?;
        ptr::copy_nonoverlapping(p.as_ptr(), out, 3);
        Ok(())
    })
}

/// Labels `n_rows` row-major rows.
///
/// # Safety
/// `rows` must hold `n_rows * dim` floats and `out_labels` `n_rows` bytes.
#[no_mangle]
pub unsafe extern "C" fn sf_model_predict_batch(
    model: *const SfModel,
    rows: *const f32,
    n_rows: usize,
    dim: usize,
    out_labels: *mut u8,
) -> SfStatus {
    guard(|| {
        let model = &ref_arg(model, "model")?.0;
        check_dim(model, dim)?;
        let len = n_rows
            .checked_mul(dim)
            .ok_or_else(|| Fail(SfStatus::InvalidArgument, "n_rows * dim overflows".into()))?;
        let values = slice_arg(rows, len, "rows")?;
        if n_rows == 0 {
            return Ok(());
        }
        if out_labels.is_null() {
            return Err(null("out_labels"));
        }
        let out = slice::from_raw_parts_mut(out_labels, n_rows);
        for (i, slot) in out.iter_mut().enumerate() {
            *slot = model.predict(&values[i * dim..(i + 1) * dim])?.code();
        }
        Ok(())
    })
}

/// # Safety
/// `model` must be NULL or a handle not freed before.
#[no_mangle]
pub unsafe extern "C" fn sf_model_free(model: *mut SfModel) {
    if !model.is_null() {
        drop(Box::from_raw(model));
    }
}

/// # Safety
/// `path` must be a NUL-terminated string and `out` a writable pointer.
#[no_mangle]
pub unsafe extern "C" fn sf_embeddings_load_file(
    path: *const c_char,
    out: *mut *mut SfEmbeddings,
) -> SfStatus {
    guard(|| {
        let path = path_arg(path)?;
        put(out, SfEmbeddings(load_embeddings(path)?))
    })
}

/// # Safety
/// `data` must point to `len` readable bytes and `out` be writable.
#[no_mangle]
pub unsafe extern "C" fn sf_embeddings_read(
    data: *const u8,
    len: usize,
    out: *mut *mut SfEmbeddings,
) -> SfStatus {
    guard(|| {
        let bytes = slice_arg(data, len, "data")?;
        put(out, SfEmbeddings(read_embeddings(bytes)?))
    })
}

/// # Safety
/// `emb` must be NULL or a live handle.
#[no_mangle]
pub unsafe extern "C" fn sf_embeddings_len(emb: *const SfEmbeddings) -> usize {
    emb.as_ref().map_or(0, |e| e.0.len())
}

/// # Safety
/// `emb` must be NULL or a live handle.
#[no_mangle]
pub unsafe extern "C" fn sf_embeddings_dim(emb: *const SfEmbeddings) -> usize {
    emb.as_ref().map_or(0, |e| e.0.dim())
}

/// Variant tag: 0 bert, 1 elmo, 2 combined, 3 synthetic; 255 for NULL.
///
/// # Safety
/// `emb` must be NULL or a live handle.
#[no_mangle]
pub unsafe extern "C" fn sf_embeddings_variant(emb: *const SfEmbeddings) -> u8 {
    emb.as_ref().map_or(u8::MAX, |e| e.0.variant().code())
}

/// Pointer to row `i` (`dim` floats, owned by the handle), or NULL when
/// out of range.
///
/// # Safety
/// `emb` must be NULL or a live handle.
#[no_mangle]
pub unsafe extern "C" fn sf_embeddings_row(emb: *const SfEmbeddings, i: usize) -> *const f32 {
    match emb.as_ref() {
        Some(e) if i < e.0.len() => e.0.row(i).as_ptr(),
        _ => ptr::null(),
    }
}

/// Copies the id of row `i` into `buf` (NUL-terminated).
///
/// # Safety
/// `buf` must have room for `cap` bytes; `needed` may be NULL.
#[no_mangle]
pub unsafe extern "C" fn sf_embeddings_id(
    emb: *const SfEmbeddings,
    i: usize,
    buf: *mut c_char,
    cap: usize,
    needed: *mut usize,
) -> SfStatus {
    guard(|| {
        let emb = &ref_arg(emb, "emb")?.0;
        let id = emb.ids().get(i).ok_or_else(|| {
            Fail(
                SfStatus::InvalidArgument,
                format!("row {i} out of range for {} rows", emb.len()),
            )
        })?;
        copy_out(id.as_bytes(), buf, cap, needed)
    })
}

/// # Safety
/// `emb` must be NULL or a handle not freed before.
#[no_mangle]
pub unsafe extern "C" fn sf_embeddings_free(emb: *mut SfEmbeddings) {
    if !emb.is_null() {
        drop(Box::from_raw(emb));
    }
}

#[no_mangle]
pub extern "C" fn sf_mcc_binary(tp: u64, tn: u64, fp: u64, fn_: u64) -> f64 {
    mcc_binary(tp, tn, fp, fn_)
}

/// Tallies a 3×3 confusion matrix, row-major `[true][predicted]`, into `out`.
///
/// # Safety
/// `y_true` and `y_pred` must hold `n` codes; `out` room for 9 values.
#[no_mangle]
pub unsafe extern "C" fn sf_confusion(
    y_true: *const u8,
    y_pred: *const u8,
    n: usize,
    out: *mut u64,
) -> SfStatus {
    guard(|| {
        let t = labels_from(slice_arg(y_true, n, "y_true")?)?;
        let p = labels_from(slice_arg(y_pred, n, "y_pred")?)?;
        if out.is_null() {
            return Err(null("out"));
        }
        let cm = confusion(&t, &p)?;
        ptr::copy_nonoverlapping(cm.0.as_flattened().as_ptr(), out, 9);
        Ok(())
    })
}

/// Weighted F1, macro F1 and multiclass MCC of a row-major 3×3 matrix.
/// Any output pointer may be NULL.
///
/// # Safety
/// `cm` must hold 9 values.
#[no_mangle]
pub unsafe extern "C" fn sf_scores(
    cm: *const u64,
    f1_weighted: *mut f64,
    f1_macro: *mut f64,
    mcc: *mut f64,
) -> SfStatus {
    guard(|| {
        let v = slice_arg(cm, 9, "cm")?;
        let cm = ConfusionMatrix(std::array::from_fn(|t| {
            std::array::from_fn(|p| v[3 * t + p])
        }));
        if let Some(o) = f1_weighted.as_mut() {
            *o = f1_average(&cm, F1Average::Weighted);
        }
        if let Some(o) = f1_macro.as_mut() {
            *o = f1_average(&cm, F1Average::Macro);
        }
        if let Some(o) = mcc.as_mut() {
            *o = mcc_multiclass(&cm);
        }
        Ok(())
    })
}
