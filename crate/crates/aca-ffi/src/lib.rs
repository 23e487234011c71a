//! C ABI over `aca-core`.
//!
//! Every entry point returns an `AcaStatus` code; `ACA_OK` is zero. The
//! fitted model crosses the boundary as an opaque `AcaModel*` owned by the
//! caller until passed to `aca_model_free`. On any non-OK status a
//! human-readable message is stored in thread-local storage and can be read
//! back with `aca_last_error_message` until the next call on that thread.
//!
//! All matrices are row-major `double` buffers. The caller allocates output
//! buffers; sizes are fixed by the model (`num_components * ambient_dim` for
//! the component matrix, `nrows * num_components` for scores).

use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::path::Path;

use aca_core::depth::{proj_depth, DepthNotion, OptimizerConfig};
use aca_core::subspace::Basis;
use aca_core::{io, AcaModel, DataMatrix, Error};
use nalgebra::DVector;

/// Opaque owner of a fitted model. C callers only ever hold a pointer to it.
pub struct AcaModelHandle {
    inner: AcaModel,
}

/// Status codes mirroring the error classes of the core library. The numeric
/// values match the CLI exit codes for the same failures.
#[repr(C)]
#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum AcaStatus {
    /// Call succeeded.
    Ok = 0,
    /// A required pointer argument was null.
    NullPointer = 1,
    /// Arguments were malformed: bad sizes, a zero component count, an
    /// invalid optimizer setting.
    InvalidInput = 2,
    /// Data rejected: non-finite entries, dimension mismatch, unreadable or
    /// malformed model file.
    DataError = 3,
    /// Numerical failure inside the search.
    NumericError = 4,
    /// The library panicked; the operation did not complete.
    Panic = 5,
}

thread_local! {
    static LAST_ERROR: std::cell::RefCell<CString> =
        std::cell::RefCell::new(CString::default());
}

fn set_error(msg: &str) {
    // Interior NUL bytes cannot survive the C string; replace them.
    let sanitized = msg.replace('\0', "?");
    LAST_ERROR.with(|e| {
        *e.borrow_mut() = CString::new(sanitized).unwrap_or_default();
    });
}

fn clear_error() {
    LAST_ERROR.with(|e| {
        *e.borrow_mut() = CString::default();
    });
}

fn status_of(err: &Error) -> AcaStatus {
    match err {
        Error::InvalidInput(_) => AcaStatus::InvalidInput,
        Error::Data(_) => AcaStatus::DataError,
        Error::Numeric(_) => AcaStatus::NumericError,
    }
}

fn fail(err: &Error) -> AcaStatus {
    set_error(&err.to_string());
    status_of(err)
}

/// Runs `body` with panic isolation so an internal bug cannot unwind across
/// the C boundary.
fn guarded(body: impl FnOnce() -> AcaStatus) -> AcaStatus {
    match catch_unwind(AssertUnwindSafe(body)) {
        Ok(status) => status,
        Err(_) => {
            set_error("internal panic; operation aborted");
            AcaStatus::Panic
        }
    }
}

/// Pointer to the message describing the most recent failure on this thread,
/// or an empty string after a success. The pointer stays valid until the next
/// library call from the same thread.
#[no_mangle]
pub extern "C" fn aca_last_error_message() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ptr())
}

unsafe fn slice_arg<'a>(ptr: *const f64, len: usize) -> Option<&'a [f64]> {
    if ptr.is_null() && len > 0 {
        None
    } else if len == 0 {
        Some(&[])
    } else {
        Some(std::slice::from_raw_parts(ptr, len))
    }
}

unsafe fn data_arg(ptr: *const f64, nrows: usize, ncols: usize) -> Result<DataMatrix, AcaStatus> {
    let Some(len) = nrows.checked_mul(ncols) else {
        set_error("matrix size overflows usize");
        return Err(AcaStatus::InvalidInput);
    };
    let Some(slice) = slice_arg(ptr, len) else {
        set_error("data pointer is null");
        return Err(AcaStatus::NullPointer);
    };
    DataMatrix::from_rows(nrows, ncols, slice).map_err(|e| fail(&e))
}

fn notion_of(asymmetric: i32) -> DepthNotion {
    if asymmetric != 0 {
        DepthNotion::AsymmetricProjection
    } else {
        DepthNotion::Projection
    }
}

fn config_of(budget_k: usize, restarts: usize, seed: u64) -> OptimizerConfig {
    OptimizerConfig {
        budget_k,
        restarts,
        seed,
        ..OptimizerConfig::default()
    }
}

/// Fits an anomaly component model and stores the handle in `*out`.
///
/// `data` holds `nrows * ncols` doubles, row-major. `components` directions
/// are extracted (1 <= components <= ncols). `asymmetric` selects the
/// one-sided depth notion when nonzero. `budget_k` and `restarts` bound the
/// per-query search (pass 1000 and 10 for the defaults); `seed` fixes the
/// whole fit deterministically.
///
/// # Safety
/// `data` must point to `nrows * ncols` readable doubles and `out` must be a
/// valid location to store the handle.
#[no_mangle]
pub unsafe extern "C" fn aca_fit(
    data: *const f64,
    nrows: usize,
    ncols: usize,
    components: usize,
    asymmetric: i32,
    budget_k: usize,
    restarts: usize,
    seed: u64,
    out: *mut *mut AcaModelHandle,
) -> AcaStatus {
    guarded(|| {
        if out.is_null() {
            set_error("out pointer is null");
            return AcaStatus::NullPointer;
        }
        let matrix = match data_arg(data, nrows, ncols) {
            Ok(m) => m,
            Err(status) => return status,
        };
        let config = config_of(budget_k, restarts, seed);
        match aca_core::fit(&matrix, components, notion_of(asymmetric), &config) {
            Ok(model) => {
                *out = Box::into_raw(Box::new(AcaModelHandle { inner: model }));
                clear_error();
                AcaStatus::Ok
            }
            Err(e) => fail(&e),
        }
    })
}

/// Releases a model returned by `aca_fit` or `aca_model_load`. Passing
/// null is a no-op.
///
/// # Safety
/// `model` must be a pointer previously returned by this library and not yet
/// freed.
#[no_mangle]
pub unsafe extern "C" fn aca_model_free(model: *mut AcaModelHandle) {
    if !model.is_null() {
        drop(Box::from_raw(model));
    }
}

/// Number of input variables the model was fitted on, or 0 for null.
///
/// # Safety
/// `model` must be null or a live handle from this library.
#[no_mangle]
pub unsafe extern "C" fn aca_model_ambient_dim(model: *const AcaModelHandle) -> usize {
    if model.is_null() {
        return 0;
    }
    (*model).inner.ambient_dim()
}

/// Number of fitted components, or 0 for null.
///
/// # Safety
/// `model` must be null or a live handle from this library.
#[no_mangle]
pub unsafe extern "C" fn aca_model_num_components(model: *const AcaModelHandle) -> usize {
    if model.is_null() {
        return 0;
    }
    (*model).inner.num_components()
}

/// Copies the component directions into `out`, row-major with one unit
/// direction per row: `num_components * ambient_dim` doubles.
///
/// # Safety
/// `model` must be a live handle and `out` must have room for
/// `num_components * ambient_dim` doubles.
#[no_mangle]
pub unsafe extern "C" fn aca_model_components(
    model: *const AcaModelHandle,
    out: *mut f64,
) -> AcaStatus {
    guarded(|| {
        if model.is_null() || out.is_null() {
            set_error("model or out pointer is null");
            return AcaStatus::NullPointer;
        }
        let model = &(*model).inner;
        let d = model.ambient_dim();
        let dst = std::slice::from_raw_parts_mut(out, model.num_components() * d);
        for (i, dir) in model.components().iter().enumerate() {
            dst[i * d..(i + 1) * d].copy_from_slice(dir.coords().as_slice());
        }
        clear_error();
        AcaStatus::Ok
    })
}

/// Copies the per-component minimized depths into `out`
/// (`num_components` doubles, nondecreasing).
///
/// # Safety
/// `model` must be a live handle and `out` must have room for
/// `num_components` doubles.
#[no_mangle]
pub unsafe extern "C" fn aca_model_min_depths(
    model: *const AcaModelHandle,
    out: *mut f64,
) -> AcaStatus {
    guarded(|| {
        if model.is_null() || out.is_null() {
            set_error("model or out pointer is null");
            return AcaStatus::NullPointer;
        }
        let model = &(*model).inner;
        let dst = std::slice::from_raw_parts_mut(out, model.num_components());
        dst.copy_from_slice(model.min_depths());
        clear_error();
        AcaStatus::Ok
    })
}

/// Projects `nrows` data rows onto the fitted components, writing
/// `nrows * num_components` doubles to `out` (row-major scores).
///
/// # Safety
/// `data` must hold `nrows * ncols` doubles, `out` must have room for
/// `nrows * num_components` doubles, and `model` must be a live handle.
#[no_mangle]
pub unsafe extern "C" fn aca_transform(
    model: *const AcaModelHandle,
    data: *const f64,
    nrows: usize,
    ncols: usize,
    out: *mut f64,
) -> AcaStatus {
    guarded(|| {
        if model.is_null() || out.is_null() {
            set_error("model or out pointer is null");
            return AcaStatus::NullPointer;
        }
        let model = &(*model).inner;
        let matrix = match data_arg(data, nrows, ncols) {
            Ok(m) => m,
            Err(status) => return status,
        };
        match aca_core::transform(model, &matrix) {
            Ok(scores) => {
                let p = model.num_components();
                let dst = std::slice::from_raw_parts_mut(out, nrows * p);
                for i in 0..nrows {
                    for j in 0..p {
                        dst[i * p + j] = scores[(i, j)];
                    }
                }
                clear_error();
                AcaStatus::Ok
            }
            Err(e) => fail(&e),
        }
    })
}

/// Approximate projection depth of one point relative to a dataset, searched
/// over the full ambient space. Writes the depth to `*out_depth` and, when
/// `out_direction` is non-null, the minimizing unit direction to
/// `out_direction[0..ncols]`.
///
/// # Safety
/// `point` must hold `ncols` doubles, `data` must hold `nrows * ncols`
/// doubles, `out_depth` must be writable, and `out_direction` must be null or
/// have room for `ncols` doubles.
#[no_mangle]
pub unsafe extern "C" fn aca_proj_depth(
    point: *const f64,
    data: *const f64,
    nrows: usize,
    ncols: usize,
    asymmetric: i32,
    budget_k: usize,
    restarts: usize,
    seed: u64,
    out_depth: *mut f64,
    out_direction: *mut f64,
) -> AcaStatus {
    guarded(|| {
        if out_depth.is_null() {
            set_error("out_depth pointer is null");
            return AcaStatus::NullPointer;
        }
        let z = match slice_arg(point, ncols) {
            Some(s) => DVector::from_column_slice(s),
            None => {
                set_error("point pointer is null");
                return AcaStatus::NullPointer;
            }
        };
        let matrix = match data_arg(data, nrows, ncols) {
            Ok(m) => m,
            Err(status) => return status,
        };
        let config = config_of(budget_k, restarts, seed);
        let basis = Basis::identity(ncols);
        match proj_depth(&z, &matrix, &basis, notion_of(asymmetric), &config) {
            Ok(result) => {
                *out_depth = result.depth;
                if !out_direction.is_null() {
                    let dst = std::slice::from_raw_parts_mut(out_direction, ncols);
                    dst.copy_from_slice(result.direction.coords().as_slice());
                }
                clear_error();
                AcaStatus::Ok
            }
            Err(e) => fail(&e),
        }
    })
}

unsafe fn path_arg<'a>(ptr: *const c_char) -> Result<&'a Path, AcaStatus> {
    if ptr.is_null() {
        set_error("path pointer is null");
        return Err(AcaStatus::NullPointer);
    }
    match CStr::from_ptr(ptr).to_str() {
        Ok(s) => Ok(Path::new(s)),
        Err(_) => {
            set_error("path is not valid UTF-8");
            Err(AcaStatus::InvalidInput)
        }
    }
}

/// Saves the model as JSON at the NUL-terminated UTF-8 `path`.
///
/// # Safety
/// `model` must be a live handle and `path` a NUL-terminated string.
#[no_mangle]
pub unsafe extern "C" fn aca_model_save(
    model: *const AcaModelHandle,
    path: *const c_char,
) -> AcaStatus {
    guarded(|| {
        if model.is_null() {
            set_error("model pointer is null");
            return AcaStatus::NullPointer;
        }
        let path = match path_arg(path) {
            Ok(p) => p,
            Err(status) => return status,
        };
        match io::save_model(&(*model).inner, path) {
            Ok(()) => {
                clear_error();
                AcaStatus::Ok
            }
            Err(e) => fail(&e),
        }
    })
}

/// Loads a model saved by `aca_model_save` and stores the handle in `*out`.
///
/// # Safety
/// `path` must be a NUL-terminated string and `out` a valid location to
/// store the handle.
#[no_mangle]
pub unsafe extern "C" fn aca_model_load(
    path: *const c_char,
    out: *mut *mut AcaModelHandle,
) -> AcaStatus {
    guarded(|| {
        if out.is_null() {
            set_error("out pointer is null");
            return AcaStatus::NullPointer;
        }
        let path = match path_arg(path) {
            Ok(p) => p,
            Err(status) => return status,
        };
        match io::load_model(path) {
            Ok(model) => {
                *out = Box::into_raw(Box::new(AcaModelHandle { inner: model }));
                clear_error();
                AcaStatus::Ok
            }
            Err(e) => fail(&e),
        }
    })
}
