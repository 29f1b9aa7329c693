//! C interface to `weaklevy`.
//!
//! Models and path samples are opaque handles created and destroyed through
//! this API. Every fallible function returns a [`WeakLevyStatus`]; on failure
//! a description is available from [`weaklevy_last_error`] on the same thread.

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;
use std::slice;

use weaklevy::charfn::Method;
use weaklevy::simulate::{sample_strong, sample_superposition, sample_weak_marked, PathSample, TimeGrid};
use weaklevy::spec_doc::Model;
use weaklevy::Error;

/// Status codes returned by every fallible function.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum WeakLevyStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidArgument = 2,
    Spec = 3,
    Numerical = 4,
    Panic = 5,
}

/// Simulation scheme selector.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum WeakLevyScheme {
    Superposition = 0,
    Marked = 1,
    Strong = 2,
}

/// Opaque model handle.
pub struct WeakLevyModel {
    model: Model,
}

/// Opaque handle to simulated paths of `(T, Y)`.
pub struct WeakLevyPaths {
    sample: PathSample,
}

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_error(msg: String) {
    let c = CString::new(msg.replace('\0', " ")).expect("interior NULs removed");
    LAST_ERROR.with(|e| *e.borrow_mut() = Some(c));
}

fn fail(status: WeakLevyStatus, msg: impl Into<String>) -> WeakLevyStatus {
    set_error(msg.into());
    status
}

fn from_error(e: Error) -> WeakLevyStatus {
    let status = if e.is_numerical() { WeakLevyStatus::Numerical } else { WeakLevyStatus::Spec };
    fail(status, e.to_string())
}

fn guard<F: FnOnce() -> WeakLevyStatus>(f: F) -> WeakLevyStatus {
    LAST_ERROR.with(|e| *e.borrow_mut() = None);
    catch_unwind(AssertUnwindSafe(f)).unwrap_or_else(|_| fail(WeakLevyStatus::Panic, "internal panic"))
}

unsafe fn input<'a>(p: *const f64, len: usize) -> Option<&'a [f64]> {
    if p.is_null() {
        None
    } else {
        Some(slice::from_raw_parts(p, len))
    }
}

unsafe fn output<'a>(p: *mut f64, len: usize) -> Option<&'a mut [f64]> {
    if p.is_null() {
        None
    } else {
        Some(slice::from_raw_parts_mut(p, len))
    }
}

/// Message of the last failure on this thread, or NULL after a success.
/// The pointer stays valid until the next call into this library on the
/// same thread.
#[no_mangle]
pub extern "C" fn weaklevy_last_error() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(ptr::null(), |c| c.as_ptr()))
}

/// Library version as a static NUL-terminated string.
#[no_mangle]
pub extern "C" fn weaklevy_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr().cast()
}

/// Parses a JSON model document and stores a new handle in `*out`.
///
/// # Safety
/// `json` must be a NUL-terminated UTF-8 string and `out` a valid pointer.
/// The handle must be released with [`weaklevy_model_free`].
#[no_mangle]
pub unsafe extern "C" fn weaklevy_model_from_json(json: *const c_char, out: *mut *mut WeakLevyModel) -> WeakLevyStatus {
    guard(|| {
        if json.is_null() || out.is_null() {
            return fail(WeakLevyStatus::NullPointer, "null argument");
        }
        let text = match CStr::from_ptr(json).to_str() {
            Ok(t) => t,
            Err(_) => return fail(WeakLevyStatus::InvalidArgument, "model document is not UTF-8"),
        };
        match Model::from_json(text) {
            Ok(model) => {
                *out = Box::into_raw(Box::new(WeakLevyModel { model }));
                WeakLevyStatus::Ok
            }
            Err(e) => from_error(e),
        }
    })
}

/// Releases a model handle. NULL is ignored.
///
/// # Safety
/// `model` must come from [`weaklevy_model_from_json`] and not be used afterwards.
#[no_mangle]
pub unsafe extern "C" fn weaklevy_model_free(model: *mut WeakLevyModel) {
    if !model.is_null() {
        drop(Box::from_raw(model));
    }
}

/// Dimension `n` of the model, or 0 for NULL.
///
/// # Safety
/// `model` must be NULL or a live handle.
#[no_mangle]
pub unsafe extern "C" fn weaklevy_model_dim(model: *const WeakLevyModel) -> usize {
    model.as_ref().map_or(0, |m| m.model.dim())
}

/// Exponent of `Y` at `theta` (length `n`).
///
/// # Safety
/// `theta` must hold `len` doubles; `re` and `im` must be writable.
#[no_mangle]
pub unsafe extern "C" fn weaklevy_model_charfn(
    model: *const WeakLevyModel,
    theta: *const f64,
    len: usize,
    re: *mut f64,
    im: *mut f64,
) -> WeakLevyStatus {
    guard(|| {
        let (Some(m), Some(theta)) = (model.as_ref(), input(theta, len)) else {
            return fail(WeakLevyStatus::NullPointer, "null argument");
        };
        if re.is_null() || im.is_null() {
            return fail(WeakLevyStatus::NullPointer, "null output");
        }
        match m.model.exponent(theta) {
            Ok(psi) => {
                *re = psi.re;
                *im = psi.im;
                WeakLevyStatus::Ok
            }
            Err(e) => from_error(e),
        }
    })
}

/// Exponent of `(T, Y)` at `theta = (theta1, theta2)` (length `2n`).
/// `quadrature` selects numerical integration along each ray.
///
/// # Safety
/// `theta` must hold `len` doubles; `re` and `im` must be writable.
#[no_mangle]
pub unsafe extern "C" fn weaklevy_model_joint_charfn(
    model: *const WeakLevyModel,
    theta: *const f64,
    len: usize,
    quadrature: bool,
    re: *mut f64,
    im: *mut f64,
) -> WeakLevyStatus {
    guard(|| {
        let (Some(m), Some(theta)) = (model.as_ref(), input(theta, len)) else {
            return fail(WeakLevyStatus::NullPointer, "null argument");
        };
        if re.is_null() || im.is_null() {
            return fail(WeakLevyStatus::NullPointer, "null output");
        }
        let method = if quadrature { Method::Quadrature } else { Method::Closed };
        match m.model.joint_exponent(theta, method) {
            Ok(psi) => {
                *re = psi.re;
                *im = psi.im;
                WeakLevyStatus::Ok
            }
            Err(e) => from_error(e),
        }
    })
}

/// Per-unit-time moments. Vectors have length `n`, matrices `n*n` in
/// row-major order; `cov_yt[k*n + l]` is `Cov(Y_k, T_l)`.
///
/// # Safety
/// Each output must point to writable storage of the stated length.
#[no_mangle]
pub unsafe extern "C" fn weaklevy_model_moments(
    model: *const WeakLevyModel,
    mean_t: *mut f64,
    cov_t: *mut f64,
    mean_y: *mut f64,
    cov_y: *mut f64,
    cov_yt: *mut f64,
) -> WeakLevyStatus {
    guard(|| {
        let Some(m) = model.as_ref() else {
            return fail(WeakLevyStatus::NullPointer, "null model");
        };
        let n = m.model.dim();
        let outs = (
            output(mean_t, n),
            output(cov_t, n * n),
            output(mean_y, n),
            output(cov_y, n * n),
            output(cov_yt, n * n),
        );
        let (Some(mt), Some(ct), Some(my), Some(cy), Some(cyt)) = outs else {
            return fail(WeakLevyStatus::NullPointer, "null output");
        };
        let r = match m.model.moments() {
            Ok(r) => r,
            Err(e) => return from_error(e),
        };
        mt.copy_from_slice(&r.mean_t);
        my.copy_from_slice(&r.mean_y);
        for (dst, src) in [(ct, &r.cov_t), (cy, &r.cov_y), (cyt, &r.cov_yt)] {
            for (row, values) in src.iter().enumerate() {
                dst[row * n..(row + 1) * n].copy_from_slice(values);
            }
        }
        WeakLevyStatus::Ok
    })
}

/// Simulates `paths` paths on a uniform grid of `steps` steps up to `t_max`.
/// `epsilon <= 0` selects the default cutoffs of the marked scheme and must
/// be used with the other schemes.
///
/// # Safety
/// `model` must be a live handle and `out` a valid pointer. The handle must
/// be released with [`weaklevy_paths_free`].
#[no_mangle]
pub unsafe extern "C" fn weaklevy_simulate(
    model: *const WeakLevyModel,
    scheme: WeakLevyScheme,
    t_max: f64,
    steps: usize,
    paths: usize,
    seed: u64,
    epsilon: f64,
    out: *mut *mut WeakLevyPaths,
) -> WeakLevyStatus {
    guard(|| {
        let Some(m) = model.as_ref() else {
            return fail(WeakLevyStatus::NullPointer, "null model");
        };
        if out.is_null() {
            return fail(WeakLevyStatus::NullPointer, "null output");
        }
        let eps = (epsilon > 0.0).then_some(epsilon);
        if eps.is_some() && scheme != WeakLevyScheme::Marked {
            return fail(WeakLevyStatus::InvalidArgument, "epsilon applies to the marked scheme only");
        }
        let sub = m.model.subordinator();
        let bm = m.model.brownian();
        let result = TimeGrid::uniform(t_max, steps).and_then(|grid| match scheme {
            WeakLevyScheme::Superposition => sample_superposition(&sub, bm, &grid, paths, seed),
            WeakLevyScheme::Marked => sample_weak_marked(&sub, bm, &grid, paths, eps, seed),
            WeakLevyScheme::Strong => sample_strong(&sub, bm, &grid, paths, seed),
        });
        match result {
            Ok(sample) => {
                *out = Box::into_raw(Box::new(WeakLevyPaths { sample }));
                WeakLevyStatus::Ok
            }
            Err(e) => from_error(e),
        }
    })
}

/// Releases a path handle. NULL is ignored.
///
/// # Safety
/// `paths` must come from [`weaklevy_simulate`] and not be used afterwards.
#[no_mangle]
pub unsafe extern "C" fn weaklevy_paths_free(paths: *mut WeakLevyPaths) {
    if !paths.is_null() {
        drop(Box::from_raw(paths));
    }
}

/// Number of paths, time steps (excluding `t = 0`) and dimension.
///
/// # Safety
/// `paths` must be a live handle; the outputs must be writable.
#[no_mangle]
pub unsafe extern "C" fn weaklevy_paths_shape(
    paths: *const WeakLevyPaths,
    n_paths: *mut usize,
    steps: *mut usize,
    dim: *mut usize,
) -> WeakLevyStatus {
    guard(|| {
        let Some(p) = paths.as_ref() else {
            return fail(WeakLevyStatus::NullPointer, "null paths");
        };
        if n_paths.is_null() || steps.is_null() || dim.is_null() {
            return fail(WeakLevyStatus::NullPointer, "null output");
        }
        *n_paths = p.sample.n_paths;
        *steps = p.sample.steps();
        *dim = p.sample.dim;
        WeakLevyStatus::Ok
    })
}

unsafe fn copy_block(src: &[f64], dst: *mut f64, len: usize) -> WeakLevyStatus {
    let Some(dst) = output(dst, len) else {
        return fail(WeakLevyStatus::NullPointer, "null buffer");
    };
    if len != src.len() {
        return fail(WeakLevyStatus::InvalidArgument, format!("buffer holds {len} values, need {}", src.len()));
    }
    dst.copy_from_slice(src);
    WeakLevyStatus::Ok
}

/// Copies the subordinator values, laid out `[path][step][coordinate]`,
/// into `buf` of exactly `paths*steps*dim` doubles.
///
/// # Safety
/// `paths` must be a live handle and `buf` writable for `len` doubles.
#[no_mangle]
pub unsafe extern "C" fn weaklevy_paths_copy_t(paths: *const WeakLevyPaths, buf: *mut f64, len: usize) -> WeakLevyStatus {
    guard(|| match paths.as_ref() {
        Some(p) => copy_block(&p.sample.t_paths, buf, len),
        None => fail(WeakLevyStatus::NullPointer, "null paths"),
    })
}

/// Copies the subordinated values `Y`; layout as in [`weaklevy_paths_copy_t`].
///
/// # Safety
/// `paths` must be a live handle and `buf` writable for `len` doubles.
#[no_mangle]
pub unsafe extern "C" fn weaklevy_paths_copy_y(paths: *const WeakLevyPaths, buf: *mut f64, len: usize) -> WeakLevyStatus {
    guard(|| match paths.as_ref() {
        Some(p) => copy_block(&p.sample.y_paths, buf, len),
        None => fail(WeakLevyStatus::NullPointer, "null paths"),
    })
}
