//! C ABI over the obstruction-forge library.
//!
//! Models live behind an opaque [`OfModel`] handle. Every call returns an
//! [`OfStatus`]; on anything other than `OF_STATUS_OK` a message is available
//! from [`of_last_error`]. Reports come back as JSON strings owned by the
//! library and must be released with [`of_string_free`].

use std::cell::RefCell;
use std::collections::BTreeMap;
use std::ffi::{c_char, CStr, CString};
use std::panic::{self, AssertUnwindSafe};
use std::ptr;

use obstruction_forge::model::{self, CoverModel};
use obstruction_forge::multicurve::{self, Multicurve};
use obstruction_forge::{decompose, reduction, spectral, weights, Error, Q};
use serde::Serialize;

/// Result codes.
#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum OfStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidUtf8 = 2,
    /// The model text is not well-formed or violates the schema.
    Parse = 3,
    /// An argument or model reference is invalid.
    InvalidInput = 4,
    /// A structural check failed while computing the report.
    CheckFailed = 5,
    /// A panic was caught at the boundary.
    Internal = 6,
}

/// Opaque model handle.
pub struct OfModel {
    model: CoverModel,
}

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_error(msg: impl Into<String>) {
    let msg = msg.into().replace('\0', " ");
    LAST_ERROR.with(|e| *e.borrow_mut() = CString::new(msg).ok());
}

fn status_of(e: &Error) -> OfStatus {
    match e {
        Error::Syntax { .. } | Error::Schema(_) | Error::Dangling { .. } | Error::Duplicate(_) => OfStatus::Parse,
        e if e.is_input() => OfStatus::InvalidInput,
        _ => OfStatus::CheckFailed,
    }
}

fn guard(f: impl FnOnce() -> Result<(), OfStatus>) -> OfStatus {
    LAST_ERROR.with(|e| *e.borrow_mut() = None);
    match panic::catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => OfStatus::Ok,
        Ok(Err(s)) => s,
        Err(_) => {
            set_error("internal panic");
            OfStatus::Internal
        }
    }
}

fn lift<T>(r: obstruction_forge::Result<T>) -> Result<T, OfStatus> {
    r.map_err(|e| {
        set_error(e.to_string());
        status_of(&e)
    })
}

unsafe fn read_str<'a>(p: *const c_char) -> Result<&'a str, OfStatus> {
    if p.is_null() {
        set_error("null string argument");
        return Err(OfStatus::NullPointer);
    }
    CStr::from_ptr(p).to_str().map_err(|_| {
        set_error("string argument is not valid UTF-8");
        OfStatus::InvalidUtf8
    })
}

unsafe fn handle<'a>(m: *const OfModel) -> Result<&'a CoverModel, OfStatus> {
    m.as_ref().map(|h| &h.model).ok_or_else(|| {
        set_error("null model handle");
        OfStatus::NullPointer
    })
}

unsafe fn emit(out: *mut *mut c_char, text: String) -> Result<(), OfStatus> {
    if out.is_null() {
        set_error("null output pointer");
        return Err(OfStatus::NullPointer);
    }
    let c = CString::new(text).map_err(|_| {
        set_error("report contains a NUL byte");
        OfStatus::Internal
    })?;
    *out = c.into_raw();
    Ok(())
}

unsafe fn emit_json<T: Serialize>(out: *mut *mut c_char, value: &T) -> Result<(), OfStatus> {
    let text = serde_json::to_string(value).map_err(|e| {
        set_error(e.to_string());
        OfStatus::Internal
    })?;
    emit(out, text)
}

fn check_tol(tol: f64) -> Result<(), OfStatus> {
    if tol > 0.0 && tol.is_finite() {
        Ok(())
    } else {
        set_error(format!("tolerance must be positive, got {tol}"));
        Err(OfStatus::InvalidInput)
    }
}

/// Message for the last failed call on this thread, or null. The pointer is
/// valid until the next call into the library on the same thread.
#[no_mangle]
pub extern "C" fn of_last_error() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(ptr::null(), |s| s.as_ptr()))
}

/// Releases a string returned by the library. Null is ignored.
///
/// # Safety
/// `s` must come from this library and must not be used afterwards.
#[no_mangle]
pub unsafe extern "C" fn of_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}

/// Library version as a static NUL-terminated string.
#[no_mangle]
pub extern "C" fn of_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr().cast()
}

/// Parses a JSON model. On success `*out` receives a handle to release with
/// [`of_model_free`].
///
/// # Safety
/// `json` must be a NUL-terminated string and `out` a writable pointer.
#[no_mangle]
pub unsafe extern "C" fn of_model_parse(json: *const c_char, out: *mut *mut OfModel) -> OfStatus {
    guard(|| {
        if out.is_null() {
            set_error("null output pointer");
            return Err(OfStatus::NullPointer);
        }
        let model = lift(model::parse_model(read_str(json)?))?;
        *out = Box::into_raw(Box::new(OfModel { model }));
        Ok(())
    })
}

/// # Safety
/// `m` must be null or a handle from [`of_model_parse`] not yet freed.
#[no_mangle]
pub unsafe extern "C" fn of_model_free(m: *mut OfModel) {
    if !m.is_null() {
        drop(Box::from_raw(m));
    }
}

/// Canonical JSON text of the model.
///
/// # Safety
/// `m` must be a live handle and `out` a writable pointer.
#[no_mangle]
pub unsafe extern "C" fn of_model_serialize(m: *const OfModel, out: *mut *mut c_char) -> OfStatus {
    guard(|| emit(out, model::serialize_model(handle(m)?)))
}

/// Static consistency report. `*passed` (if non-null) receives the verdict.
///
/// # Safety
/// `m` must be a live handle and `out` a writable pointer.
#[no_mangle]
pub unsafe extern "C" fn of_validate(m: *const OfModel, cap: usize, out: *mut *mut c_char, passed: *mut bool) -> OfStatus {
    guard(|| {
        let r = model::validate_model(handle(m)?, cap);
        if !passed.is_null() {
            *passed = r.passed();
        }
        emit_json(out, &r)
    })
}

#[derive(Serialize)]
struct GammaReport {
    gamma: Multicurve,
    matrix: spectral::NonnegMatrix,
    contracting: bool,
    contraction_vector: Option<Vec<Q>>,
}

/// Generated curves, their transition matrix and exact contraction verdict.
///
/// # Safety
/// `m` must be a live handle and `out` a writable pointer.
#[no_mangle]
pub unsafe extern "C" fn of_gamma(m: *const OfModel, out: *mut *mut c_char, contracting: *mut bool) -> OfStatus {
    guard(|| {
        let m = handle(m)?;
        let gamma = lift(multicurve::generate_gamma(m))?;
        let matrix = lift(multicurve::transition_matrix(m, &gamma))?;
        let ok = lift(spectral::is_contracting(&matrix))?;
        let contraction_vector = if ok { Some(lift(spectral::contraction_vector(&matrix))?) } else { None };
        if !contracting.is_null() {
            *contracting = ok;
        }
        emit_json(out, &GammaReport { gamma, matrix, contracting: ok, contraction_vector })
    })
}

/// Enumerates stable multicurves. `*obstructed` (if non-null) receives the
/// verdict.
///
/// # Safety
/// `m` must be a live handle and `out` a writable pointer.
#[no_mangle]
pub unsafe extern "C" fn of_obstruction(
    m: *const OfModel,
    cap: usize,
    tol: f64,
    out: *mut *mut c_char,
    obstructed: *mut bool,
) -> OfStatus {
    guard(|| {
        check_tol(tol)?;
        let r = lift(reduction::obstruction(handle(m)?, cap, tol))?;
        if !obstructed.is_null() {
            *obstructed = r.obstructed;
        }
        emit_json(out, &r)
    })
}

/// Piece dynamics, boundary classes and renormalizations.
///
/// # Safety
/// `m` must be a live handle and `out` a writable pointer.
#[no_mangle]
pub unsafe extern "C" fn of_decompose(m: *const OfModel, out: *mut *mut c_char) -> OfStatus {
    guard(|| emit_json(out, &lift(decompose::classify(handle(m)?))?))
}

/// Graphviz text of the piece map.
///
/// # Safety
/// `m` must be a live handle and `out` a writable pointer.
#[no_mangle]
pub unsafe extern "C" fn of_decompose_dot(m: *const OfModel, out: *mut *mut c_char) -> OfStatus {
    guard(|| {
        let m = handle(m)?;
        let d = lift(decompose::piece_dynamics(m))?;
        emit(out, decompose::to_dot(m, &d))
    })
}

/// Reduction identity for a comma-separated multicurve.
///
/// # Safety
/// `m` must be a live handle, `curves` a NUL-terminated string and `out` a
/// writable pointer.
#[no_mangle]
pub unsafe extern "C" fn of_reduce(
    m: *const OfModel,
    curves: *const c_char,
    tol: f64,
    out: *mut *mut c_char,
    passed: *mut bool,
) -> OfStatus {
    guard(|| {
        check_tol(tol)?;
        let m = handle(m)?;
        let c = lift(Multicurve::parse(m, read_str(curves)?))?;
        let r = lift(reduction::verify_reduction_identity(m, &c, tol))?;
        if !passed.is_null() {
            *passed = r.passed();
        }
        emit_json(out, &r)
    })
}

/// Whole-model verdict against the per-cycle verdicts.
///
/// # Safety
/// `m` must be a live handle and `out` a writable pointer.
#[no_mangle]
pub unsafe extern "C" fn of_combine(m: *const OfModel, cap: usize, tol: f64, out: *mut *mut c_char, agree: *mut bool) -> OfStatus {
    guard(|| {
        check_tol(tol)?;
        let r = lift(reduction::check_combination(handle(m)?, cap, tol))?;
        if !agree.is_null() {
            *agree = r.agree;
        }
        emit_json(out, &r)
    })
}

/// Weight pipeline and Grötzsch certificate. `grotzsch_default` may be null;
/// otherwise it is a rational used for annular pieces without a constant.
///
/// # Safety
/// `m` must be a live handle, `grotzsch_default` null or a NUL-terminated
/// string, and `out` a writable pointer.
#[no_mangle]
pub unsafe extern "C" fn of_certify(
    m: *const OfModel,
    grotzsch_default: *const c_char,
    out: *mut *mut c_char,
    passed: *mut bool,
) -> OfStatus {
    guard(|| {
        let m = handle(m)?;
        let mut constants: BTreeMap<String, Q> = m.grotzsch_constants.clone();
        if !grotzsch_default.is_null() {
            constants.insert("default".into(), lift(Q::parse(read_str(grotzsch_default)?))?);
        }
        let r = lift(weights::certify(m, &constants))?;
        if !passed.is_null() {
            *passed = r.passed();
        }
        emit_json(out, &r)
    })
}
