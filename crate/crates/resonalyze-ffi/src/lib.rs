//! C ABI for the resonalyze library.
//!
//! Conventions:
//! - Every fallible call returns an `RzStatus`; `RZ_OK` (0) means success.
//! - Handles (`RzForcing`, `RzClassification`, `RzSolver`) are opaque and
//!   must be released with the matching `_free` function exactly once.
//! - On failure the thread-local error message is available through
//!   `rz_last_error_message` (free the string with `rz_string_free`).
//! - Out-parameters are written only on `RZ_OK`.
//!
//! The generated header lives at `include/resonalyze.h`.

use libc::{c_char, c_int};
use resonalyze::classifier::{classify, resonance_witness, Classification, ClassifyOptions};
use resonalyze::error::Error;
use resonalyze::exactnum::ScaledReal;
use resonalyze::forcing::PeriodicForcing;
use resonalyze::oscillator::{DuhamelSolver, OscillatorConfig};
use resonalyze::scenario::{build_forcing, ForcingSpec};
use std::cell::RefCell;
use std::ffi::{CStr, CString};
use std::ptr;

/// Status codes shared by every fallible entry point.
#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum RzStatus {
    RzOk = 0,
    RzNullPointer = 1,
    RzInvalidUtf8 = 2,
    RzInvalidArgument = 3,
    RzInvalidState = 4,
    RzInsufficientData = 5,
    RzNotApplicable = 6,
    RzNoExactRepresentation = 7,
    RzAccuracyFailure = 8,
    RzPoleProximity = 9,
    RzUnsupported = 10,
}

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_error(msg: String) {
    let c = CString::new(msg).unwrap_or_else(|_| CString::new("invalid error text").unwrap());
    LAST_ERROR.with(|slot| *slot.borrow_mut() = Some(c));
}

fn fail(status: RzStatus, msg: String) -> RzStatus {
    set_error(msg);
    status
}

fn fail_with(err: Error) -> RzStatus {
    let status = match &err {
        Error::InvalidArgument(_) => RzStatus::RzInvalidArgument,
        Error::InvalidState(_) => RzStatus::RzInvalidState,
        Error::InsufficientData(_) => RzStatus::RzInsufficientData,
        Error::NotApplicable(_) => RzStatus::RzNotApplicable,
        Error::NoExactRepresentation { .. } => RzStatus::RzNoExactRepresentation,
        Error::AccuracyFailure { .. } => RzStatus::RzAccuracyFailure,
        Error::PoleProximity { .. } => RzStatus::RzPoleProximity,
        Error::UnsupportedCombination(_) => RzStatus::RzUnsupported,
    };
    fail(status, err.to_string())
}

/// Periodic forcing handle.
pub struct RzForcing {
    inner: PeriodicForcing,
}

/// Classification result handle.
pub struct RzClassification {
    inner: Classification,
    omega0: ScaledReal,
}

/// Exact solution evaluator handle.
pub struct RzSolver {
    inner: DuhamelSolver,
}

unsafe fn parse_scaled(text: *const c_char, what: &str) -> Result<ScaledReal, RzStatus> {
    if text.is_null() {
        return Err(fail(RzStatus::RzNullPointer, format!("{what} is NULL")));
    }
    let s = match CStr::from_ptr(text).to_str() {
        Ok(s) => s,
        Err(_) => return Err(fail(RzStatus::RzInvalidUtf8, format!("{what} is not UTF-8"))),
    };
    s.parse::<ScaledReal>().map_err(fail_with)
}

/// Last error message for this thread, or NULL when no error occurred.
/// The caller owns the returned string and must free it with
/// `rz_string_free`.
#[no_mangle]
pub extern "C" fn rz_last_error_message() -> *mut c_char {
    LAST_ERROR.with(|slot| match slot.borrow().as_ref() {
        Some(msg) => msg.clone().into_raw(),
        None => ptr::null_mut(),
    })
}

/// Release a string returned by this library.
///
/// # Safety
/// `s` must be a pointer previously returned by a `resonalyze` function, or
/// NULL, and must not have been freed already.
#[no_mangle]
pub unsafe extern "C" fn rz_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}

/// Build a forcing from its JSON description, e.g.
/// `{"builtin": "triangle", "params": {"period": "4"}}` or a piecewise
/// `{"period": ..., "segments": [...]}` object (the scenario `forcing`
/// field schema).
///
/// # Safety
/// `spec_json` must be a valid NUL-terminated string and `out` a valid
/// pointer; the handle written to `*out` must be freed with
/// `rz_forcing_free`.
#[no_mangle]
pub unsafe extern "C" fn rz_forcing_from_json(
    spec_json: *const c_char,
    out: *mut *mut RzForcing,
) -> RzStatus {
    if spec_json.is_null() || out.is_null() {
        return fail(RzStatus::RzNullPointer, "spec_json and out must be non-NULL".into());
    }
    let text = match CStr::from_ptr(spec_json).to_str() {
        Ok(s) => s,
        Err(_) => return fail(RzStatus::RzInvalidUtf8, "spec_json is not UTF-8".into()),
    };
    let spec: ForcingSpec = match serde_json::from_str(text) {
        Ok(s) => s,
        Err(e) => return fail(RzStatus::RzInvalidArgument, format!("forcing spec: {e}")),
    };
    match build_forcing(&spec) {
        Ok(f) => {
            *out = Box::into_raw(Box::new(RzForcing { inner: f }));
            RzStatus::RzOk
        }
        Err(e) => fail_with(e),
    }
}

/// Evaluate the periodic extension at time t >= 0.
///
/// # Safety
/// `f` must be a live forcing handle and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn rz_forcing_evaluate(
    f: *const RzForcing,
    t: f64,
    out: *mut f64,
) -> RzStatus {
    if f.is_null() || out.is_null() {
        return fail(RzStatus::RzNullPointer, "forcing handle and out must be non-NULL".into());
    }
    *out = (*f).inner.evaluate(t);
    RzStatus::RzOk
}

/// Minimal period of the forcing, as a float.
///
/// # Safety
/// `f` must be a live forcing handle and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn rz_forcing_period(f: *const RzForcing, out: *mut f64) -> RzStatus {
    if f.is_null() || out.is_null() {
        return fail(RzStatus::RzNullPointer, "forcing handle and out must be non-NULL".into());
    }
    *out = (*f).inner.period_f64();
    RzStatus::RzOk
}

/// Upper bound on sup |f| over one period.
///
/// # Safety
/// `f` must be a live forcing handle and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn rz_forcing_sup_norm(f: *const RzForcing, out: *mut f64) -> RzStatus {
    if f.is_null() || out.is_null() {
        return fail(RzStatus::RzNullPointer, "forcing handle and out must be non-NULL".into());
    }
    *out = (*f).inner.sup_norm();
    RzStatus::RzOk
}

/// # Safety
/// `f` must come from `rz_forcing_from_json` and not be freed twice.
#[no_mangle]
pub unsafe extern "C" fn rz_forcing_free(f: *mut RzForcing) {
    if !f.is_null() {
        drop(Box::from_raw(f));
    }
}

/// Classify the zero-data response for natural frequency `omega0_text`
/// (ScaledReal text like "1/2*pi"). `q_tol <= 0` selects the default 1e-9.
///
/// # Safety
/// `f` must be a live forcing handle, `omega0_text` a valid string, and
/// `out` a valid pointer; the handle written to `*out` must be freed with
/// `rz_classification_free`.
#[no_mangle]
pub unsafe extern "C" fn rz_classify(
    f: *const RzForcing,
    omega0_text: *const c_char,
    q_tol: f64,
    out: *mut *mut RzClassification,
) -> RzStatus {
    if f.is_null() || out.is_null() {
        return fail(RzStatus::RzNullPointer, "forcing handle and out must be non-NULL".into());
    }
    let omega0 = match parse_scaled(omega0_text, "omega0") {
        Ok(v) => v,
        Err(status) => return status,
    };
    let mut opts = ClassifyOptions::default();
    if q_tol > 0.0 {
        opts.q_tol = q_tol;
    }
    match classify(&(*f).inner, &omega0, &opts) {
        Ok(c) => {
            *out = Box::into_raw(Box::new(RzClassification { inner: c, omega0 }));
            RzStatus::RzOk
        }
        Err(e) => fail_with(e),
    }
}

/// Theorem case id (1..=4), or 0 for a NULL handle.
///
/// # Safety
/// `c` must be a live classification handle or NULL.
#[no_mangle]
pub unsafe extern "C" fn rz_classification_case(c: *const RzClassification) -> c_int {
    if c.is_null() {
        return 0;
    }
    (*c).inner.case_id as c_int
}

/// Full classification report as a JSON string; free with `rz_string_free`.
/// Returns NULL for a NULL handle.
///
/// # Safety
/// `c` must be a live classification handle or NULL.
#[no_mangle]
pub unsafe extern "C" fn rz_classification_json(c: *const RzClassification) -> *mut c_char {
    if c.is_null() {
        return ptr::null_mut();
    }
    let text = (*c).inner.to_json().to_string();
    CString::new(text).map_or(ptr::null_mut(), CString::into_raw)
}

/// A time t1 with |x(t1)| > level, valid for resonant (case 4) results.
///
/// # Safety
/// `f` and `c` must be live handles (the same forcing the classification
/// came from) and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn rz_resonance_witness(
    f: *const RzForcing,
    c: *const RzClassification,
    level: f64,
    out: *mut f64,
) -> RzStatus {
    if f.is_null() || c.is_null() || out.is_null() {
        return fail(RzStatus::RzNullPointer, "handles and out must be non-NULL".into());
    }
    match resonance_witness(&(*f).inner, &(*c).omega0, &(*c).inner, level) {
        Ok(t1) => {
            *out = t1;
            RzStatus::RzOk
        }
        Err(e) => fail_with(e),
    }
}

/// # Safety
/// `c` must come from `rz_classify` and not be freed twice.
#[no_mangle]
pub unsafe extern "C" fn rz_classification_free(c: *mut RzClassification) {
    if !c.is_null() {
        drop(Box::from_raw(c));
    }
}

/// Exact undamped solver for initial data (x0, x1).
///
/// # Safety
/// `f` must be a live forcing handle, `omega0_text` a valid string, and
/// `out` a valid pointer; the handle written to `*out` must be freed with
/// `rz_solver_free`.
#[no_mangle]
pub unsafe extern "C" fn rz_solver_new(
    f: *const RzForcing,
    omega0_text: *const c_char,
    x0: f64,
    x1: f64,
    out: *mut *mut RzSolver,
) -> RzStatus {
    if f.is_null() || out.is_null() {
        return fail(RzStatus::RzNullPointer, "forcing handle and out must be non-NULL".into());
    }
    let omega0 = match parse_scaled(omega0_text, "omega0") {
        Ok(v) => v,
        Err(status) => return status,
    };
    let cfg = match OscillatorConfig::undamped(omega0, x0, x1) {
        Ok(c) => c,
        Err(e) => return fail_with(e),
    };
    match DuhamelSolver::new((*f).inner.clone(), &cfg) {
        Ok(s) => {
            *out = Box::into_raw(Box::new(RzSolver { inner: s }));
            RzStatus::RzOk
        }
        Err(e) => fail_with(e),
    }
}

/// Exact (x, xdot) at time t >= 0; O(1) in the elapsed period count.
///
/// # Safety
/// `s` must be a live solver handle; `x` and `xdot` valid pointers.
#[no_mangle]
pub unsafe extern "C" fn rz_solver_solve(
    s: *const RzSolver,
    t: f64,
    x: *mut f64,
    xdot: *mut f64,
) -> RzStatus {
    if s.is_null() || x.is_null() || xdot.is_null() {
        return fail(RzStatus::RzNullPointer, "solver handle and outs must be non-NULL".into());
    }
    let (xv, vv) = (*s).inner.solve_at(t);
    *x = xv;
    *xdot = vv;
    RzStatus::RzOk
}

/// # Safety
/// `s` must come from `rz_solver_new` and not be freed twice.
#[no_mangle]
pub unsafe extern "C" fn rz_solver_free(s: *mut RzSolver) {
    if !s.is_null() {
        drop(Box::from_raw(s));
    }
}
