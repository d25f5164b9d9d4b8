//! C ABI over `conic_condition`.
//!
//! Matrices and reports are opaque handles created and freed through this
//! interface. Fallible calls return a [`ConicStatus`]; the message of the
//! last failure on the calling thread is available from
//! [`conic_last_error_message`].

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::path::Path;
use std::ptr;

use conic_condition::bounds;
use conic_condition::condition::{classify_with, PhaseIStrategy};
use conic_condition::matrix::load_matrix;
use conic_condition::perceptron::{perceptron_solve, SelectionRule, Termination};
use conic_condition::sphere;
use conic_condition::{ConditionReport, Error, FeasibilityClass, UnitRowMatrix};

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ConicStatus {
    Ok = 0,
    InvalidInput = 1,
    DegenerateRow = 2,
    SingularSubset = 3,
    DependentSet = 4,
    NoConvergence = 5,
    Unsupported = 6,
    MomentDivergent = 7,
    InsufficientTailData = 8,
    BudgetExceeded = 9,
    Parse = 10,
    Io = 11,
    NullPointer = 12,
    Panic = 13,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ConicClass {
    StrictlyFeasible = 0,
    Infeasible = 1,
    IllPosedNumerical = 2,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ConicRule {
    FirstViolated = 0,
    MaxViolation = 1,
}

/// Opaque matrix with unit rows.
pub struct ConicMatrix(UnitRowMatrix);

/// Opaque condition report.
pub struct ConicReport(ConditionReport);

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_error(msg: String) {
    let c = CString::new(msg.replace('\0', " ")).unwrap_or_default();
    LAST_ERROR.with(|e| *e.borrow_mut() = Some(c));
}

fn status_of(e: &Error) -> ConicStatus {
    match e {
        Error::InvalidInput(_) => ConicStatus::InvalidInput,
        Error::DegenerateRow { .. } => ConicStatus::DegenerateRow,
        Error::SingularSubset { .. } => ConicStatus::SingularSubset,
        Error::DependentSet { .. } => ConicStatus::DependentSet,
        Error::NoConvergence { .. } => ConicStatus::NoConvergence,
        Error::Unsupported(_) => ConicStatus::Unsupported,
        Error::MomentDivergent { .. } => ConicStatus::MomentDivergent,
        Error::InsufficientTailData(_) => ConicStatus::InsufficientTailData,
        Error::BudgetExceeded(_) => ConicStatus::BudgetExceeded,
        Error::Parse(_) => ConicStatus::Parse,
        Error::Io(_) => ConicStatus::Io,
    }
}

fn guard<F: FnOnce() -> Result<(), ConicStatus>>(f: F) -> ConicStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => ConicStatus::Ok,
        Ok(Err(s)) => s,
        Err(_) => {
            set_error("internal panic".into());
            ConicStatus::Panic
        }
    }
}

fn fail(e: Error) -> ConicStatus {
    let s = status_of(&e);
    set_error(e.to_string());
    s
}

fn null() -> ConicStatus {
    set_error("null pointer argument".into());
    ConicStatus::NullPointer
}

/// Message of the last failed call on this thread, or NULL. The pointer
/// stays valid until the next failing call on the same thread.
#[no_mangle]
pub extern "C" fn conic_last_error_message() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(ptr::null(), |c| c.as_ptr()))
}

/// Library version as a static NUL-terminated string.
#[no_mangle]
pub extern "C" fn conic_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr().cast()
}

/// Builds a matrix from `n * m` row-major values, normalizing every row.
///
/// # Safety
/// `data` must point to `n * m` readable doubles and `out` to a writable
/// handle slot.
#[no_mangle]
pub unsafe extern "C" fn conic_matrix_new(m: usize, n: usize, data: *const f64, out: *mut *mut ConicMatrix) -> ConicStatus {
    guard(|| {
        if data.is_null() || out.is_null() {
            return Err(null());
        }
        let flat = std::slice::from_raw_parts(data, m.checked_mul(n).ok_or_else(|| fail(Error::InvalidInput("size overflow".into())))?);
        let rows: Vec<Vec<f64>> = if m == 0 { Vec::new() } else { flat.chunks(m).map(<[f64]>::to_vec).collect() };
        let a = UnitRowMatrix::normalize_rows(m, &rows).map_err(fail)?;
        *out = Box::into_raw(Box::new(ConicMatrix(a)));
        Ok(())
    })
}

/// Loads a CSV or JSON matrix file.
///
/// # Safety
/// `path` must be a NUL-terminated string and `out` a writable handle slot.
#[no_mangle]
pub unsafe extern "C" fn conic_matrix_load(path: *const c_char, out: *mut *mut ConicMatrix) -> ConicStatus {
    guard(|| {
        if path.is_null() || out.is_null() {
            return Err(null());
        }
        let p = CStr::from_ptr(path).to_str().map_err(|e| fail(Error::InvalidInput(e.to_string())))?;
        let loaded = load_matrix(Path::new(p)).map_err(fail)?;
        *out = Box::into_raw(Box::new(ConicMatrix(loaded.matrix)));
        Ok(())
    })
}

/// # Safety
/// `a` must be NULL or a handle from this library not yet freed.
#[no_mangle]
pub unsafe extern "C" fn conic_matrix_free(a: *mut ConicMatrix) {
    if !a.is_null() {
        drop(Box::from_raw(a));
    }
}

/// # Safety
/// `a` must be a live matrix handle; `m` and `n` may be NULL.
#[no_mangle]
pub unsafe extern "C" fn conic_matrix_dims(a: *const ConicMatrix, m: *mut usize, n: *mut usize) -> ConicStatus {
    guard(|| {
        let a = a.as_ref().ok_or_else(null)?;
        if let Some(m) = m.as_mut() {
            *m = a.0.m();
        }
        if let Some(n) = n.as_mut() {
            *n = a.0.n();
        }
        Ok(())
    })
}

/// Classifies the system and computes its condition number. `exhaustive`
/// forces the full subset scan on the infeasible side.
///
/// # Safety
/// `a` must be a live matrix handle and `out` a writable handle slot.
#[no_mangle]
pub unsafe extern "C" fn conic_classify(a: *const ConicMatrix, exhaustive: bool, out: *mut *mut ConicReport) -> ConicStatus {
    guard(|| {
        let a = a.as_ref().ok_or_else(null)?;
        if out.is_null() {
            return Err(null());
        }
        let strategy = if exhaustive { PhaseIStrategy::Exhaustive } else { PhaseIStrategy::Auto };
        let r = classify_with(&a.0, strategy).map_err(fail)?;
        *out = Box::into_raw(Box::new(ConicReport(r)));
        Ok(())
    })
}

/// # Safety
/// `r` must be NULL or a handle from this library not yet freed.
#[no_mangle]
pub unsafe extern "C" fn conic_report_free(r: *mut ConicReport) {
    if !r.is_null() {
        drop(Box::from_raw(r));
    }
}

/// # Safety
/// `r` must be a live report handle.
#[no_mangle]
pub unsafe extern "C" fn conic_report_class(r: *const ConicReport) -> ConicClass {
    match (*r).0.class {
        FeasibilityClass::StrictlyFeasible => ConicClass::StrictlyFeasible,
        FeasibilityClass::Infeasible => ConicClass::Infeasible,
        FeasibilityClass::IllPosedNumerical => ConicClass::IllPosedNumerical,
    }
}

/// `theta(A)` in radians.
///
/// # Safety
/// `r` must be a live report handle.
#[no_mangle]
pub unsafe extern "C" fn conic_report_theta(r: *const ConicReport) -> f64 {
    (*r).0.theta.value()
}

/// The condition number; `INFINITY` for ill-posed systems.
///
/// # Safety
/// `r` must be a live report handle.
#[no_mangle]
pub unsafe extern "C" fn conic_report_cond(r: *const ConicReport) -> f64 {
    (*r).0.cond.as_f64()
}

/// Copies the witness cap center (length m) into `buf`.
///
/// # Safety
/// `r` must be a live report handle and `buf` must hold `len` doubles.
#[no_mangle]
pub unsafe extern "C" fn conic_report_center(r: *const ConicReport, buf: *mut f64, len: usize) -> ConicStatus {
    guard(|| {
        let r = r.as_ref().ok_or_else(null)?;
        if buf.is_null() {
            return Err(null());
        }
        let c = &r.0.witness.center;
        if len < c.len() {
            return Err(fail(Error::InvalidInput(format!("buffer holds {len} values, center has {}", c.len()))));
        }
        ptr::copy_nonoverlapping(c.as_ptr(), buf, c.len());
        Ok(())
    })
}

/// The report as JSON; free the string with [`conic_string_free`].
///
/// # Safety
/// `r` must be a live report handle and `out` a writable pointer slot.
#[no_mangle]
pub unsafe extern "C" fn conic_report_to_json(r: *const ConicReport, out: *mut *mut c_char) -> ConicStatus {
    guard(|| {
        let r = r.as_ref().ok_or_else(null)?;
        if out.is_null() {
            return Err(null());
        }
        let s = serde_json::to_string(&r.0).map_err(|e| fail(e.into()))?;
        *out = CString::new(s).map_err(|e| fail(Error::InvalidInput(e.to_string())))?.into_raw();
        Ok(())
    })
}

/// Parses a JSON report.
///
/// # Safety
/// `json` must be a NUL-terminated string and `out` a writable handle slot.
#[no_mangle]
pub unsafe extern "C" fn conic_report_from_json(json: *const c_char, out: *mut *mut ConicReport) -> ConicStatus {
    guard(|| {
        if json.is_null() || out.is_null() {
            return Err(null());
        }
        let s = CStr::from_ptr(json).to_str().map_err(|e| fail(Error::InvalidInput(e.to_string())))?;
        let r: ConditionReport = serde_json::from_str(s).map_err(|e| fail(e.into()))?;
        *out = Box::into_raw(Box::new(ConicReport(r)));
        Ok(())
    })
}

/// # Safety
/// `s` must be NULL or a string returned by this library not yet freed.
#[no_mangle]
pub unsafe extern "C" fn conic_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}

/// Checks a report against its matrix; writes the verdict to `valid`.
///
/// # Safety
/// `a` and `r` must be live handles and `valid` writable.
#[no_mangle]
pub unsafe extern "C" fn conic_verify(a: *const ConicMatrix, r: *const ConicReport, valid: *mut bool) -> ConicStatus {
    guard(|| {
        let (a, r) = (a.as_ref().ok_or_else(null)?, r.as_ref().ok_or_else(null)?);
        let v = valid.as_mut().ok_or_else(null)?;
        *v = conic_condition::verify_report(&a.0, &r.0);
        Ok(())
    })
}

/// Runs the perceptron for at most `cap` updates. `solution` (length m) may
/// be NULL; it is written only when the run solved the system.
///
/// # Safety
/// `a` must be a live matrix handle, `iterations` and `solved` writable, and
/// `solution` NULL or room for m doubles.
#[no_mangle]
pub unsafe extern "C" fn conic_perceptron(
    a: *const ConicMatrix,
    cap: u64,
    rule: ConicRule,
    iterations: *mut u64,
    solved: *mut bool,
    solution: *mut f64,
) -> ConicStatus {
    guard(|| {
        let a = a.as_ref().ok_or_else(null)?;
        let (it, ok) = (iterations.as_mut().ok_or_else(null)?, solved.as_mut().ok_or_else(null)?);
        let rule = match rule {
            ConicRule::FirstViolated => SelectionRule::FirstViolated,
            ConicRule::MaxViolation => SelectionRule::MaxViolation,
        };
        let t = perceptron_solve(&a.0, cap, rule);
        *it = t.iterations;
        *ok = t.terminated == Termination::Solved;
        if let (Some(x), false) = (&t.solution, solution.is_null()) {
            ptr::copy_nonoverlapping(x.as_ptr(), solution, x.len());
        }
        Ok(())
    })
}

fn write_out(out: *mut f64, v: conic_condition::Result<f64>) -> ConicStatus {
    guard(|| {
        // SAFETY: callers pass NULL or a writable double
        let o = unsafe { out.as_mut() }.ok_or_else(null)?;
        *o = v.map_err(fail)?;
        Ok(())
    })
}

/// Normalized measure of a cap of angular radius `rho` on the sphere in R^m.
///
/// # Safety
/// `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn conic_cap_measure(m: usize, rho: f64, out: *mut f64) -> ConicStatus {
    write_out(out, sphere::cap_measure(m, rho))
}

/// `I_m(rho)`, the integral of `sin^m` over `[0, rho]`.
///
/// # Safety
/// `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn conic_sin_power_integral(m: i64, rho: f64, out: *mut f64) -> ConicStatus {
    write_out(out, sphere::sin_power_integral(m, rho))
}

/// Clamped upper bound on `P[C(A) >= t]`.
///
/// # Safety
/// `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn conic_upper_tail_bound(m: usize, n: usize, t: f64, out: *mut f64) -> ConicStatus {
    write_out(out, bounds::upper_tail_bound(m, n, t).map(|b| b.value()))
}

/// Upper bound on `E[log C(A)]`.
///
/// # Safety
/// `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn conic_mean_bound(m: usize, n: usize, out: *mut f64) -> ConicStatus {
    write_out(out, bounds::mean_bound(m, n))
}

/// Upper bound on `E[C(A)^gamma]` for `0 < gamma < 1`.
///
/// # Safety
/// `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn conic_moment_bound_cori(m: usize, n: usize, gamma: f64, out: *mut f64) -> ConicStatus {
    write_out(out, bounds::moment_bound_cori(m, n, gamma))
}
