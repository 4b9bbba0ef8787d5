//! C ABI over the theta evaluator and the check suite.
//!
//! Every entry point returns an [`SlStatus`]; on failure the message is kept
//! per thread and read back with [`sl_last_error_message`]. Handles are opaque
//! and released with their `_free` function.

use std::cell::RefCell;
use std::ffi::{c_char, CStr};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use schottky_lab::cliio::{ops_selftest, parse_fixture, run_suite_with_threads, CheckConfig, SuiteReport};
use schottky_lab::theta::{theta_char_detailed, DirectionalJet, HalfCharacteristic, PeriodMatrix, TruncationPolicy};
use schottky_lab::{Error, C64};

/// Status codes returned by every `sl_` function.
#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SlStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidUtf8 = 2,
    /// Malformed fixture or config document.
    Schema = 3,
    /// Period matrix, characteristic, dimension or argument rejected.
    InvalidInput = 4,
    /// Truncation cap, non-convergence or another numerical failure.
    Numerical = 5,
    UnknownCheck = 6,
    Io = 7,
    /// Index past the end of a report.
    OutOfRange = 8,
    Panic = 9,
}

thread_local! {
    static LAST_ERROR: RefCell<String> = const { RefCell::new(String::new()) };
}

fn set_error(msg: String) {
    LAST_ERROR.with(|e| *e.borrow_mut() = msg);
}

fn status_of(e: &Error) -> SlStatus {
    match e {
        Error::SchemaError { .. } => SlStatus::Schema,
        Error::UnknownCheck(_) => SlStatus::UnknownCheck,
        Error::Io(_) => SlStatus::Io,
        Error::NotSquare { .. }
        | Error::AsymmetricInput { .. }
        | Error::NotPositiveDefinite { .. }
        | Error::DimensionMismatch { .. }
        | Error::InvalidCharacteristic
        | Error::InvalidPolicy(_)
        | Error::WrongGenus { .. }
        | Error::InvalidArgument(_)
        | Error::DegenerateQuery(_)
        | Error::InvariantViolation(_) => SlStatus::InvalidInput,
        _ => SlStatus::Numerical,
    }
}

struct Fail(SlStatus, String);

impl From<Error> for Fail {
    fn from(e: Error) -> Self {
        Fail(status_of(&e), e.to_string())
    }
}

fn guard(f: impl FnOnce() -> Result<(), Fail>) -> SlStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => {
            set_error(String::new());
            SlStatus::Ok
        }
        Ok(Err(Fail(s, m))) => {
            set_error(m);
            s
        }
        Err(_) => {
            set_error("panic inside schottky-lab".into());
            SlStatus::Panic
        }
    }
}

fn non_null<T>(p: *const T, name: &str) -> Result<(), Fail> {
    if p.is_null() {
        Err(Fail(SlStatus::NullPointer, format!("{name} is null")))
    } else {
        Ok(())
    }
}

unsafe fn c_str<'a>(p: *const c_char, name: &str) -> Result<&'a str, Fail> {
    non_null(p, name)?;
    CStr::from_ptr(p).to_str().map_err(|e| Fail(SlStatus::InvalidUtf8, format!("{name}: {e}")))
}

unsafe fn complex_slice(p: *const f64, n: usize, name: &str) -> Result<Vec<C64>, Fail> {
    non_null(p, name)?;
    let raw = std::slice::from_raw_parts(p, 2 * n);
    Ok(raw.chunks_exact(2).map(|c| C64::new(c[0], c[1])).collect())
}

/// Copy `s` NUL-terminated into `buf` when it fits; always returns the
/// buffer size needed, terminator included.
unsafe fn write_str(s: &str, buf: *mut c_char, cap: usize) -> usize {
    let need = s.len() + 1;
    if !buf.is_null() && cap >= need {
        ptr::copy_nonoverlapping(s.as_ptr() as *const c_char, buf, s.len());
        *buf.add(s.len()) = 0;
    }
    need
}

/// Validated period matrix.
pub struct SlPeriodMatrix(PeriodMatrix);

/// Sorted reports of one check run.
pub struct SlReport(SuiteReport);

/// Message of the last failed call on this thread, copied into `buf`.
/// Returns the size needed including the terminator.
///
/// # Safety
/// `buf` is null or valid for `cap` bytes.
#[no_mangle]
pub unsafe extern "C" fn sl_last_error_message(buf: *mut c_char, cap: usize) -> usize {
    LAST_ERROR.with(|e| write_str(&e.borrow(), buf, cap))
}

/// Period matrix from `g*g` row-major entries stored as `re, im` pairs.
///
/// # Safety
/// `entries` is valid for `2*g*g` doubles; `out` is a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn sl_period_matrix_new(g: usize, entries: *const f64, out: *mut *mut SlPeriodMatrix) -> SlStatus {
    guard(|| {
        non_null(out, "out")?;
        if g == 0 {
            return Err(Fail(SlStatus::InvalidInput, "genus must be positive".into()));
        }
        let tau = PeriodMatrix::from_flat(g, &complex_slice(entries, g * g, "entries")?)?;
        *out = Box::into_raw(Box::new(SlPeriodMatrix(tau)));
        Ok(())
    })
}

/// Period matrix from a fixture JSON document.
///
/// # Safety
/// `json` is a NUL-terminated string; `out` is a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn sl_period_matrix_from_fixture(json: *const c_char, out: *mut *mut SlPeriodMatrix) -> SlStatus {
    guard(|| {
        non_null(out, "out")?;
        let doc = parse_fixture(c_str(json, "json")?)?;
        *out = Box::into_raw(Box::new(SlPeriodMatrix(doc.tau)));
        Ok(())
    })
}

/// Genus of `tau`, 0 for a null handle.
///
/// # Safety
/// `tau` is null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn sl_period_matrix_genus(tau: *const SlPeriodMatrix) -> usize {
    tau.as_ref().map_or(0, |t| t.0.genus())
}

/// # Safety
/// `tau` is null or a handle not yet freed.
#[no_mangle]
pub unsafe extern "C" fn sl_period_matrix_free(tau: *mut SlPeriodMatrix) {
    if !tau.is_null() {
        drop(Box::from_raw(tau));
    }
}

/// `θ[ε;δ](τ, z)` with the default truncation policy. `z` holds `g` pairs
/// `re, im`; `eps` and `delta` hold `g` entries in {0, 0.5} or are both null.
/// Writes the value to `out[0..2]` and the truncation error bound to
/// `error_bound` when it is not null.
///
/// # Safety
/// Pointers are valid for the sizes above.
#[no_mangle]
pub unsafe extern "C" fn sl_theta_eval(
    tau: *const SlPeriodMatrix,
    z: *const f64,
    eps: *const f64,
    delta: *const f64,
    out: *mut f64,
    error_bound: *mut f64,
) -> SlStatus {
    guard(|| {
        non_null(tau, "tau")?;
        non_null(out, "out")?;
        let tau = &(*tau).0;
        let g = tau.genus();
        let z = complex_slice(z, g, "z")?;
        let chi = match (eps.is_null(), delta.is_null()) {
            (true, true) => HalfCharacteristic::zero(g),
            (false, false) => {
                HalfCharacteristic::new(std::slice::from_raw_parts(eps, g), std::slice::from_raw_parts(delta, g))?
            }
            _ => return Err(Fail(SlStatus::NullPointer, "eps and delta must both be given or both be null".into())),
        };
        let v = theta_char_detailed(tau, &z, &chi, &DirectionalJet::none(), &TruncationPolicy::default())?;
        *out = v.value.re;
        *out.add(1) = v.value.im;
        if !error_bound.is_null() {
            *error_bound = v.error_bound;
        }
        Ok(())
    })
}

/// Run the check described by a JSON config (the CLI `--config` schema) on
/// `threads` workers, 0 for the default pool.
///
/// # Safety
/// `config_json` is a NUL-terminated string; `out` is a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn sl_run_check(config_json: *const c_char, threads: usize, out: *mut *mut SlReport) -> SlStatus {
    guard(|| {
        non_null(out, "out")?;
        let config = CheckConfig::from_json(c_str(config_json, "config_json")?)?;
        let report = run_suite_with_threads(&config, (threads > 0).then_some(threads))?;
        *out = Box::into_raw(Box::new(SlReport(report)));
        Ok(())
    })
}

/// Operator-algebra self-test.
///
/// # Safety
/// `out` is a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn sl_ops_selftest(out: *mut *mut SlReport) -> SlStatus {
    guard(|| {
        non_null(out, "out")?;
        *out = Box::into_raw(Box::new(SlReport(SuiteReport { reports: ops_selftest()? })));
        Ok(())
    })
}

/// Number of cases, 0 for a null handle.
///
/// # Safety
/// `report` is null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn sl_report_len(report: *const SlReport) -> usize {
    report.as_ref().map_or(0, |r| r.0.reports.len())
}

/// 1 when every case passes, 0 otherwise or for a null handle.
///
/// # Safety
/// `report` is null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn sl_report_all_pass(report: *const SlReport) -> i32 {
    report.as_ref().map_or(0, |r| r.0.all_pass() as i32)
}

/// Residual, normalizer, tolerance and pass flag of case `index`.
///
/// # Safety
/// `report` is a live handle; the out pointers are valid.
#[no_mangle]
pub unsafe extern "C" fn sl_report_case(
    report: *const SlReport,
    index: usize,
    residual: *mut f64,
    normalizer: *mut f64,
    tolerance: *mut f64,
    pass: *mut i32,
) -> SlStatus {
    guard(|| {
        non_null(report, "report")?;
        for (p, n) in [(residual, "residual"), (normalizer, "normalizer"), (tolerance, "tolerance")] {
            non_null(p, n)?;
        }
        non_null(pass, "pass")?;
        let report = &*report;
        let r = report
            .0
            .reports
            .get(index)
            .ok_or_else(|| Fail(SlStatus::OutOfRange, format!("case {index} out of range")))?;
        *residual = r.residual;
        *normalizer = r.normalizer;
        *tolerance = r.tolerance;
        *pass = r.pass as i32;
        Ok(())
    })
}

/// CSV text of the report copied into `buf` when it fits. Writes the size
/// needed, terminator included, to `needed`.
///
/// # Safety
/// `report` is a live handle; `buf` is null or valid for `cap` bytes.
#[no_mangle]
pub unsafe extern "C" fn sl_report_csv(report: *const SlReport, buf: *mut c_char, cap: usize, needed: *mut usize) -> SlStatus {
    guard(|| {
        non_null(report, "report")?;
        non_null(needed, "needed")?;
        let report = &*report;
        *needed = write_str(&report.0.to_csv(), buf, cap);
        Ok(())
    })
}

/// # Safety
/// `report` is null or a handle not yet freed.
#[no_mangle]
pub unsafe extern "C" fn sl_report_free(report: *mut SlReport) {
    if !report.is_null() {
        drop(Box::from_raw(report));
    }
}
