//! C ABI over the incidence lab.
//!
//! Everything crosses the boundary through opaque handles and status codes,
//! so bindings never depend on Rust layout. Reports come back as
//! heap-allocated C strings (JSON lines, same schema as the CLI) that the
//! caller releases with `lab_string_free`. Failing calls store a message
//! retrievable with `lab_last_error` until the next failure on the same
//! thread. The generated header lands in `include/incidence_lab.h`.

use std::cell::RefCell;
use std::ffi::{CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::sync::Arc;

use libc::c_char;

use incidence_lab::cayley::{self, SpectrumReport};
use incidence_lab::error::LabError;
use incidence_lab::ffield::FieldCtx;
use incidence_lab::harness::{self, ExperimentConfig};
use incidence_lab::incidence::{self, SpectrumTheoremVerdict};
use incidence_lab::polyspace::{PolySpace, SupportDescriptor};
use incidence_lab::report::write_jsonl;
use incidence_lab::Budget;

/// Status code of every fallible call.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LabStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidArgument = 2,
    BudgetExceeded = 3,
    HypothesesNotMet = 4,
    Unsupported = 5,
    /// A verification ran to completion and found a violated bound.
    BoundViolated = 6,
    InternalError = 7,
}

thread_local! {
    static LAST_ERROR: RefCell<CString> = RefCell::new(CString::default());
}

fn set_error(msg: String) {
    let msg = CString::new(msg).unwrap_or_else(|_| CString::new("invalid error text").unwrap());
    LAST_ERROR.with(|slot| *slot.borrow_mut() = msg);
}

fn status_of(err: &LabError) -> LabStatus {
    match err {
        LabError::InvalidParameter(_) | LabError::CyclotomicOrderMismatch { .. } => {
            LabStatus::InvalidArgument
        }
        LabError::SizeLimit { .. } => LabStatus::BudgetExceeded,
        LabError::HypothesesNotMet(_) => LabStatus::HypothesesNotMet,
        LabError::Unsupported(_) => LabStatus::Unsupported,
        LabError::Io(_) | LabError::Json(_) => LabStatus::InvalidArgument,
    }
}

fn fail(err: LabError) -> LabStatus {
    let status = status_of(&err);
    set_error(err.to_string());
    status
}

fn guarded(body: impl FnOnce() -> LabStatus) -> LabStatus {
    match catch_unwind(AssertUnwindSafe(body)) {
        Ok(status) => status,
        Err(_) => {
            set_error("internal panic".into());
            LabStatus::InternalError
        }
    }
}

unsafe fn write_handle<T>(out: *mut *mut T, value: T) -> LabStatus {
    if out.is_null() {
        set_error("null output pointer".into());
        return LabStatus::NullPointer;
    }
    unsafe { *out = Box::into_raw(Box::new(value)) };
    LabStatus::Ok
}

unsafe fn write_string(out: *mut *mut c_char, text: String) -> LabStatus {
    if out.is_null() {
        set_error("null output pointer".into());
        return LabStatus::NullPointer;
    }
    match CString::new(text) {
        Ok(s) => {
            unsafe { *out = s.into_raw() };
            LabStatus::Ok
        }
        Err(_) => {
            set_error("report contained an interior NUL".into());
            LabStatus::InternalError
        }
    }
}

unsafe fn read_str<'a>(ptr: *const c_char) -> Result<&'a str, LabStatus> {
    if ptr.is_null() {
        set_error("null string argument".into());
        return Err(LabStatus::NullPointer);
    }
    unsafe { CStr::from_ptr(ptr) }.to_str().map_err(|_| {
        set_error("argument is not valid UTF-8".into());
        LabStatus::InvalidArgument
    })
}

/// Opaque field handle.
pub struct LabField {
    ctx: Arc<FieldCtx>,
}

/// Opaque polynomial-space handle.
pub struct LabSpace {
    space: PolySpace,
}

/// Opaque spectrum handle: eigenvalue data plus the prediction verdict when
/// the space satisfies the star condition.
pub struct LabSpectrum {
    report: SpectrumReport,
    verdict: Option<SpectrumTheoremVerdict>,
}

/// Message of the most recent failure on this thread. The pointer stays
/// valid until the next failing call on the same thread.
#[no_mangle]
pub extern "C" fn lab_last_error() -> *const c_char {
    LAST_ERROR.with(|slot| slot.borrow().as_ptr())
}

/// Builds GF(p^s) with its built-in modulus (p ≤ 13, s ≤ 4).
///
/// # Safety
/// `out` must be a valid pointer to a `LabField*` slot.
#[no_mangle]
pub unsafe extern "C" fn lab_field_new(p: u32, s: u32, out: *mut *mut LabField) -> LabStatus {
    guarded(|| match FieldCtx::new(p, s) {
        Ok(ctx) => unsafe { write_handle(out, LabField { ctx: Arc::new(ctx) }) },
        Err(e) => fail(e),
    })
}

/// Builds GF(p^s) from `len` modulus coefficients, constant term first.
///
/// # Safety
/// `coeffs` must point to `len` readable `uint32_t`; `out` as above.
#[no_mangle]
pub unsafe extern "C" fn lab_field_with_modulus(
    p: u32,
    s: u32,
    coeffs: *const u32,
    len: usize,
    out: *mut *mut LabField,
) -> LabStatus {
    guarded(|| {
        if coeffs.is_null() {
            set_error("null modulus pointer".into());
            return LabStatus::NullPointer;
        }
        let modulus = unsafe { std::slice::from_raw_parts(coeffs, len) }.to_vec();
        match FieldCtx::with_modulus(p, s, modulus) {
            Ok(ctx) => unsafe { write_handle(out, LabField { ctx: Arc::new(ctx) }) },
            Err(e) => fail(e),
        }
    })
}

/// Field order q, or 0 for a null handle.
///
/// # Safety
/// `field` must be null or a live handle from `lab_field_new`.
#[no_mangle]
pub unsafe extern "C" fn lab_field_order(field: *const LabField) -> u64 {
    if field.is_null() {
        return 0;
    }
    unsafe { &*field }.ctx.q()
}

/// # Safety
/// `field` must be a handle from `lab_field_new`, not yet freed.
#[no_mangle]
pub unsafe extern "C" fn lab_field_free(field: *mut LabField) {
    if !field.is_null() {
        drop(unsafe { Box::from_raw(field) });
    }
}

/// Builds a polynomial space over the field from a support descriptor:
/// `"full:m,r"`, `"x1-shifted:m,r"`, or `{"m":…,"exponents":[[…]]}`.
///
/// # Safety
/// `field` must be a live field handle; `descriptor` a NUL-terminated
/// string; `out` a valid slot.
#[no_mangle]
pub unsafe extern "C" fn lab_space_new(
    field: *const LabField,
    descriptor: *const c_char,
    out: *mut *mut LabSpace,
) -> LabStatus {
    guarded(|| {
        if field.is_null() {
            set_error("null field handle".into());
            return LabStatus::NullPointer;
        }
        let text = match unsafe { read_str(descriptor) } {
            Ok(t) => t,
            Err(status) => return status,
        };
        let desc = if text.trim_start().starts_with('{') {
            match serde_json::from_str::<SupportDescriptor>(text) {
                Ok(d) => d,
                Err(e) => return fail(LabError::InvalidParameter(format!("bad support: {e}"))),
            }
        } else {
            SupportDescriptor::Preset(text.to_string())
        };
        let ctx = Arc::clone(&unsafe { &*field }.ctx);
        let support = match desc.build() {
            Ok(s) => s,
            Err(e) => return fail(e),
        };
        match PolySpace::new(ctx, support, Budget::default()) {
            Ok(space) => unsafe { write_handle(out, LabSpace { space }) },
            Err(e) => fail(e),
        }
    })
}

/// # Safety
/// `space` must be null or a live space handle.
#[no_mangle]
pub unsafe extern "C" fn lab_space_dim(space: *const LabSpace) -> u32 {
    if space.is_null() {
        return 0;
    }
    unsafe { &*space }.space.dim() as u32
}

/// # Safety
/// `space` must be null or a live space handle.
#[no_mangle]
pub unsafe extern "C" fn lab_space_size(space: *const LabSpace) -> u64 {
    if space.is_null() {
        return 0;
    }
    unsafe { &*space }.space.size()
}

/// 1 when the star condition holds, 0 when it fails, -1 for null.
///
/// # Safety
/// `space` must be null or a live space handle.
#[no_mangle]
pub unsafe extern "C" fn lab_space_has_star(space: *const LabSpace) -> i32 {
    if space.is_null() {
        return -1;
    }
    unsafe { &*space }.space.has_property_star().holds() as i32
}

/// Human-readable space summary; free with `lab_string_free`.
///
/// # Safety
/// `space` must be a live space handle; `out` a valid slot.
#[no_mangle]
pub unsafe extern "C" fn lab_space_describe(
    space: *const LabSpace,
    out: *mut *mut c_char,
) -> LabStatus {
    guarded(|| {
        if space.is_null() {
            set_error("null space handle".into());
            return LabStatus::NullPointer;
        }
        let sp = &unsafe { &*space }.space;
        let ctx = sp.ctx();
        let star = sp.has_property_star();
        let text = format!(
            "GF({}) = GF({}^{}), m = {}, dim V = {}, |V| = {}, star: {}",
            ctx.q(),
            ctx.p(),
            ctx.s(),
            sp.m(),
            sp.dim(),
            sp.size(),
            star.describe()
        );
        unsafe { write_string(out, text) }
    })
}

/// # Safety
/// `space` must be a handle from `lab_space_new`, not yet freed.
#[no_mangle]
pub unsafe extern "C" fn lab_space_free(space: *mut LabSpace) {
    if !space.is_null() {
        drop(unsafe { Box::from_raw(space) });
    }
}

/// Computes the incidence-graph spectrum of the space. When the star
/// condition holds, the handle also carries the exact comparison against the
/// predicted three-eigenvalue multiset.
///
/// # Safety
/// `space` must be a live space handle; `out` a valid slot.
#[no_mangle]
pub unsafe extern "C" fn lab_spectrum_compute(
    space: *const LabSpace,
    out: *mut *mut LabSpectrum,
) -> LabStatus {
    guarded(|| {
        if space.is_null() {
            set_error("null space handle".into());
            return LabStatus::NullPointer;
        }
        let sp = &unsafe { &*space }.space;
        let conn = match incidence::incidence_connection(sp) {
            Ok(c) => c,
            Err(e) => return fail(e),
        };
        let report = match cayley::spectrum(&conn, &sp.budget()) {
            Ok(r) => r,
            Err(e) => return fail(e),
        };
        let verdict = if sp.has_property_star().holds() {
            match incidence::spectrum_comparison(sp, &conn, &report) {
                Ok(v) => Some(v),
                Err(e) => return fail(e),
            }
        } else {
            None
        };
        unsafe { write_handle(out, LabSpectrum { report, verdict }) }
    })
}

/// Largest non-trivial eigenvalue in absolute value; NaN for null.
///
/// # Safety
/// `spectrum` must be null or a live spectrum handle.
#[no_mangle]
pub unsafe extern "C" fn lab_spectrum_lambda(spectrum: *const LabSpectrum) -> f64 {
    if spectrum.is_null() {
        return f64::NAN;
    }
    unsafe { &*spectrum }.report.lambda
}

/// Number of distinct eigenvalues.
///
/// # Safety
/// `spectrum` must be null or a live spectrum handle.
#[no_mangle]
pub unsafe extern "C" fn lab_spectrum_distinct_count(spectrum: *const LabSpectrum) -> usize {
    if spectrum.is_null() {
        return 0;
    }
    unsafe { &*spectrum }.report.multiset.len()
}

/// Distinct eigenvalue `index` as (re, im) with its multiplicity.
///
/// # Safety
/// `spectrum` must be a live handle; the three output pointers must be
/// valid or null (null outputs are skipped).
#[no_mangle]
pub unsafe extern "C" fn lab_spectrum_entry(
    spectrum: *const LabSpectrum,
    index: usize,
    out_re: *mut f64,
    out_im: *mut f64,
    out_multiplicity: *mut u64,
) -> LabStatus {
    guarded(|| {
        if spectrum.is_null() {
            set_error("null spectrum handle".into());
            return LabStatus::NullPointer;
        }
        let report = &unsafe { &*spectrum }.report;
        let Some((value, mult)) = report.multiset.get(index) else {
            set_error(format!("eigenvalue index {index} out of range"));
            return LabStatus::InvalidArgument;
        };
        let z = value.to_complex();
        unsafe {
            if !out_re.is_null() {
                *out_re = z.re;
            }
            if !out_im.is_null() {
                *out_im = z.im;
            }
            if !out_multiplicity.is_null() {
                *out_multiplicity = *mult;
            }
        }
        LabStatus::Ok
    })
}

/// 1 when the computed multiset and eigencharacters match the prediction,
/// 0 when they deviate, -1 when no prediction applies (no star condition).
///
/// # Safety
/// `spectrum` must be null or a live spectrum handle.
#[no_mangle]
pub unsafe extern "C" fn lab_spectrum_matches_prediction(spectrum: *const LabSpectrum) -> i32 {
    if spectrum.is_null() {
        return -1;
    }
    match &unsafe { &*spectrum }.verdict {
        Some(v) => v.holds() as i32,
        None => -1,
    }
}

/// # Safety
/// `spectrum` must be a handle from `lab_spectrum_compute`, not yet freed.
#[no_mangle]
pub unsafe extern "C" fn lab_spectrum_free(spectrum: *mut LabSpectrum) {
    if !spectrum.is_null() {
        drop(unsafe { Box::from_raw(spectrum) });
    }
}

/// Runs verification suites from an experiment config (JSON, same schema as
/// the CLI) or the built-in default grid when `config_json` is null. Writes
/// the JSON-lines report to `out_report`. Returns Ok when every verdict
/// holds and BoundViolated when some bound fails.
///
/// # Safety
/// `config_json` must be null or a NUL-terminated string; `out_report` a
/// valid slot. Free the report with `lab_string_free`.
#[no_mangle]
pub unsafe extern "C" fn lab_verify(
    config_json: *const c_char,
    out_report: *mut *mut c_char,
) -> LabStatus {
    guarded(|| {
        let config: ExperimentConfig = if config_json.is_null() {
            harness::default_config()
        } else {
            let text = match unsafe { read_str(config_json) } {
                Ok(t) => t,
                Err(status) => return status,
            };
            match serde_json::from_str(text) {
                Ok(c) => c,
                Err(e) => return fail(LabError::InvalidParameter(format!("bad config: {e}"))),
            }
        };
        let outcome = match harness::execute(&config) {
            Ok(o) => o,
            Err(e) => return fail(e),
        };
        let mut buf = Vec::new();
        if let Err(e) = write_jsonl(&outcome.rows, &mut buf) {
            return fail(e);
        }
        let text = String::from_utf8(buf).expect("reports are UTF-8");
        let status = unsafe { write_string(out_report, text) };
        if status != LabStatus::Ok {
            return status;
        }
        if outcome.all_hold {
            LabStatus::Ok
        } else {
            set_error("at least one verdict failed; see the report".into());
            LabStatus::BoundViolated
        }
    })
}

/// Releases a string returned by this library.
///
/// # Safety
/// `s` must be null or a string returned by this library, not yet freed.
#[no_mangle]
pub unsafe extern "C" fn lab_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(unsafe { CString::from_raw(s) });
    }
}
