//! C ABI over the `quasicheese` library.
//!
//! Objects cross the boundary as opaque handles created by `qc_*_new` or
//! `qc_*_build` and released with the matching `qc_*_free`. Every fallible
//! call returns a [`QcStatus`]; on failure `qc_last_error` describes the
//! problem for the calling thread. Strings returned by the library must be
//! released with [`qc_string_free`].

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use num_complex::Complex64;
use quasicheese::cohen::{max_b, verify_cohen_bounds};
use quasicheese::construction::{assemble_construction, ConstructionResult};
use quasicheese::geometry::{AbstractSwissCheese, CheeseIndex, Disk};
use quasicheese::io::{cheese_from_json, cheese_to_json};
use quasicheese::jets::RationalFunction;
use quasicheese::sequences::{dc_partial_sums, Family};
use quasicheese::Error;

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum QcStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidArgument = 2,
    Malformed = 3,
    Io = 4,
    VerificationFailed = 5,
    Pole = 6,
    Internal = 7,
}

/// Opaque cheese handle.
pub struct QcCheese {
    cheese: AbstractSwissCheese,
}

/// Opaque handle for a finished construction and its verification.
pub struct QcConstruction {
    result: ConstructionResult,
}

/// Opaque rational function handle.
pub struct QcRational {
    f: RationalFunction,
}

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_error(msg: impl Into<String>) {
    let text = msg.into().replace('\0', " ");
    LAST_ERROR.with(|e| *e.borrow_mut() = CString::new(text).ok());
}

fn status_of(e: &Error) -> QcStatus {
    match e {
        Error::Io(_) => QcStatus::Io,
        Error::Precondition(_) => QcStatus::InvalidArgument,
        Error::Malformed(_)
        | Error::NonPositiveEntry { .. }
        | Error::ZeroDenominator
        | Error::InvalidSegment { .. }
        | Error::Discontinuous { .. }
        | Error::ConstantPath => QcStatus::Malformed,
        Error::PoleAtPoint(_) | Error::PoleNearContour { .. } | Error::PoleOnSet(_) => QcStatus::Pole,
        _ => QcStatus::VerificationFailed,
    }
}

fn fail(e: Error) -> QcStatus {
    let s = status_of(&e);
    set_error(e.to_string());
    s
}

fn null(what: &str) -> QcStatus {
    set_error(format!("{what} is null"));
    QcStatus::NullPointer
}

/// Runs `body`, turning panics into `Internal`.
fn guard(body: impl FnOnce() -> QcStatus) -> QcStatus {
    match catch_unwind(AssertUnwindSafe(body)) {
        Ok(s) => {
            if s == QcStatus::Ok {
                LAST_ERROR.with(|e| *e.borrow_mut() = None);
            }
            s
        }
        Err(_) => {
            set_error("internal panic");
            QcStatus::Internal
        }
    }
}

fn into_c_string(s: String, out: *mut *mut c_char) -> QcStatus {
    match CString::new(s) {
        Ok(c) => {
            unsafe { *out = c.into_raw() };
            QcStatus::Ok
        }
        Err(_) => {
            set_error("string contains an interior NUL");
            QcStatus::Internal
        }
    }
}

/// Message for the last failed call on this thread, or null. The pointer
/// stays valid until the next failing call on the same thread.
#[no_mangle]
pub extern "C" fn qc_last_error() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(ptr::null(), |c| c.as_ptr()))
}

/// Releases a string returned by this library.
///
/// # Safety
/// `s` must come from this library and not be freed twice.
#[no_mangle]
pub unsafe extern "C" fn qc_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}

/// New cheese with the given outer disk and no holes.
///
/// # Safety
/// `out` must be a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn qc_cheese_new(
    cx: f64,
    cy: f64,
    radius: f64,
    tail_bound: f64,
    out: *mut *mut QcCheese,
) -> QcStatus {
    guard(|| {
        if out.is_null() {
            return null("out");
        }
        match AbstractSwissCheese::new(Disk::new(Complex64::new(cx, cy), radius), Vec::new(), tail_bound) {
            Ok(cheese) => {
                *out = Box::into_raw(Box::new(QcCheese { cheese }));
                QcStatus::Ok
            }
            Err(e) => fail(e),
        }
    })
}

/// Parses a cheese document (UTF-8 JSON).
///
/// # Safety
/// `json` must be a NUL-terminated string and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn qc_cheese_from_json(json: *const c_char, out: *mut *mut QcCheese) -> QcStatus {
    guard(|| {
        if json.is_null() || out.is_null() {
            return null("argument");
        }
        let Ok(text) = CStr::from_ptr(json).to_str() else {
            set_error("cheese document is not UTF-8");
            return QcStatus::Malformed;
        };
        match cheese_from_json(text) {
            Ok(cheese) => {
                *out = Box::into_raw(Box::new(QcCheese { cheese }));
                QcStatus::Ok
            }
            Err(e) => fail(e),
        }
    })
}

/// # Safety
/// `cheese` must be a live handle or null.
#[no_mangle]
pub unsafe extern "C" fn qc_cheese_free(cheese: *mut QcCheese) {
    if !cheese.is_null() {
        drop(Box::from_raw(cheese));
    }
}

/// Appends a hole.
///
/// # Safety
/// `cheese` must be a live handle.
#[no_mangle]
pub unsafe extern "C" fn qc_cheese_add_hole(cheese: *mut QcCheese, cx: f64, cy: f64, radius: f64) -> QcStatus {
    guard(|| {
        let Some(c) = cheese.as_mut() else {
            return null("cheese");
        };
        if !(radius >= 0.0 && radius.is_finite() && cx.is_finite() && cy.is_finite()) {
            set_error(format!("invalid hole ({cx}, {cy}) radius {radius}"));
            return QcStatus::InvalidArgument;
        }
        c.cheese.holes.push(Disk::new(Complex64::new(cx, cy), radius));
        QcStatus::Ok
    })
}

/// # Safety
/// `cheese` must be a live handle or null (gives 0).
#[no_mangle]
pub unsafe extern "C" fn qc_cheese_hole_count(cheese: *const QcCheese) -> usize {
    cheese.as_ref().map_or(0, |c| c.cheese.holes.len())
}

/// Sum of the hole radii plus the tail bound.
///
/// # Safety
/// `cheese` must be a live handle and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn qc_cheese_rho(cheese: *const QcCheese, out: *mut f64) -> QcStatus {
    guard(|| {
        let (Some(c), false) = (cheese.as_ref(), out.is_null()) else {
            return null("argument");
        };
        *out = c.cheese.rho();
        QcStatus::Ok
    })
}

/// Classicality with the given strictness; the worst margin is optional.
///
/// # Safety
/// `cheese` must be a live handle, `classical` valid, `margin` valid or null.
#[no_mangle]
pub unsafe extern "C" fn qc_cheese_is_classical(
    cheese: *const QcCheese,
    strictness_tol: f64,
    classical: *mut bool,
    margin: *mut f64,
) -> QcStatus {
    guard(|| {
        let (Some(c), false) = (cheese.as_ref(), classical.is_null()) else {
            return null("argument");
        };
        let rep = c.cheese.is_classical(strictness_tol);
        *classical = rep.is_classical;
        if let Some(m) = margin.as_mut() {
            *m = rep.worst_containment_margin.min(rep.worst_separation_margin);
        }
        QcStatus::Ok
    })
}

/// Membership of each point `(xs[i], ys[i])`.
///
/// # Safety
/// `xs`, `ys` and `out` must hold `len` elements.
#[no_mangle]
pub unsafe extern "C" fn qc_cheese_contains(
    cheese: *const QcCheese,
    xs: *const f64,
    ys: *const f64,
    len: usize,
    out: *mut bool,
) -> QcStatus {
    guard(|| {
        let Some(c) = cheese.as_ref() else {
            return null("cheese");
        };
        if len > 0 && (xs.is_null() || ys.is_null() || out.is_null()) {
            return null("buffer");
        }
        if len == 0 {
            return QcStatus::Ok;
        }
        let index = CheeseIndex::new(&c.cheese);
        let xs = std::slice::from_raw_parts(xs, len);
        let ys = std::slice::from_raw_parts(ys, len);
        let out = std::slice::from_raw_parts_mut(out, len);
        for i in 0..len {
            out[i] = index.contains(Complex64::new(xs[i], ys[i]));
        }
        QcStatus::Ok
    })
}

/// Cheese document as JSON; free with [`qc_string_free`].
///
/// # Safety
/// `cheese` must be a live handle and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn qc_cheese_to_json(cheese: *const QcCheese, out: *mut *mut c_char) -> QcStatus {
    guard(|| {
        let (Some(c), false) = (cheese.as_ref(), out.is_null()) else {
            return null("argument");
        };
        match cheese_to_json(&c.cheese) {
            Ok(s) => into_c_string(s, out),
            Err(e) => fail(e),
        }
    })
}

/// Runs the annulus construction. A handle is returned even when a
/// verification clause fails; check [`qc_construction_passed`].
///
/// # Safety
/// `out` must be a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn qc_construction_build(
    r: f64,
    eps: f64,
    delta: f64,
    k_probe: usize,
    out: *mut *mut QcConstruction,
) -> QcStatus {
    guard(|| {
        if out.is_null() {
            return null("out");
        }
        match assemble_construction(r, eps, delta, k_probe) {
            Ok(result) => {
                *out = Box::into_raw(Box::new(QcConstruction { result }));
                QcStatus::Ok
            }
            Err(e) => fail(e),
        }
    })
}

/// # Safety
/// `c` must be a live handle or null.
#[no_mangle]
pub unsafe extern "C" fn qc_construction_free(c: *mut QcConstruction) {
    if !c.is_null() {
        drop(Box::from_raw(c));
    }
}

/// # Safety
/// `c` must be a live handle or null (gives false).
#[no_mangle]
pub unsafe extern "C" fn qc_construction_passed(c: *const QcConstruction) -> bool {
    c.as_ref().is_some_and(|c| c.result.verification.passed)
}

/// Copy of the constructed cheese as a separate handle.
///
/// # Safety
/// `c` must be a live handle and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn qc_construction_cheese(c: *const QcConstruction, out: *mut *mut QcCheese) -> QcStatus {
    guard(|| {
        let (Some(c), false) = (c.as_ref(), out.is_null()) else {
            return null("argument");
        };
        *out = Box::into_raw(Box::new(QcCheese {
            cheese: c.result.cheese.clone(),
        }));
        QcStatus::Ok
    })
}

/// Rational function from ascending coefficient arrays (real and imaginary
/// parts separately).
///
/// # Safety
/// Each coefficient array must hold its stated length; `out` must be valid.
#[no_mangle]
pub unsafe extern "C" fn qc_rational_new(
    num_re: *const f64,
    num_im: *const f64,
    num_len: usize,
    den_re: *const f64,
    den_im: *const f64,
    den_len: usize,
    out: *mut *mut QcRational,
) -> QcStatus {
    guard(|| {
        if out.is_null()
            || num_len > 0 && (num_re.is_null() || num_im.is_null())
            || den_len > 0 && (den_re.is_null() || den_im.is_null())
        {
            return null("argument");
        }
        let coeffs = |re: *const f64, im: *const f64, n: usize| -> Vec<Complex64> {
            if n == 0 {
                return Vec::new();
            }
            let re = std::slice::from_raw_parts(re, n);
            let im = std::slice::from_raw_parts(im, n);
            re.iter().zip(im).map(|(&a, &b)| Complex64::new(a, b)).collect()
        };
        match RationalFunction::new(coeffs(num_re, num_im, num_len), coeffs(den_re, den_im, den_len)) {
            Ok(f) => {
                *out = Box::into_raw(Box::new(QcRational { f }));
                QcStatus::Ok
            }
            Err(e) => fail(e),
        }
    })
}

/// # Safety
/// `f` must be a live handle or null.
#[no_mangle]
pub unsafe extern "C" fn qc_rational_free(f: *mut QcRational) {
    if !f.is_null() {
        drop(Box::from_raw(f));
    }
}

/// `f(z), f'(z), ..., f^(order)(z)` into `out_re` / `out_im` (`order + 1` slots).
///
/// # Safety
/// `f` must be a live handle and both buffers must hold `order + 1` values.
#[no_mangle]
pub unsafe extern "C" fn qc_rational_jet(
    f: *const QcRational,
    x: f64,
    y: f64,
    order: usize,
    out_re: *mut f64,
    out_im: *mut f64,
) -> QcStatus {
    guard(|| {
        let Some(f) = f.as_ref() else {
            return null("function");
        };
        if out_re.is_null() || out_im.is_null() {
            return null("buffer");
        }
        match f.f.eval_jet(Complex64::new(x, y), order) {
            Ok(jet) => {
                let re = std::slice::from_raw_parts_mut(out_re, order + 1);
                let im = std::slice::from_raw_parts_mut(out_im, order + 1);
                for (k, v) in jet.values.iter().enumerate() {
                    re[k] = v.re;
                    im[k] = v.im;
                }
                QcStatus::Ok
            }
            Err(e) => fail(e),
        }
    })
}

/// Upper bound for `max B_{j,k}` over `j < k <= k_max`.
///
/// # Safety
/// `out` must be a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn qc_cohen_max_b(alpha: f64, k_max: usize, out: *mut f64) -> QcStatus {
    guard(|| {
        if out.is_null() {
            return null("out");
        }
        match max_b(alpha, k_max) {
            Ok(b) => {
                *out = b.value + b.truncation;
                QcStatus::Ok
            }
            Err(e) => fail(e),
        }
    })
}

/// Whether `max B < 1/2` and the sums `lemma_sum(alpha, n)` stay below 2 up to `k_max`.
///
/// # Safety
/// `passed` must be a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn qc_cohen_verify(alpha: f64, k_max: usize, passed: *mut bool) -> QcStatus {
    guard(|| {
        if passed.is_null() {
            return null("out");
        }
        match verify_cohen_bounds(alpha, k_max) {
            Ok(v) => {
                *passed = v.passed;
                QcStatus::Ok
            }
            Err(e) => fail(e),
        }
    })
}

/// `sum_{n=1}^{horizon} M_n^{-1/n}` for a named family such as `"factorial"`.
///
/// # Safety
/// `family` must be a NUL-terminated string and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn qc_dc_root_sum(family: *const c_char, horizon: usize, out: *mut f64) -> QcStatus {
    guard(|| {
        if family.is_null() || out.is_null() {
            return null("argument");
        }
        let Ok(name) = CStr::from_ptr(family).to_str() else {
            set_error("family name is not UTF-8");
            return QcStatus::Malformed;
        };
        let run = || -> quasicheese::Result<f64> {
            let fam: Family = name.parse()?;
            let m = fam.generate(horizon)?;
            let sums = dc_partial_sums(&m, horizon)?;
            Ok(sums.root_sums.last().copied().unwrap_or(0.0))
        };
        match run() {
            Ok(v) => {
                *out = v;
                QcStatus::Ok
            }
            Err(e) => fail(e),
        }
    })
}
