//! C ABI for `lattice-stretch`.
//!
//! Every function returns an [`LsStatus`]; results go through out-pointers.
//! Curves and optimum reports are opaque heap handles released with their
//! `_free` function. After a non-`OK` status, [`ls_last_error_message`]
//! describes the failure on the calling thread.

use std::cell::RefCell;
use std::ffi::{c_char, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use lattice_stretch::bounds::{lower_bound_closed, upper_bound_interior};
use lattice_stretch::counting::{count_closed, count_interior, MembershipPolicy};
use lattice_stretch::curve::{make_p_ellipse, CurveModel};
use lattice_stretch::spectra::{
    approximate_product_eigenvalue, minimizing_aspect, rectangle_eigenvalue, SpectrumMode,
};
use lattice_stretch::stretch::{optimize, OptimizeMode, OptimumReport};
use lattice_stretch::Error;

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LsStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidArgument = 2,
    NotApplicable = 3,
    HypothesisUnavailable = 4,
    HypothesisViolated = 5,
    NoLatticePoint = 6,
    Degenerate = 7,
    NumericalFailure = 8,
    Panic = 9,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LsMode {
    MaxInterior = 0,
    MinClosed = 1,
}

/// One component of an optimizer set.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LsInterval {
    pub lo: f64,
    pub hi: f64,
    pub lo_closed: bool,
    pub hi_closed: bool,
}

/// A curve handle.
pub struct LsCurve(CurveModel);

/// An optimum-report handle.
pub struct LsOptimum(OptimumReport);

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_error(msg: String) {
    let c = CString::new(msg.replace('\0', " ")).expect("no interior nul");
    LAST_ERROR.with(|e| *e.borrow_mut() = Some(c));
}

fn status_of(e: &Error) -> LsStatus {
    match e {
        Error::InvalidArgument(_) | Error::TooLarge(_) => LsStatus::InvalidArgument,
        Error::NotApplicable(_) | Error::BracketNotValid { .. } => LsStatus::NotApplicable,
        Error::HypothesisUnavailable(_) => LsStatus::HypothesisUnavailable,
        Error::HypothesisViolated(_) => LsStatus::HypothesisViolated,
        Error::NoLatticePoint { .. } => LsStatus::NoLatticePoint,
        Error::Degenerate(_) | Error::AlreadyBalanced => LsStatus::Degenerate,
        Error::QuadratureNotConverged { .. } | Error::InsufficientData(_) | Error::BracketFailure(_) => {
            LsStatus::NumericalFailure
        }
    }
}

enum Fail {
    Null(&'static str),
    Lib(Error),
}

impl From<Error> for Fail {
    fn from(e: Error) -> Self {
        Fail::Lib(e)
    }
}

fn guard<F: FnOnce() -> Result<(), Fail>>(f: F) -> LsStatus {
    LAST_ERROR.with(|e| *e.borrow_mut() = None);
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => LsStatus::Ok,
        Ok(Err(Fail::Null(what))) => {
            set_error(format!("null pointer passed as {what}"));
            LsStatus::NullPointer
        }
        Ok(Err(Fail::Lib(e))) => {
            set_error(e.to_string());
            status_of(&e)
        }
        Err(_) => {
            set_error("internal panic".into());
            LsStatus::Panic
        }
    }
}

unsafe fn out<'a, T>(p: *mut T, what: &'static str) -> Result<&'a mut T, Fail> {
    p.as_mut().ok_or(Fail::Null(what))
}

unsafe fn handle<'a, T>(p: *const T, what: &'static str) -> Result<&'a T, Fail> {
    p.as_ref().ok_or(Fail::Null(what))
}

fn policy(tol_rel: f64) -> Result<MembershipPolicy, Fail> {
    Ok(MembershipPolicy::new(tol_rel)?)
}

/// Library version as a static nul-terminated string.
#[no_mangle]
pub extern "C" fn ls_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr().cast()
}

/// Message for the last failed call on this thread, or NULL. The pointer is
/// valid until the next call into the library from the same thread.
#[no_mangle]
pub extern "C" fn ls_last_error_message() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(ptr::null(), |c| c.as_ptr()))
}

/// Creates the unit p-circle `xᵖ + yᵖ = 1`.
///
/// # Safety
/// `out_curve` must be valid for writes.
#[no_mangle]
pub unsafe extern "C" fn ls_curve_new_p_ellipse(p: f64, out_curve: *mut *mut LsCurve) -> LsStatus {
    guard(|| {
        let slot = out(out_curve, "out_curve")?;
        *slot = ptr::null_mut();
        let curve = make_p_ellipse(p)?;
        *slot = Box::into_raw(Box::new(LsCurve(curve)));
        Ok(())
    })
}

/// Releases a curve. NULL is ignored.
///
/// # Safety
/// `curve` must come from [`ls_curve_new_p_ellipse`] and not be freed twice.
#[no_mangle]
pub unsafe extern "C" fn ls_curve_free(curve: *mut LsCurve) {
    if !curve.is_null() {
        drop(Box::from_raw(curve));
    }
}

/// # Safety
/// `curve` must be a live handle and `out_area` valid for writes.
#[no_mangle]
pub unsafe extern "C" fn ls_curve_area(curve: *const LsCurve, out_area: *mut f64) -> LsStatus {
    guard(|| {
        let c = handle(curve, "curve")?;
        *out(out_area, "out_area")? = c.0.area();
        Ok(())
    })
}

/// `N(r, s)`: positive-integer points inside or on `rΓ(s)`.
///
/// # Safety
/// `curve` must be a live handle and `out_count` valid for writes.
#[no_mangle]
pub unsafe extern "C" fn ls_count_interior(
    curve: *const LsCurve,
    r: f64,
    s: f64,
    tol_rel: f64,
    out_count: *mut u64,
) -> LsStatus {
    guard(|| {
        let c = handle(curve, "curve")?;
        let slot = out(out_count, "out_count")?;
        *slot = count_interior(&c.0, r, s, policy(tol_rel)?)?;
        Ok(())
    })
}

/// `𝒩(r, s)`: nonnegative-integer points inside or on `rΓ(s)`.
///
/// # Safety
/// `curve` must be a live handle and `out_count` valid for writes.
#[no_mangle]
pub unsafe extern "C" fn ls_count_closed(
    curve: *const LsCurve,
    r: f64,
    s: f64,
    tol_rel: f64,
    out_count: *mut u64,
) -> LsStatus {
    guard(|| {
        let c = handle(curve, "curve")?;
        let slot = out(out_count, "out_count")?;
        *slot = count_closed(&c.0, r, s, policy(tol_rel)?)?;
        Ok(())
    })
}

/// Upper bound on `N(r, s)`; `NOT_APPLICABLE` when `r < 2s/L`.
///
/// # Safety
/// `curve` must be a live handle and `out_bound` valid for writes.
#[no_mangle]
pub unsafe extern "C" fn ls_upper_bound(curve: *const LsCurve, r: f64, s: f64, out_bound: *mut f64) -> LsStatus {
    guard(|| {
        let c = handle(curve, "curve")?;
        let slot = out(out_bound, "out_bound")?;
        *slot = upper_bound_interior(&c.0, r, s)?;
        Ok(())
    })
}

/// Lower bound on `𝒩(r, s)`.
///
/// # Safety
/// `curve` must be a live handle and `out_bound` valid for writes.
#[no_mangle]
pub unsafe extern "C" fn ls_lower_bound(curve: *const LsCurve, r: f64, s: f64, out_bound: *mut f64) -> LsStatus {
    guard(|| {
        let c = handle(curve, "curve")?;
        let slot = out(out_bound, "out_bound")?;
        *slot = lower_bound_closed(&c.0, r, s)?;
        Ok(())
    })
}

/// Optimal stretch set of `curve` at radius `r`.
///
/// # Safety
/// `curve` must be a live handle and `out_optimum` valid for writes.
#[no_mangle]
pub unsafe extern "C" fn ls_optimum_new(
    curve: *const LsCurve,
    r: f64,
    mode: LsMode,
    tol_rel: f64,
    out_optimum: *mut *mut LsOptimum,
) -> LsStatus {
    guard(|| {
        let c = handle(curve, "curve")?;
        let slot = out(out_optimum, "out_optimum")?;
        *slot = ptr::null_mut();
        let mode = match mode {
            LsMode::MaxInterior => OptimizeMode::MaxInterior,
            LsMode::MinClosed => OptimizeMode::MinClosed,
        };
        let rep = optimize(&c.0, r, mode, policy(tol_rel)?)?;
        *slot = Box::into_raw(Box::new(LsOptimum(rep)));
        Ok(())
    })
}

/// Releases an optimum report. NULL is ignored.
///
/// # Safety
/// `optimum` must come from [`ls_optimum_new`] and not be freed twice.
#[no_mangle]
pub unsafe extern "C" fn ls_optimum_free(optimum: *mut LsOptimum) {
    if !optimum.is_null() {
        drop(Box::from_raw(optimum));
    }
}

/// # Safety
/// `optimum` must be a live handle; the out-pointers must be valid for writes.
#[no_mangle]
pub unsafe extern "C" fn ls_optimum_summary(
    optimum: *const LsOptimum,
    out_best_count: *mut u64,
    out_dist_to_one: *mut f64,
    out_witness_s: *mut f64,
    out_interval_count: *mut usize,
) -> LsStatus {
    guard(|| {
        let o = &handle(optimum, "optimum")?.0;
        *out(out_best_count, "out_best_count")? = o.best_count;
        *out(out_dist_to_one, "out_dist_to_one")? = o.dist_to_one;
        *out(out_witness_s, "out_witness_s")? = o.witness_s;
        *out(out_interval_count, "out_interval_count")? = o.optimizer.len();
        Ok(())
    })
}

/// The `index`-th optimizer interval, in increasing order of `s`.
///
/// # Safety
/// `optimum` must be a live handle and `out_interval` valid for writes.
#[no_mangle]
pub unsafe extern "C" fn ls_optimum_interval(
    optimum: *const LsOptimum,
    index: usize,
    out_interval: *mut LsInterval,
) -> LsStatus {
    guard(|| {
        let o = &handle(optimum, "optimum")?.0;
        let slot = out(out_interval, "out_interval")?;
        let iv = o.optimizer.get(index).ok_or_else(|| {
            Error::InvalidArgument(format!("interval index {index} out of range (len {})", o.optimizer.len()))
        })?;
        *slot = LsInterval {
            lo: iv.lo,
            hi: iv.hi,
            lo_closed: iv.lo_closed,
            hi_closed: iv.hi_closed,
        };
        Ok(())
    })
}

/// `λₙ` of the rectangle `(0, π/s) × (0, sπ)`.
///
/// # Safety
/// `out_lambda` must be valid for writes.
#[no_mangle]
pub unsafe extern "C" fn ls_rectangle_eigenvalue(s: f64, n: u64, out_lambda: *mut f64) -> LsStatus {
    guard(|| {
        let slot = out(out_lambda, "out_lambda")?;
        *slot = rectangle_eigenvalue(s, n)?;
        Ok(())
    })
}

/// `n`-th approximate eigenvalue of a product of two `d`-dimensional factors.
///
/// # Safety
/// `out_lambda` must be valid for writes.
#[no_mangle]
pub unsafe extern "C" fn ls_product_eigenvalue(d: u32, s: f64, n: u64, out_lambda: *mut f64) -> LsStatus {
    guard(|| {
        let slot = out(out_lambda, "out_lambda")?;
        *slot = approximate_product_eigenvalue(d, s, n)?;
        Ok(())
    })
}

/// Aspect minimizing `λₙ`. `d = 0` selects the rectangle, `d ≥ 3` the
/// approximate product spectrum.
///
/// # Safety
/// The out-pointers must be valid for writes.
#[no_mangle]
pub unsafe extern "C" fn ls_minimizing_aspect(
    n: u64,
    d: u32,
    out_s_star: *mut f64,
    out_lambda_star: *mut f64,
) -> LsStatus {
    guard(|| {
        let s_slot = out(out_s_star, "out_s_star")?;
        let l_slot = out(out_lambda_star, "out_lambda_star")?;
        let mode = if d == 0 {
            SpectrumMode::Rectangle
        } else {
            SpectrumMode::Product { d }
        };
        let opt = minimizing_aspect(n, mode)?;
        *s_slot = opt.s_star;
        *l_slot = opt.lambda_star;
        Ok(())
    })
}
