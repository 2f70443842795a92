//! C ABI over `cauchy-coeffs`.
//!
//! Every function returns a [`CcStatus`]; outputs go through pointers. On a
//! non-zero status the message is available from [`cc_last_error`] on the
//! same thread until the next failing call. Handles are opaque and must be
//! released with the matching `*_free`.

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use cauchy_coeffs::analytic::{Atom, BoundaryMeasure, TaylorSeries};
use cauchy_coeffs::bloch::{bloch_norm, DiskGrid};
use cauchy_coeffs::experiments::{run_config_json, Overrides, RunError};
use cauchy_coeffs::innerouter::{clark_b_from_mu, kernel_identity_grid};
use cauchy_coeffs::majorants::Majorant;
use cauchy_coeffs::orlicz::{conjugate_at, orlicz_norm, YoungFunction};
use cauchy_coeffs::{Error, C64};

#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum CcStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidUtf8 = 2,
    Schema = 3,
    Io = 4,
    Panic = 5,
    Domain = 10,
    Precondition = 11,
    Range = 12,
    Construction = 13,
    Division = 14,
    Singularity = 15,
    Geometry = 16,
    DegreeCap = 17,
    Resource = 18,
    Unsupported = 19,
    Invalid = 20,
}

impl From<&Error> for CcStatus {
    fn from(e: &Error) -> Self {
        match e {
            Error::Domain(_) => CcStatus::Domain,
            Error::Precondition(_) => CcStatus::Precondition,
            Error::Range(_) => CcStatus::Range,
            Error::Construction { .. } => CcStatus::Construction,
            Error::Division(_) => CcStatus::Division,
            Error::Singularity(_) => CcStatus::Singularity,
            Error::Geometry(_) => CcStatus::Geometry,
            Error::DegreeCap(_) => CcStatus::DegreeCap,
            Error::Resource(_) => CcStatus::Resource,
            Error::Unsupported(_) => CcStatus::Unsupported,
            Error::Invalid(_) => CcStatus::Invalid,
        }
    }
}

/// Opaque Young function.
pub struct CcYoung(YoungFunction);
/// Opaque Taylor polynomial.
pub struct CcSeries(TaylorSeries);
/// Opaque majorant `w`.
pub struct CcMajorant(Majorant);

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_error(status: CcStatus, msg: impl Into<String>) -> CcStatus {
    let msg = CString::new(msg.into().replace('\0', " ")).unwrap_or_default();
    LAST_ERROR.with(|e| *e.borrow_mut() = Some(msg));
    status
}

fn fail(e: Error) -> CcStatus {
    set_error(CcStatus::from(&e), e.to_string())
}

/// Runs `f`, turning panics into [`CcStatus::Panic`].
fn guard(f: impl FnOnce() -> CcStatus) -> CcStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(s) => s,
        Err(p) => {
            let msg = p
                .downcast_ref::<&str>()
                .map(|s| s.to_string())
                .or_else(|| p.downcast_ref::<String>().cloned())
                .unwrap_or_else(|| "panic".into());
            set_error(CcStatus::Panic, msg)
        }
    }
}

macro_rules! nonnull {
    ($($p:expr),+) => {
        $(if $p.is_null() {
            return set_error(CcStatus::NullPointer, concat!("null pointer: ", stringify!($p)));
        })+
    };
}

unsafe fn write_handle<T>(out: *mut *mut T, v: T) -> CcStatus {
    *out = Box::into_raw(Box::new(v));
    CcStatus::Ok
}

unsafe fn complex_slice(re: *const f64, im: *const f64, len: usize) -> Vec<C64> {
    (0..len)
        .map(|i| C64::new(*re.add(i), if im.is_null() { 0.0 } else { *im.add(i) }))
        .collect()
}

unsafe fn free_handle<T>(h: *mut T) {
    if !h.is_null() {
        drop(Box::from_raw(h));
    }
}

/// Message of the last failure on this thread, or null. The pointer stays
/// valid until the next failing call on the same thread.
#[no_mangle]
pub extern "C" fn cc_last_error() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(ptr::null(), |s| s.as_ptr()))
}

/// Library version as a static NUL-terminated string.
#[no_mangle]
pub extern "C" fn cc_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr().cast()
}

/// `Φ(t) = t^p`, `p ≥ 1`.
///
/// # Safety
/// `out` must be a valid pointer to writable storage for one handle.
#[no_mangle]
pub unsafe extern "C" fn cc_young_power(p: f64, out: *mut *mut CcYoung) -> CcStatus {
    nonnull!(out);
    guard(|| match YoungFunction::power(p) {
        Ok(f) => write_handle(out, CcYoung(f)),
        Err(e) => fail(e),
    })
}

/// `Φ(t) = t^p·ln(e + 1/t)^q`.
///
/// # Safety
/// `out` must be a valid pointer to writable storage for one handle.
#[no_mangle]
pub unsafe extern "C" fn cc_young_power_log(p: f64, q: f64, out: *mut *mut CcYoung) -> CcStatus {
    nonnull!(out);
    guard(|| match YoungFunction::power_log(p, q) {
        Ok(f) => write_handle(out, CcYoung(f)),
        Err(e) => fail(e),
    })
}

/// # Safety
/// `h` must be null or a handle from a `cc_young_*` constructor not yet freed.
#[no_mangle]
pub unsafe extern "C" fn cc_young_free(h: *mut CcYoung) {
    free_handle(h)
}

/// `Φ(x)`.
///
/// # Safety
/// `h` must be a live handle and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn cc_young_eval(h: *const CcYoung, x: f64, out: *mut f64) -> CcStatus {
    nonnull!(h, out);
    guard(|| match (*h).0.eval(x) {
        Ok(v) => {
            *out = v;
            CcStatus::Ok
        }
        Err(e) => fail(e),
    })
}

/// `Φ*(x) = sup_y (xy − Φ(y))`.
///
/// # Safety
/// `h` must be a live handle and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn cc_young_conjugate(h: *const CcYoung, x: f64, out: *mut f64) -> CcStatus {
    nonnull!(h, out);
    guard(|| match conjugate_at(&(*h).0, x) {
        Ok(v) => {
            *out = v;
            CcStatus::Ok
        }
        Err(e) => fail(e),
    })
}

/// Luxemburg norm of the complex vector `re + i·im`; `im` may be null.
///
/// # Safety
/// `re` (and `im` when non-null) must point to `len` readable doubles.
#[no_mangle]
pub unsafe extern "C" fn cc_orlicz_norm(
    h: *const CcYoung,
    re: *const f64,
    im: *const f64,
    len: usize,
    out: *mut f64,
) -> CcStatus {
    nonnull!(h, out);
    if len > 0 {
        nonnull!(re);
    }
    guard(|| {
        let a = complex_slice(re, im, len);
        *out = orlicz_norm(&a, &(*h).0);
        CcStatus::Ok
    })
}

/// Polynomial with coefficients `re[n] + i·im[n]`; `im` may be null.
///
/// # Safety
/// `re` (and `im` when non-null) must point to `len` readable doubles; `out`
/// must be writable.
#[no_mangle]
pub unsafe extern "C" fn cc_series_new(
    re: *const f64,
    im: *const f64,
    len: usize,
    out: *mut *mut CcSeries,
) -> CcStatus {
    nonnull!(out);
    if len > 0 {
        nonnull!(re);
    }
    guard(|| match TaylorSeries::new(complex_slice(re, im, len)) {
        Ok(s) => write_handle(out, CcSeries(s)),
        Err(e) => fail(e),
    })
}

/// # Safety
/// `h` must be null or a handle from [`cc_series_new`] not yet freed.
#[no_mangle]
pub unsafe extern "C" fn cc_series_free(h: *mut CcSeries) {
    free_handle(h)
}

/// # Safety
/// `h` must be a live handle.
#[no_mangle]
pub unsafe extern "C" fn cc_series_degree(h: *const CcSeries) -> usize {
    if h.is_null() {
        return 0;
    }
    (*h).0.degree()
}

/// `f(z)` for `z = re + i·im`.
///
/// # Safety
/// `h` must be a live handle; `out_re`, `out_im` writable.
#[no_mangle]
pub unsafe extern "C" fn cc_series_eval(
    h: *const CcSeries,
    re: f64,
    im: f64,
    out_re: *mut f64,
    out_im: *mut f64,
) -> CcStatus {
    nonnull!(h, out_re, out_im);
    guard(|| {
        let v = (*h).0.eval(C64::new(re, im));
        *out_re = v.re;
        *out_im = v.im;
        CcStatus::Ok
    })
}

/// `w(t) = t^a` on dyadic nodes `2^{-k}`, `k ≤ k_max`.
///
/// # Safety
/// `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn cc_majorant_power(a: f64, k_max: usize, out: *mut *mut CcMajorant) -> CcStatus {
    nonnull!(out);
    guard(|| match Majorant::power(a, k_max) {
        Ok(w) => write_handle(out, CcMajorant(w)),
        Err(e) => fail(e),
    })
}

/// `w ≡ c`.
///
/// # Safety
/// `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn cc_majorant_constant(c: f64, k_max: usize, out: *mut *mut CcMajorant) -> CcStatus {
    nonnull!(out);
    guard(|| match Majorant::constant(c, k_max) {
        Ok(w) => write_handle(out, CcMajorant(w)),
        Err(e) => fail(e),
    })
}

/// # Safety
/// `h` must be null or a handle from a `cc_majorant_*` constructor not yet freed.
#[no_mangle]
pub unsafe extern "C" fn cc_majorant_free(h: *mut CcMajorant) {
    free_handle(h)
}

/// `‖f‖_w` over the default disk grid (radii `1 − 2^{-j}`, `j ≤ 12`, 256 angles).
///
/// # Safety
/// `f`, `w` must be live handles and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn cc_bloch_norm(f: *const CcSeries, w: *const CcMajorant, out: *mut f64) -> CcStatus {
    nonnull!(f, w, out);
    guard(|| {
        *out = bloch_norm(&(*f).0, &(*w).0, &DiskGrid::default()).value;
        CcStatus::Ok
    })
}

/// Max residual of the Clark kernel identity for the atomic measure
/// `Σ mass[i]·δ_{θ[i]}` (angles in turns) over an `n × n` grid of radius
/// `radius ≤ 0.9`.
///
/// # Safety
/// `theta`, `mass` must point to `n_atoms` readable doubles; `out` writable.
#[no_mangle]
pub unsafe extern "C" fn cc_clark_kernel_residual(
    theta: *const f64,
    mass: *const f64,
    n_atoms: usize,
    alpha: f64,
    degree: usize,
    grid_n: usize,
    radius: f64,
    out: *mut f64,
) -> CcStatus {
    nonnull!(theta, mass, out);
    guard(|| {
        let atoms = (0..n_atoms).map(|i| Atom::new(*theta.add(i), *mass.add(i))).collect();
        let res = BoundaryMeasure::from_atoms(atoms)
            .and_then(|mu| clark_b_from_mu(&mu, alpha, degree))
            .and_then(|pair| kernel_identity_grid(&pair, grid_n, radius));
        match res {
            Ok(r) => {
                *out = r;
                CcStatus::Ok
            }
            Err(e) => fail(e),
        }
    })
}

/// Runs a JSON experiment config in memory. On success `*out_json` holds a
/// document with `summary`, `manifest` and `results_csv`; release it with
/// [`cc_string_free`].
///
/// # Safety
/// `config` must be a NUL-terminated string and `out_json` writable.
#[no_mangle]
pub unsafe extern "C" fn cc_run_experiment_json(config: *const c_char, out_json: *mut *mut c_char) -> CcStatus {
    nonnull!(config, out_json);
    guard(|| {
        let Ok(text) = CStr::from_ptr(config).to_str() else {
            return set_error(CcStatus::InvalidUtf8, "config is not valid UTF-8");
        };
        match run_config_json(text, Overrides::default()) {
            Ok(doc) => {
                *out_json = CString::new(doc).unwrap_or_default().into_raw();
                CcStatus::Ok
            }
            Err(RunError::Schema(m)) => set_error(CcStatus::Schema, m),
            Err(RunError::Io(m)) => set_error(CcStatus::Io, m),
            Err(RunError::Numeric(e)) => fail(e),
        }
    })
}

/// # Safety
/// `s` must be null or a string returned by this library, not yet freed.
#[no_mangle]
pub unsafe extern "C" fn cc_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}
