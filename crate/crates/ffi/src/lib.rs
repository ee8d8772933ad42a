//! C interface to `freepd`.
//!
//! Functions are handed around as opaque `FpdFunction` handles; polynomials,
//! parameter sequences and certificates cross the boundary as JSON strings
//! in the same formats the CLI reads and writes. Every call returns an
//! `FpdStatus`; on failure `fpd_last_error` describes what went wrong.
//!
//! Ownership: handles from `fpd_*` constructors are freed with
//! `fpd_function_free`, strings with `fpd_string_free`.

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use freepd::extend::{self, CentralOracle, ParamOracle, RandomOracle};
use freepd::json::{self, CertJson, ParamsJson};
use freepd::ncpoly::{self, SosOutcome};
use freepd::pdfun::{self, PdFunction};
use freepd::quasimult;
use freepd::{GroupContext, Tolerance, Word};

/// Result of every call. The numeric values match the CLI exit codes where
/// they overlap.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FpdStatus {
    Ok = 0,
    /// The input was well formed but the mathematics failed
    /// (not positive definite, no certificate, ...).
    MathFailure = 1,
    InvalidInput = 2,
    NullPointer = 3,
    /// A Rust panic was caught at the boundary.
    Panic = 4,
}

/// A positive definite function on a ball or order ideal.
pub struct FpdFunction {
    inner: PdFunction,
}

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

enum Failure {
    Null(&'static str),
    Lib(freepd::Error),
    Math(String),
    Utf8,
}

impl From<freepd::Error> for Failure {
    fn from(e: freepd::Error) -> Self {
        Failure::Lib(e)
    }
}

fn set_error(msg: String) {
    let c = CString::new(msg.replace('\0', " ")).unwrap_or_default();
    LAST_ERROR.with(|e| *e.borrow_mut() = Some(c));
}

fn guard<F: FnOnce() -> Result<(), Failure>>(f: F) -> FpdStatus {
    LAST_ERROR.with(|e| *e.borrow_mut() = None);
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => FpdStatus::Ok,
        Ok(Err(Failure::Null(name))) => {
            set_error(format!("null pointer passed as `{name}`"));
            FpdStatus::NullPointer
        }
        Ok(Err(Failure::Utf8)) => {
            set_error("string argument is not valid UTF-8".into());
            FpdStatus::InvalidInput
        }
        Ok(Err(Failure::Math(msg))) => {
            set_error(msg);
            FpdStatus::MathFailure
        }
        Ok(Err(Failure::Lib(e))) => {
            set_error(format!("{}: {e}", e.kind()));
            if e.is_input_error() {
                FpdStatus::InvalidInput
            } else {
                FpdStatus::MathFailure
            }
        }
        Err(_) => {
            set_error("internal panic".into());
            FpdStatus::Panic
        }
    }
}

unsafe fn borrow<'a, T>(p: *const T, name: &'static str) -> Result<&'a T, Failure> {
    p.as_ref().ok_or(Failure::Null(name))
}

unsafe fn str_arg<'a>(p: *const c_char, name: &'static str) -> Result<&'a str, Failure> {
    if p.is_null() {
        return Err(Failure::Null(name));
    }
    CStr::from_ptr(p).to_str().map_err(|_| Failure::Utf8)
}

unsafe fn put<T>(out: *mut T, value: T, name: &'static str) -> Result<(), Failure> {
    if out.is_null() {
        return Err(Failure::Null(name));
    }
    out.write(value);
    Ok(())
}

unsafe fn put_handle(out: *mut *mut FpdFunction, phi: PdFunction) -> Result<(), Failure> {
    put(out, Box::into_raw(Box::new(FpdFunction { inner: phi })), "out")
}

unsafe fn put_string(out: *mut *mut c_char, s: String) -> Result<(), Failure> {
    let c = CString::new(s).map_err(|_| Failure::Utf8)?;
    put(out, c.into_raw(), "out")
}

fn tolerance(tol: f64) -> Result<Tolerance, Failure> {
    Ok(Tolerance::uniform(tol)?)
}

/// Library version, a static NUL-terminated string.
#[no_mangle]
pub extern "C" fn fpd_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr().cast()
}

/// Message for the last failed call on this thread, or NULL after a
/// successful one. Valid until the next `fpd_*` call on the same thread.
#[no_mangle]
pub extern "C" fn fpd_last_error() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(ptr::null(), |c| c.as_ptr()))
}

/// # Safety
/// `s` must be NULL or a string returned by this library.
#[no_mangle]
pub unsafe extern "C" fn fpd_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}

/// # Safety
/// `phi` must be NULL or a handle returned by this library.
#[no_mangle]
pub unsafe extern "C" fn fpd_function_free(phi: *mut FpdFunction) {
    if !phi.is_null() {
        drop(Box::from_raw(phi));
    }
}

/// Parse a pdfun.v1 document.
///
/// # Safety
/// `json` must be a NUL-terminated string; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn fpd_function_from_json(
    json: *const c_char,
    out: *mut *mut FpdFunction,
) -> FpdStatus {
    guard(|| {
        let phi = json::pdfun_from_str(str_arg(json, "json")?)?;
        put_handle(out, phi)
    })
}

/// # Safety
/// `phi` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn fpd_function_to_json(
    phi: *const FpdFunction,
    out: *mut *mut c_char,
) -> FpdStatus {
    guard(|| {
        let s = json::pdfun_to_string(&borrow(phi, "phi")?.inner)?;
        put_string(out, s)
    })
}

/// Radius of the largest ball inside the domain, and the block size `k`.
///
/// # Safety
/// `phi` must be a live handle; the out pointers must be writable.
#[no_mangle]
pub unsafe extern "C" fn fpd_function_shape(
    phi: *const FpdFunction,
    out_radius: *mut usize,
    out_k: *mut usize,
) -> FpdStatus {
    guard(|| {
        let phi = &borrow(phi, "phi")?.inner;
        put(out_radius, phi.radius(), "out_radius")?;
        put(out_k, phi.k(), "out_k")
    })
}

/// Write `Φ(s)` as `k*k` row-major complex entries, interleaved re/im, into
/// `out` (room for `2*k*k` doubles). The word is given by its signed letters.
///
/// # Safety
/// `letters` must point to `len` integers (may be NULL if `len == 0`);
/// `out` must point to `cap` doubles.
#[no_mangle]
pub unsafe extern "C" fn fpd_function_value(
    phi: *const FpdFunction,
    letters: *const i32,
    len: usize,
    out: *mut f64,
    cap: usize,
) -> FpdStatus {
    guard(|| {
        let phi = &borrow(phi, "phi")?.inner;
        let letters = if len == 0 {
            &[][..]
        } else if letters.is_null() {
            return Err(Failure::Null("letters"));
        } else {
            std::slice::from_raw_parts(letters, len)
        };
        let s = Word::new(letters)?;
        phi.ctx().check_word(&s)?;
        let value = phi
            .value(&s)
            .ok_or_else(|| freepd::Error::DomainTooSmall(format!("{s} is outside the domain")))?;
        let need = 2 * value.rows() * value.cols();
        if out.is_null() {
            return Err(Failure::Null("out"));
        }
        if cap < need {
            return Err(freepd::Error::Dimension(format!("buffer holds {cap} doubles, need {need}")).into());
        }
        let buf = std::slice::from_raw_parts_mut(out, need);
        for (i, z) in value.as_slice().iter().enumerate() {
            buf[2 * i] = z.re;
            buf[2 * i + 1] = z.im;
        }
        Ok(())
    })
}

/// Positivity check on the largest ball. A function that is not positive
/// definite is still `FPD_STATUS_OK`; read `out_is_pd`.
///
/// # Safety
/// `phi` must be a live handle; the out pointers must be writable.
#[no_mangle]
pub unsafe extern "C" fn fpd_verify(
    phi: *const FpdFunction,
    tol: f64,
    out_is_pd: *mut bool,
    out_min_eigenvalue: *mut f64,
) -> FpdStatus {
    guard(|| {
        let report = pdfun::verify_pd(&borrow(phi, "phi")?.inner, &tolerance(tol)?)?;
        put(out_is_pd, report.is_pd, "out_is_pd")?;
        put(out_min_eigenvalue, report.min_eigenvalue, "out_min_eigenvalue")
    })
}

unsafe fn extend_with(
    phi: *const FpdFunction,
    n: usize,
    tol: f64,
    oracle: &mut dyn ParamOracle,
    out: *mut *mut FpdFunction,
) -> Result<(), Failure> {
    let phi = &borrow(phi, "phi")?.inner;
    let (ext, _) = extend::extend_to_ball(phi, n, oracle, &tolerance(tol)?)?;
    put_handle(out, ext)
}

/// Central (maximum entropy) extension to the ball of radius `n`.
///
/// # Safety
/// `phi` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn fpd_extend_central(
    phi: *const FpdFunction,
    n: usize,
    tol: f64,
    out: *mut *mut FpdFunction,
) -> FpdStatus {
    guard(|| extend_with(phi, n, tol, &mut CentralOracle, out))
}

/// Extension with seeded random contractions of norm below `radius`.
///
/// # Safety
/// `phi` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn fpd_extend_random(
    phi: *const FpdFunction,
    n: usize,
    seed: u64,
    radius: f64,
    tol: f64,
    out: *mut *mut FpdFunction,
) -> FpdStatus {
    guard(|| extend_with(phi, n, tol, &mut RandomOracle::new(seed, radius), out))
}

/// Extension with explicit contractions given as a params.v1 document. The
/// function is re-keyed to the letter order of the parameters if needed.
///
/// # Safety
/// `phi` must be a live handle, `params_json` a NUL-terminated string and
/// `out` writable.
#[no_mangle]
pub unsafe extern "C" fn fpd_extend_params(
    phi: *const FpdFunction,
    params_json: *const c_char,
    n: usize,
    tol: f64,
    out: *mut *mut FpdFunction,
) -> FpdStatus {
    guard(|| {
        let base = &borrow(phi, "phi")?.inner;
        let (ctx, mut seq) = json::params_from_str(str_arg(params_json, "params_json")?)?;
        let base = if &ctx == base.ctx() { base.clone() } else { base.with_context(&ctx)? };
        let (ext, _) = extend::extend_to_ball(&base, n, &mut seq, &tolerance(tol)?)?;
        put_handle(out, ext)
    })
}

/// Contractions that regenerate `phi` from its restriction to the ball of
/// radius `from`, as a params.v1 document.
///
/// # Safety
/// `phi` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn fpd_extract_params(
    phi: *const FpdFunction,
    from: usize,
    tol: f64,
    out: *mut *mut c_char,
) -> FpdStatus {
    guard(|| {
        let phi = &borrow(phi, "phi")?.inner;
        let seq = extend::extract_params(phi, from, &tolerance(tol)?)?;
        put_string(out, json::to_string(&ParamsJson::new(phi.ctx(), phi.k(), from, &seq))?)
    })
}

/// Maximal `(n+1)`-orthogonality. As with `fpd_verify`, a negative answer is
/// reported through `out_holds`, not the status.
///
/// # Safety
/// `phi` must be a live handle; the out pointers must be writable.
#[no_mangle]
pub unsafe extern "C" fn fpd_check_ortho(
    phi: *const FpdFunction,
    n: usize,
    tol: f64,
    out_holds: *mut bool,
    out_violation: *mut f64,
) -> FpdStatus {
    guard(|| {
        let report = extend::check_max_orthogonal(&borrow(phi, "phi")?.inner, n, tol)?;
        put(out_holds, report.holds, "out_holds")?;
        put(out_violation, report.worst_violation, "out_violation")
    })
}

/// `e^{-t|s|} I_k` on the ball of radius `n` in the free group on `m` letters.
///
/// # Safety
/// `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn fpd_haagerup(
    m: usize,
    k: usize,
    t: f64,
    n: usize,
    out: *mut *mut FpdFunction,
) -> FpdStatus {
    guard(|| put_handle(out, quasimult::haagerup(&GroupContext::new(m)?, k, t, n)?))
}

/// # Safety
/// `phi` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn fpd_radialize(
    phi: *const FpdFunction,
    out: *mut *mut FpdFunction,
) -> FpdStatus {
    guard(|| put_handle(out, pdfun::radialize(&borrow(phi, "phi")?.inner)?))
}

/// Sum-of-squares certificate for an ncpoly.v1 polynomial, written as a
/// cert.v1 document. `FPD_STATUS_MATH_FAILURE` when none was found.
///
/// # Safety
/// `ncpoly_json` must be a NUL-terminated string; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn fpd_factor_sos(
    ncpoly_json: *const c_char,
    tol: f64,
    max_iter: usize,
    out: *mut *mut c_char,
) -> FpdStatus {
    guard(|| {
        let p = json::ncpoly_from_str(str_arg(ncpoly_json, "ncpoly_json")?)?;
        match ncpoly::factor_sos(&p, tol, max_iter)? {
            SosOutcome::Certificate(cert) => put_string(out, json::to_string(&CertJson::from(&cert))?),
            SosOutcome::Infeasible(r) => Err(Failure::Math(format!(
                "no certificate after {} iterations (gap {:.3e}, residual {:.3e})",
                r.iterations, r.gap, r.residual
            ))),
        }
    })
}
