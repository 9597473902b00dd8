//! C ABI over `cycle_laplacian`.
//!
//! Every fallible call returns a [`ClStatus`]. On failure a message is kept in
//! thread-local storage and can be read with [`cl_last_error`]. Handles are
//! opaque; free them with the matching `*_free` function.

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use cycle_laplacian::charpoly::ProblemInstance;
use cycle_laplacian::numerics::{decimal_digits, fmt_sci};
use cycle_laplacian::solvers::{solve_theta_newton, Method};
use cycle_laplacian::spectrum::{eigenvector, full_spectrum, SpectrumResult};
use cycle_laplacian::{AlphaParam, Error, PrecisionContext};

/// Status codes returned by every fallible function.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ClStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidUtf8 = 2,
    /// Bad alpha, order, precision or method.
    InvalidArgument = 3,
    IndexOutOfRange = 4,
    /// The solver refused the instance or failed to converge.
    SolverFailed = 5,
    BufferTooSmall = 6,
    Panic = 7,
}

/// Root-finding method for the even-index eigenvalues.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ClMethod {
    Newton = 0,
    Bisection = 1,
    FixedPoint = 2,
}

impl From<ClMethod> for Method {
    fn from(m: ClMethod) -> Self {
        match m {
            ClMethod::Newton => Method::Newton,
            ClMethod::Bisection => Method::Bisection,
            ClMethod::FixedPoint => Method::FixedPoint,
        }
    }
}

/// All eigenvalues of one instance, ascending.
pub struct ClSpectrum {
    inner: SpectrumResult,
    digits: usize,
}

/// One eigenvector, unnormalized.
pub struct ClEigenvector {
    re: Vec<f64>,
    im: Vec<f64>,
    exact_norm: f64,
    asympt_norm: f64,
}

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_error(msg: String) {
    let c = CString::new(msg.replace('\0', " ")).expect("nul bytes removed");
    LAST_ERROR.with(|e| *e.borrow_mut() = Some(c));
}

fn fail(status: ClStatus, msg: impl Into<String>) -> ClStatus {
    set_error(msg.into());
    status
}

fn status_of(err: &Error) -> ClStatus {
    match err {
        Error::InvalidPrecision(_)
        | Error::InvalidAlpha(_)
        | Error::InvalidOrder(_)
        | Error::Parse(_) => ClStatus::InvalidArgument,
        Error::InvalidIndex { .. } => ClStatus::IndexOutOfRange,
        _ => ClStatus::SolverFailed,
    }
}

fn guard(f: impl FnOnce() -> Result<(), ClStatus>) -> ClStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => {
            LAST_ERROR.with(|e| *e.borrow_mut() = None);
            ClStatus::Ok
        }
        Ok(Err(s)) => s,
        Err(_) => fail(ClStatus::Panic, "internal panic"),
    }
}

fn lift<T>(r: cycle_laplacian::Result<T>) -> Result<T, ClStatus> {
    r.map_err(|e| fail(status_of(&e), e.to_string()))
}

unsafe fn read_str<'a>(s: *const c_char) -> Result<&'a str, ClStatus> {
    if s.is_null() {
        return Err(fail(ClStatus::NullPointer, "null string argument"));
    }
    CStr::from_ptr(s)
        .to_str()
        .map_err(|_| fail(ClStatus::InvalidUtf8, "string is not valid UTF-8"))
}

fn method_from(raw: i32) -> Result<ClMethod, ClStatus> {
    match raw {
        0 => Ok(ClMethod::Newton),
        1 => Ok(ClMethod::Bisection),
        2 => Ok(ClMethod::FixedPoint),
        _ => Err(fail(
            ClStatus::InvalidArgument,
            format!("unknown method {raw}"),
        )),
    }
}

fn check_out<T>(p: *mut T) -> Result<(), ClStatus> {
    if p.is_null() {
        Err(fail(ClStatus::NullPointer, "null output pointer"))
    } else {
        Ok(())
    }
}

/// Library version as a static NUL-terminated string.
#[no_mangle]
pub extern "C" fn cl_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr().cast()
}

/// Message for the last failed call on this thread, or NULL after a success.
/// The pointer stays valid until the next call into the library on this thread.
#[no_mangle]
pub extern "C" fn cl_last_error() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(ptr::null(), |c| c.as_ptr()))
}

/// Computes the spectrum of the cycle Laplacian with edge weight `alpha`
/// (a decimal or `p/q` string, real, in (0, 1)) at `bits` of precision.
/// `method` is a [`ClMethod`] value.
///
/// # Safety
/// `alpha` must be a valid C string and `out` a writable pointer.
#[no_mangle]
pub unsafe extern "C" fn cl_spectrum_new(
    alpha: *const c_char,
    n: usize,
    method: i32,
    bits: u32,
    out: *mut *mut ClSpectrum,
) -> ClStatus {
    guard(|| {
        check_out(out)?;
        *out = ptr::null_mut();
        let text = read_str(alpha)?;
        let method = method_from(method)?;
        let ctx = lift(PrecisionContext::new(bits))?;
        let a = lift(AlphaParam::parse(text, &ctx))?;
        if !a.is_real() {
            return Err(fail(
                ClStatus::InvalidArgument,
                "spectrum needs a real alpha",
            ));
        }
        let inst = lift(ProblemInstance::new(a, n))?;
        let inner = lift(full_spectrum(&inst, method.into(), &ctx, None))?;
        let digits = decimal_digits(bits);
        *out = Box::into_raw(Box::new(ClSpectrum { inner, digits }));
        Ok(())
    })
}

/// Number of eigenvalues (the order `n`); 0 for NULL.
///
/// # Safety
/// `s` must be NULL or a live handle.
#[no_mangle]
pub unsafe extern "C" fn cl_spectrum_len(s: *const ClSpectrum) -> usize {
    s.as_ref().map_or(0, |s| s.inner.len())
}

unsafe fn entry<'a>(s: *const ClSpectrum, j: usize) -> Result<&'a ClSpectrum, ClStatus> {
    let s = s
        .as_ref()
        .ok_or_else(|| fail(ClStatus::NullPointer, "null spectrum handle"))?;
    if j == 0 || j > s.inner.len() {
        return Err(fail(
            ClStatus::IndexOutOfRange,
            format!("j = {j} outside 1..={}", s.inner.len()),
        ));
    }
    Ok(s)
}

/// `lambda_j` rounded to double, `j` 1-based.
///
/// # Safety
/// `s` must be a live handle and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn cl_spectrum_lambda(
    s: *const ClSpectrum,
    j: usize,
    out: *mut f64,
) -> ClStatus {
    guard(|| {
        check_out(out)?;
        *out = entry(s, j)?.inner.lambda(j).to_f64();
        Ok(())
    })
}

/// `theta_j` rounded to double, `j` 1-based.
///
/// # Safety
/// `s` must be a live handle and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn cl_spectrum_theta(
    s: *const ClSpectrum,
    j: usize,
    out: *mut f64,
) -> ClStatus {
    guard(|| {
        check_out(out)?;
        *out = entry(s, j)?.inner.theta(j).to_f64();
        Ok(())
    })
}

/// Certified bound on the error in `theta_j` as a double (0 for odd `j`,
/// which are closed form; may underflow to 0 at high precision).
///
/// # Safety
/// `s` must be a live handle and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn cl_spectrum_certified_error(
    s: *const ClSpectrum,
    j: usize,
    out: *mut f64,
) -> ClStatus {
    guard(|| {
        check_out(out)?;
        let s = entry(s, j)?;
        *out = s.inner.reports[j - 1]
            .as_ref()
            .map_or(0.0, |r| r.certified_error.to_f64());
        Ok(())
    })
}

/// `lambda_j` at full precision as a decimal string. Writes at most `cap`
/// bytes including the terminator. `needed` (optional) receives the required
/// capacity; if `cap` is too small nothing is written and
/// `BufferTooSmall` is returned.
///
/// # Safety
/// `buf` must have room for `cap` bytes; `needed` may be NULL.
#[no_mangle]
pub unsafe extern "C" fn cl_spectrum_lambda_str(
    s: *const ClSpectrum,
    j: usize,
    buf: *mut c_char,
    cap: usize,
    needed: *mut usize,
) -> ClStatus {
    guard(|| {
        let s = entry(s, j)?;
        let text = fmt_sci(s.inner.lambda(j), s.digits);
        let want = text.len() + 1;
        if !needed.is_null() {
            *needed = want;
        }
        if cap < want {
            return Err(fail(
                ClStatus::BufferTooSmall,
                format!("need {want} bytes, got {cap}"),
            ));
        }
        check_out(buf)?;
        ptr::copy_nonoverlapping(text.as_ptr(), buf.cast::<u8>(), text.len());
        *buf.add(text.len()) = 0;
        Ok(())
    })
}

/// # Safety
/// `s` must be NULL or a handle from [`cl_spectrum_new`] not yet freed.
#[no_mangle]
pub unsafe extern "C" fn cl_spectrum_free(s: *mut ClSpectrum) {
    if !s.is_null() {
        drop(Box::from_raw(s));
    }
}

/// Eigenvector for index `j` (1-based). `alpha` may be complex, e.g.
/// `"0.3+0.2i"`; even `j` is solved by Newton's method.
///
/// # Safety
/// `alpha` must be a valid C string and `out` a writable pointer.
#[no_mangle]
pub unsafe extern "C" fn cl_eigenvector_new(
    alpha: *const c_char,
    n: usize,
    j: usize,
    bits: u32,
    out: *mut *mut ClEigenvector,
) -> ClStatus {
    guard(|| {
        check_out(out)?;
        *out = ptr::null_mut();
        let text = read_str(alpha)?;
        let ctx = lift(PrecisionContext::new(bits))?;
        let a = lift(AlphaParam::parse(text, &ctx))?;
        let inst = lift(ProblemInstance::new(a, n))?;
        if j == 0 || j > n {
            return Err(fail(
                ClStatus::IndexOutOfRange,
                format!("j = {j} outside 1..={n}"),
            ));
        }
        let theta = if j % 2 == 1 {
            ctx.pi_ratio(j as i64 - 1, n as i64)
        } else {
            lift(solve_theta_newton(&inst.alpha, n, j, None, &ctx, None))?.root
        };
        let v = lift(eigenvector(&inst, j, &theta, &ctx))?;
        *out = Box::into_raw(Box::new(ClEigenvector {
            re: v.coords.iter().map(|z| z.re.to_f64()).collect(),
            im: v.coords.iter().map(|z| z.im.to_f64()).collect(),
            exact_norm: v.exact_norm.to_f64(),
            asympt_norm: v.asympt_norm.to_f64(),
        }));
        Ok(())
    })
}

/// Number of coordinates; 0 for NULL.
///
/// # Safety
/// `v` must be NULL or a live handle.
#[no_mangle]
pub unsafe extern "C" fn cl_eigenvector_len(v: *const ClEigenvector) -> usize {
    v.as_ref().map_or(0, |v| v.re.len())
}

/// Coordinate `k` (1-based).
///
/// # Safety
/// `v` must be a live handle; `re` and `im` writable.
#[no_mangle]
pub unsafe extern "C" fn cl_eigenvector_get(
    v: *const ClEigenvector,
    k: usize,
    re: *mut f64,
    im: *mut f64,
) -> ClStatus {
    guard(|| {
        check_out(re)?;
        check_out(im)?;
        let v = v
            .as_ref()
            .ok_or_else(|| fail(ClStatus::NullPointer, "null eigenvector handle"))?;
        if k == 0 || k > v.re.len() {
            return Err(fail(
                ClStatus::IndexOutOfRange,
                format!("k = {k} outside 1..={}", v.re.len()),
            ));
        }
        *re = v.re[k - 1];
        *im = v.im[k - 1];
        Ok(())
    })
}

/// Euclidean norm and its closed-form asymptotic counterpart.
///
/// # Safety
/// `v` must be a live handle; outputs writable.
#[no_mangle]
pub unsafe extern "C" fn cl_eigenvector_norms(
    v: *const ClEigenvector,
    exact: *mut f64,
    asympt: *mut f64,
) -> ClStatus {
    guard(|| {
        check_out(exact)?;
        check_out(asympt)?;
        let v = v
            .as_ref()
            .ok_or_else(|| fail(ClStatus::NullPointer, "null eigenvector handle"))?;
        *exact = v.exact_norm;
        *asympt = v.asympt_norm;
        Ok(())
    })
}

/// # Safety
/// `v` must be NULL or a handle from [`cl_eigenvector_new`] not yet freed.
#[no_mangle]
pub unsafe extern "C" fn cl_eigenvector_free(v: *mut ClEigenvector) {
    if !v.is_null() {
        drop(Box::from_raw(v));
    }
}
