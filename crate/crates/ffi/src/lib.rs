//! C interface to `ncrational`. Handles are opaque; every fallible call
//! returns an [`NcStatus`] and leaves a message for [`nc_last_error`].

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};

use ncrational::fock::{self, Verdict};
use ncrational::linalg::c64;
use ncrational::ncexpr::NCWord;
use ncrational::realization::Realization;
use ncrational::spectral::{self, SprMethod};
use ncrational::tuple::MatrixTuple;
use ncrational::Error;

#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum NcStatus {
    Ok = 0,
    SyntaxError = 1,
    VariableOutOfRange = 2,
    LiteralOverflow = 3,
    NotAPolynomial = 4,
    NotInDomain = 5,
    NotRegularAtZero = 6,
    ValueAtZeroIsZero = 7,
    DimensionMismatch = 8,
    SpectralRadiusNotBelowOne = 9,
    NotInFockSpace = 10,
    NotABoundedMultiplier = 11,
    JointlyNilpotent = 12,
    CertificationFailed = 13,
    InvalidInput = 14,
    IoError = 15,
    NullPointer = 100,
    InvalidUtf8 = 101,
    Panic = 102,
}

impl From<&Error> for NcStatus {
    fn from(e: &Error) -> Self {
        match e {
            Error::Syntax { .. } => NcStatus::SyntaxError,
            Error::VariableOutOfRange { .. } => NcStatus::VariableOutOfRange,
            Error::LiteralOverflow { .. } => NcStatus::LiteralOverflow,
            Error::NotAPolynomial => NcStatus::NotAPolynomial,
            Error::NotInDomain(_) => NcStatus::NotInDomain,
            Error::NotRegularAtZero => NcStatus::NotRegularAtZero,
            Error::ZeroAtOrigin => NcStatus::ValueAtZeroIsZero,
            Error::DimensionMismatch(_) => NcStatus::DimensionMismatch,
            Error::SpectralRadiusTooLarge { .. } => NcStatus::SpectralRadiusNotBelowOne,
            Error::NotInFock { .. } => NcStatus::NotInFockSpace,
            Error::NotBoundedMultiplier { .. } => NcStatus::NotABoundedMultiplier,
            Error::JointlyNilpotent => NcStatus::JointlyNilpotent,
            Error::CertificationFailed(_) => NcStatus::CertificationFailed,
            Error::InvalidInput(_) => NcStatus::InvalidInput,
            Error::Io(_) => NcStatus::IoError,
        }
    }
}

/// Opaque realization handle.
pub struct NcRealization(Realization);

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_error(msg: String) {
    let c = CString::new(msg.replace('\0', " ")).unwrap_or_default();
    LAST_ERROR.with(|e| *e.borrow_mut() = Some(c));
}

enum Fail {
    Core(Error),
    Null,
    Utf8,
}

impl From<Error> for Fail {
    fn from(e: Error) -> Self {
        Fail::Core(e)
    }
}

fn guard(f: impl FnOnce() -> Result<(), Fail>) -> NcStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => {
            LAST_ERROR.with(|e| *e.borrow_mut() = None);
            NcStatus::Ok
        }
        Ok(Err(Fail::Core(e))) => {
            set_error(format!("{}: {e}", e.code()));
            NcStatus::from(&e)
        }
        Ok(Err(Fail::Null)) => {
            set_error("null pointer argument".into());
            NcStatus::NullPointer
        }
        Ok(Err(Fail::Utf8)) => {
            set_error("string is not valid UTF-8".into());
            NcStatus::InvalidUtf8
        }
        Err(_) => {
            set_error("internal panic".into());
            NcStatus::Panic
        }
    }
}

unsafe fn text<'a>(p: *const c_char) -> Result<&'a str, Fail> {
    if p.is_null() {
        return Err(Fail::Null);
    }
    CStr::from_ptr(p).to_str().map_err(|_| Fail::Utf8)
}

unsafe fn handle<'a>(r: *const NcRealization) -> Result<&'a Realization, Fail> {
    r.as_ref().map(|h| &h.0).ok_or(Fail::Null)
}

unsafe fn put<T>(out: *mut T, v: T) -> Result<(), Fail> {
    if out.is_null() {
        return Err(Fail::Null);
    }
    out.write(v);
    Ok(())
}

fn boxed(r: Realization) -> *mut NcRealization {
    Box::into_raw(Box::new(NcRealization(r)))
}

/// Compiles an expression in `z1..zd` to a realization.
///
/// # Safety
/// `expr` must be a NUL-terminated string and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn nc_realization_from_expression(
    expr: *const c_char,
    d: usize,
    out: *mut *mut NcRealization,
) -> NcStatus {
    guard(|| {
        let r = Realization::from_expression(text(expr)?, d)?;
        put(out, boxed(r))
    })
}

/// Reads a realization from its JSON form `{"d","n","A","b","c"}`.
///
/// # Safety
/// `json` must be a NUL-terminated string and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn nc_realization_from_json(json: *const c_char, out: *mut *mut NcRealization) -> NcStatus {
    guard(|| {
        let r = Realization::from_json_str(text(json)?)?;
        put(out, boxed(r))
    })
}

/// # Safety
/// `r` must come from this library and not be freed twice. Null is ignored.
#[no_mangle]
pub unsafe extern "C" fn nc_realization_free(r: *mut NcRealization) {
    if !r.is_null() {
        drop(Box::from_raw(r));
    }
}

/// State dimension, or 0 for a null handle.
///
/// # Safety
/// `r` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn nc_realization_size(r: *const NcRealization) -> usize {
    r.as_ref().map_or(0, |h| h.0.n)
}

/// Number of variables, or 0 for a null handle.
///
/// # Safety
/// `r` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn nc_realization_vars(r: *const NcRealization) -> usize {
    r.as_ref().map_or(0, |h| h.0.d)
}

/// Writes a new, minimal handle to `out`; `r` is left untouched.
///
/// # Safety
/// `r` must be a live handle and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn nc_realization_minimize(
    r: *const NcRealization,
    tol: f64,
    out: *mut *mut NcRealization,
) -> NcStatus {
    guard(|| {
        let m = handle(r)?.minimize(tol);
        put(out, boxed(m))
    })
}

/// JSON text of the realization; release it with [`nc_string_free`].
///
/// # Safety
/// `r` must be a live handle and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn nc_realization_to_json(r: *const NcRealization, out: *mut *mut c_char) -> NcStatus {
    guard(|| {
        let s = CString::new(handle(r)?.to_json_string()).map_err(|_| Fail::Utf8)?;
        put(out, s.into_raw())
    })
}

/// Joint spectral radius of the state matrices.
///
/// # Safety
/// `r` must be a live handle and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn nc_spr(r: *const NcRealization, out: *mut f64) -> NcStatus {
    guard(|| {
        let r = handle(r)?;
        let rho = if r.n == 0 { 0.0 } else { spectral::spr(&r.a, SprMethod::Matrized) };
        put(out, rho)
    })
}

/// # Safety
/// `r` must be a live handle and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn nc_h2_norm(r: *const NcRealization, out: *mut f64) -> NcStatus {
    guard(|| {
        let v = fock::h2_norm(handle(r)?)?;
        put(out, v)
    })
}

/// Membership verdict for a minimal handle; `spr` may be null.
///
/// # Safety
/// `r` must be a live handle, `in_fock` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn nc_is_in_fock(r: *const NcRealization, in_fock: *mut bool, spr: *mut f64) -> NcStatus {
    guard(|| {
        let m = fock::is_in_fock(handle(r)?);
        put(in_fock, m.verdict == Verdict::InH2)?;
        if !spr.is_null() {
            spr.write(m.spr);
        }
        Ok(())
    })
}

/// Coefficient of the word `letters[0..len]` (letters are 1-based).
///
/// # Safety
/// `letters` must point to `len` values (may be null when `len` is 0);
/// `re` and `im` must be valid pointers.
#[no_mangle]
pub unsafe extern "C" fn nc_taylor_coeff(
    r: *const NcRealization,
    letters: *const usize,
    len: usize,
    re: *mut f64,
    im: *mut f64,
) -> NcStatus {
    guard(|| {
        let r = handle(r)?;
        let word = if len == 0 {
            Vec::new()
        } else if letters.is_null() {
            return Err(Fail::Null);
        } else {
            std::slice::from_raw_parts(letters, len).to_vec()
        };
        if let Some(&j) = word.iter().find(|&&j| j == 0 || j > r.d) {
            return Err(Error::VariableOutOfRange { index: j, d: r.d, pos: 0 }.into());
        }
        let c = r.taylor_coeff(&NCWord(word));
        put(re, c.re)?;
        put(im, c.im)
    })
}

/// Evaluates at the tuple `X_1..X_d` of `n × n` matrices.
///
/// `x` holds `2·d·n²` doubles: matrices in order, each row-major with
/// interleaved real and imaginary parts. `out` receives `2·n²` doubles in the
/// same layout.
///
/// # Safety
/// `x` and `out` must point to buffers of the sizes above.
#[no_mangle]
pub unsafe extern "C" fn nc_evaluate(r: *const NcRealization, n: usize, x: *const f64, out: *mut f64) -> NcStatus {
    guard(|| {
        let r = handle(r)?;
        if x.is_null() || out.is_null() {
            return Err(Fail::Null);
        }
        let raw = std::slice::from_raw_parts(x, 2 * r.d * n * n);
        let mats = (0..r.d)
            .map(|j| {
                let m = &raw[2 * j * n * n..2 * (j + 1) * n * n];
                ncrational::linalg::CMat::from_fn(n, n, |p, q| c64(m[2 * (p * n + q)], m[2 * (p * n + q) + 1]))
            })
            .collect();
        let v = r.evaluate(&MatrixTuple::new(mats)?)?;
        let dst = std::slice::from_raw_parts_mut(out, 2 * n * n);
        for p in 0..n {
            for q in 0..n {
                dst[2 * (p * n + q)] = v[(p, q)].re;
                dst[2 * (p * n + q) + 1] = v[(p, q)].im;
            }
        }
        Ok(())
    })
}

/// Message for the last failed call on this thread, or null. Release it with
/// [`nc_string_free`].
#[no_mangle]
pub extern "C" fn nc_last_error() -> *mut c_char {
    LAST_ERROR.with(|e| e.borrow().clone().map_or(std::ptr::null_mut(), CString::into_raw))
}

/// # Safety
/// `s` must be null or a string returned by this library, freed once.
#[no_mangle]
pub unsafe extern "C" fn nc_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}
