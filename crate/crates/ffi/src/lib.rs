//! C ABI over `kummer-core`.
//!
//! Every function returns a [`KummerStatus`] (or a handle that is null on
//! failure). On failure a message is stored per thread and can be read with
//! [`kummer_last_error_message`]. Panics are caught at the boundary and
//! reported as [`KummerStatus::Internal`].
//!
//! `kummer_eval_u` evaluates `U(a, b+1, z)`: its `b` argument is the `b` of
//! that form.

use std::cell::RefCell;
use std::ffi::{c_char, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use kummer_core::coefficients::{coefficient_set, Which, MAX_TERMS};
use kummer_core::evaluation::{evaluate, EvalOptions, ExpansionResult, ValueStatus};
use kummer_core::scaling::{scale, Parameters};
use kummer_core::verify::{recurrence_residual, wronskian_residual};
use kummer_core::Error;

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum KummerStatus {
    Ok = 0,
    Usage = 1,
    Domain = 2,
    Numerical = 3,
    NullPointer = 4,
    Internal = 5,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum KummerWhich {
    M = 0,
    U = 1,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum KummerValueStatus {
    Normal = 0,
    Underflow = 1,
    Overflow = 2,
}

/// Result of an evaluation. `value` is zero unless `status` is `Normal`;
/// `sign` and `log_magnitude` are always set.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct KummerResult {
    pub value: f64,
    pub log_magnitude: f64,
    pub sign: i32,
    pub terms_used: u32,
    pub last_term_ratio: f64,
    pub domain_ok: bool,
    pub status: KummerValueStatus,
}

/// Evaluation settings. Opaque to C.
pub struct KummerContext {
    opts: EvalOptions,
}

/// Normalized expansion coefficients. Opaque to C.
pub struct KummerCoefficients {
    f_tilde: Vec<f64>,
}

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_error(msg: String) {
    let c = CString::new(msg.replace('\0', " ")).expect("nul bytes removed");
    LAST_ERROR.with(|e| *e.borrow_mut() = Some(c));
}

fn clear_error() {
    LAST_ERROR.with(|e| *e.borrow_mut() = None);
}

fn status_of(e: &Error) -> KummerStatus {
    match e {
        Error::Usage(_) => KummerStatus::Usage,
        Error::Domain(_) => KummerStatus::Domain,
        Error::Numerical(_) => KummerStatus::Numerical,
        Error::Internal(_) => KummerStatus::Internal,
    }
}

/// Runs `f`, converting errors and panics into a status code.
fn guard<F>(f: F) -> KummerStatus
where
    F: FnOnce() -> Result<(), (KummerStatus, String)>,
{
    clear_error();
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => KummerStatus::Ok,
        Ok(Err((status, msg))) => {
            set_error(msg);
            status
        }
        Err(_) => {
            set_error("panic inside kummer".to_string());
            KummerStatus::Internal
        }
    }
}

fn lift<T>(r: kummer_core::Result<T>) -> Result<T, (KummerStatus, String)> {
    r.map_err(|e| (status_of(&e), e.to_string()))
}

fn null(what: &str) -> (KummerStatus, String) {
    (KummerStatus::NullPointer, format!("{what} is null"))
}

fn convert(r: &ExpansionResult) -> KummerResult {
    KummerResult {
        value: r.value,
        log_magnitude: r.log_magnitude,
        sign: r.sign as i32,
        terms_used: r.terms_used as u32,
        last_term_ratio: r.last_term_ratio,
        domain_ok: r.domain_ok,
        status: match r.status {
            ValueStatus::Normal => KummerValueStatus::Normal,
            ValueStatus::Underflow => KummerValueStatus::Underflow,
            ValueStatus::Overflow => KummerValueStatus::Overflow,
        },
    }
}

fn which_of(w: KummerWhich) -> Which {
    match w {
        KummerWhich::M => Which::M,
        KummerWhich::U => Which::U,
    }
}

/// Creates a context with `terms` correction terms (0..=8) and saddle bound
/// `rho` in (0, 1). Returns null on invalid input.
#[no_mangle]
pub extern "C" fn kummer_context_new(terms: u32, rho: f64) -> *mut KummerContext {
    let mut handle = ptr::null_mut();
    guard(|| {
        if terms as usize > MAX_TERMS {
            return Err((KummerStatus::Usage, format!("terms must lie in 0..={MAX_TERMS}, got {terms}")));
        }
        if !(rho > 0.0 && rho < 1.0) {
            return Err((KummerStatus::Usage, format!("rho must lie in (0, 1), got {rho}")));
        }
        let opts = EvalOptions {
            terms: terms as usize,
            rho,
        };
        handle = Box::into_raw(Box::new(KummerContext { opts }));
        Ok(())
    });
    handle
}

/// # Safety
/// `ctx` must be null or a pointer returned by [`kummer_context_new`] that
/// has not been freed.
#[no_mangle]
pub unsafe extern "C" fn kummer_context_free(ctx: *mut KummerContext) {
    if !ctx.is_null() {
        drop(Box::from_raw(ctx));
    }
}

unsafe fn eval_into(
    which: Which,
    ctx: *const KummerContext,
    a: f64,
    b: f64,
    z: f64,
    scaled: bool,
    out: *mut KummerResult,
) -> KummerStatus {
    guard(|| {
        let ctx = ctx.as_ref().ok_or_else(|| null("context"))?;
        if out.is_null() {
            return Err(null("out"));
        }
        let p = lift(match which {
            Which::M => Parameters::new(a, b, z),
            Which::U => Parameters::for_u(a, b, z),
        })?;
        let r = lift(evaluate(which, scaled, &p, &ctx.opts))?;
        out.write(convert(&r));
        Ok(())
    })
}

/// `M(a,b,z)`, or `M̃(a,b,z)` when `scaled`.
///
/// # Safety
/// `ctx` must be a live context and `out` must point to writable memory for
/// one `KummerResult`.
#[no_mangle]
pub unsafe extern "C" fn kummer_eval_m(
    ctx: *const KummerContext,
    a: f64,
    b: f64,
    z: f64,
    scaled: bool,
    out: *mut KummerResult,
) -> KummerStatus {
    eval_into(Which::M, ctx, a, b, z, scaled, out)
}

/// `U(a,b+1,z)`, or `Ũ(a,b+1,z)` when `scaled`.
///
/// # Safety
/// As for [`kummer_eval_m`].
#[no_mangle]
pub unsafe extern "C" fn kummer_eval_u(
    ctx: *const KummerContext,
    a: f64,
    b: f64,
    z: f64,
    scaled: bool,
    out: *mut KummerResult,
) -> KummerStatus {
    eval_into(Which::U, ctx, a, b, z, scaled, out)
}

/// Computes `f̃_0..f̃_terms` (or `p̃_n` for U) at the given point and stores a
/// new handle in `*out`. For U, `b` is the `b` of `U(a, b+1, z)`.
///
/// # Safety
/// `out` must point to writable memory for one pointer.
#[no_mangle]
pub unsafe extern "C" fn kummer_coefficients_new(
    which: KummerWhich,
    a: f64,
    b: f64,
    z: f64,
    terms: u32,
    out: *mut *mut KummerCoefficients,
) -> KummerStatus {
    guard(|| {
        if out.is_null() {
            return Err(null("out"));
        }
        out.write(ptr::null_mut());
        let which = which_of(which);
        let p = lift(match which {
            Which::M => Parameters::new(a, b, z),
            Which::U => Parameters::for_u(a, b, z),
        })?;
        let set = lift(coefficient_set(which, &scale(&p), terms as usize))?;
        out.write(Box::into_raw(Box::new(KummerCoefficients { f_tilde: set.f_tilde })));
        Ok(())
    })
}

/// Number of stored coefficients; 0 for a null handle.
///
/// # Safety
/// `c` must be null or a live coefficient handle.
#[no_mangle]
pub unsafe extern "C" fn kummer_coefficients_len(c: *const KummerCoefficients) -> usize {
    c.as_ref().map_or(0, |c| c.f_tilde.len())
}

/// Writes coefficient `index` to `*out`.
///
/// # Safety
/// `c` must be a live coefficient handle and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn kummer_coefficients_f_tilde(
    c: *const KummerCoefficients,
    index: usize,
    out: *mut f64,
) -> KummerStatus {
    guard(|| {
        let c = c.as_ref().ok_or_else(|| null("coefficients"))?;
        if out.is_null() {
            return Err(null("out"));
        }
        let v = c.f_tilde.get(index).ok_or_else(|| {
            (
                KummerStatus::Usage,
                format!("index {index} out of range for {} coefficients", c.f_tilde.len()),
            )
        })?;
        out.write(*v);
        Ok(())
    })
}

/// # Safety
/// `c` must be null or a handle from [`kummer_coefficients_new`] that has
/// not been freed.
#[no_mangle]
pub unsafe extern "C" fn kummer_coefficients_free(c: *mut KummerCoefficients) {
    if !c.is_null() {
        drop(Box::from_raw(c));
    }
}

/// Residual of the scaled three-term recurrence for `M̃` or `Ũ` at
/// `(a, b, z)`, where `Ũ(a,b,z)` has second argument `b`.
///
/// # Safety
/// `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn kummer_recurrence_residual(
    which: KummerWhich,
    a: f64,
    b: f64,
    z: f64,
    terms: u32,
    out: *mut f64,
) -> KummerStatus {
    guard(|| {
        if out.is_null() {
            return Err(null("out"));
        }
        let p = lift(Parameters::new(a, b, z))?;
        let r = lift(recurrence_residual(which_of(which), &p, terms as usize))?;
        out.write(r.residual);
        Ok(())
    })
}

/// Residual of the scaled Wronskian relation at `(a, b, z)`.
///
/// # Safety
/// `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn kummer_wronskian_residual(a: f64, b: f64, z: f64, terms: u32, out: *mut f64) -> KummerStatus {
    guard(|| {
        if out.is_null() {
            return Err(null("out"));
        }
        let p = lift(Parameters::new(a, b, z))?;
        let r = lift(wronskian_residual(&p, terms as usize))?;
        out.write(r.residual);
        Ok(())
    })
}

/// Message of the last failed call on this thread, or null. The pointer is
/// valid until the next call into this library on the same thread.
#[no_mangle]
pub extern "C" fn kummer_last_error_message() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(ptr::null(), |c| c.as_ptr()))
}
