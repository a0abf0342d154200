//! C ABI over the `diffset` core.
//!
//! Rings and subsets are opaque heap handles released with their `_free`
//! function. Every fallible call returns a [`DsStatus`] and writes results
//! through out-pointers; the message of the last failure on the calling
//! thread is available from [`ds_last_error_message`]. Pointers passed in
//! must be null or valid for the access the function describes.

#![allow(clippy::missing_safety_doc)]

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;
use std::sync::Arc;

use diffset::covering::{cov_exact, theorem_cover_certificate, CoverKind};
use diffset::equations::{minimal_divisor_d, product_of_differences};
use diffset::spectral::kloosterman;
use diffset::{Error, RingCtx, SubsetZq};

/// Call outcome.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DsStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidArgument = 2,
    NotAUnit = 3,
    Parse = 4,
    ModulusMismatch = 5,
    Infeasible = 6,
    EmptySet = 7,
    BufferTooSmall = 8,
    Panic = 9,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DsCoverKind {
    Additive = 0,
    Multiplicative = 1,
}

/// `Z_q` with its cached factorization.
pub struct DsRing {
    ctx: Arc<RingCtx>,
}

/// A subset of `Z_q`.
pub struct DsSubset {
    set: SubsetZq,
}

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_error(msg: String) {
    let c = CString::new(msg.replace('\0', " ")).expect("interior nul removed");
    LAST_ERROR.with(|e| *e.borrow_mut() = Some(c));
}

struct Failure(DsStatus, String);

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let status = match e {
            Error::NotAUnit { .. } | Error::DenominatorNotUnit { .. } => DsStatus::NotAUnit,
            Error::Parse(_) => DsStatus::Parse,
            Error::ModulusMismatch { .. } => DsStatus::ModulusMismatch,
            Error::Infeasible(_) => DsStatus::Infeasible,
            Error::EmptySet => DsStatus::EmptySet,
            _ => DsStatus::InvalidArgument,
        };
        Failure(status, e.to_string())
    }
}

fn null(what: &str) -> Failure {
    Failure(DsStatus::NullPointer, format!("{what} is null"))
}

fn guard(f: impl FnOnce() -> Result<(), Failure>) -> DsStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => DsStatus::Ok,
        Ok(Err(Failure(status, msg))) => {
            set_error(msg);
            status
        }
        Err(panic) => {
            let msg = panic
                .downcast_ref::<&str>()
                .map(|s| s.to_string())
                .or_else(|| panic.downcast_ref::<String>().cloned())
                .unwrap_or_else(|| "panic".into());
            set_error(msg);
            DsStatus::Panic
        }
    }
}

unsafe fn deref<'a, T>(p: *const T, what: &str) -> Result<&'a T, Failure> {
    p.as_ref().ok_or_else(|| null(what))
}

unsafe fn write<T>(out: *mut T, value: T, what: &str) -> Result<(), Failure> {
    if out.is_null() {
        return Err(null(what));
    }
    out.write(value);
    Ok(())
}

unsafe fn emit_subset(out: *mut *mut DsSubset, set: SubsetZq) -> Result<(), Failure> {
    write(out, Box::into_raw(Box::new(DsSubset { set })), "out")
}

/// Message of the last failed call on this thread, or null. Valid until the
/// next failing call on the same thread.
#[no_mangle]
pub extern "C" fn ds_last_error_message() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(ptr::null(), |c| c.as_ptr()))
}

#[no_mangle]
pub unsafe extern "C" fn ds_ring_new(q: u64, out: *mut *mut DsRing) -> DsStatus {
    guard(|| {
        let ctx = RingCtx::shared(q)?;
        write(out, Box::into_raw(Box::new(DsRing { ctx })), "out")
    })
}

#[no_mangle]
pub unsafe extern "C" fn ds_ring_free(ring: *mut DsRing) {
    if !ring.is_null() {
        drop(Box::from_raw(ring));
    }
}

/// `q`, or `0` for a null handle.
#[no_mangle]
pub unsafe extern "C" fn ds_ring_modulus(ring: *const DsRing) -> u64 {
    ring.as_ref().map_or(0, |r| r.ctx.modulus())
}

/// `φ(q)`, or `0` for a null handle.
#[no_mangle]
pub unsafe extern "C" fn ds_ring_phi(ring: *const DsRing) -> u64 {
    ring.as_ref().map_or(0, |r| r.ctx.phi())
}

/// `τ(q)`, or `0` for a null handle.
#[no_mangle]
pub unsafe extern "C" fn ds_ring_tau(ring: *const DsRing) -> u64 {
    ring.as_ref().map_or(0, |r| r.ctx.tau())
}

#[no_mangle]
pub unsafe extern "C" fn ds_ring_mod_inverse(ring: *const DsRing, x: u64, out: *mut u64) -> DsStatus {
    guard(|| {
        let r = deref(ring, "ring")?;
        write(out, r.ctx.mod_inverse(x)?, "out")
    })
}

/// `K_q(λ, r)` as real and imaginary parts.
#[no_mangle]
pub unsafe extern "C" fn ds_kloosterman(
    ring: *const DsRing,
    lambda: u64,
    r: u64,
    out_re: *mut f64,
    out_im: *mut f64,
) -> DsStatus {
    guard(|| {
        let ring = deref(ring, "ring")?;
        let k = kloosterman(&ring.ctx, lambda, r);
        write(out_re, k.re, "out_re")?;
        write(out_im, k.im, "out_im")
    })
}

/// Elements are reduced modulo `q`; `elems` may be null when `len` is 0.
#[no_mangle]
pub unsafe extern "C" fn ds_subset_from_elements(
    ring: *const DsRing,
    elems: *const u64,
    len: usize,
    out: *mut *mut DsSubset,
) -> DsStatus {
    guard(|| {
        let r = deref(ring, "ring")?;
        let slice = if len == 0 {
            &[][..]
        } else if elems.is_null() {
            return Err(null("elems"));
        } else {
            std::slice::from_raw_parts(elems, len)
        };
        emit_subset(out, SubsetZq::from_elements(&r.ctx, slice.iter().copied()))
    })
}

/// Parses `q=<int>; {e1,e2,...}`.
#[no_mangle]
pub unsafe extern "C" fn ds_subset_parse(literal: *const c_char, out: *mut *mut DsSubset) -> DsStatus {
    guard(|| {
        if literal.is_null() {
            return Err(null("literal"));
        }
        let text = CStr::from_ptr(literal)
            .to_str()
            .map_err(|_| Failure(DsStatus::Parse, "literal is not UTF-8".into()))?;
        emit_subset(out, text.parse::<SubsetZq>()?)
    })
}

#[no_mangle]
pub unsafe extern "C" fn ds_subset_free(set: *mut DsSubset) {
    if !set.is_null() {
        drop(Box::from_raw(set));
    }
}

/// `|S|`, or `0` for a null handle.
#[no_mangle]
pub unsafe extern "C" fn ds_subset_len(set: *const DsSubset) -> usize {
    set.as_ref().map_or(0, |s| s.set.len())
}

/// Modulus of the set, or `0` for a null handle.
#[no_mangle]
pub unsafe extern "C" fn ds_subset_modulus(set: *const DsSubset) -> u64 {
    set.as_ref().map_or(0, |s| s.set.modulus())
}

#[no_mangle]
pub unsafe extern "C" fn ds_subset_contains(set: *const DsSubset, x: u64) -> bool {
    set.as_ref().is_some_and(|s| s.set.contains(x))
}

/// Copies the elements in ascending order into `buf`. `out_len` always
/// receives `|S|`; `BufferTooSmall` is returned if `cap < |S|`.
#[no_mangle]
pub unsafe extern "C" fn ds_subset_to_elements(
    set: *const DsSubset,
    buf: *mut u64,
    cap: usize,
    out_len: *mut usize,
) -> DsStatus {
    guard(|| {
        let s = deref(set, "set")?;
        write(out_len, s.set.len(), "out_len")?;
        if cap < s.set.len() {
            return Err(Failure(
                DsStatus::BufferTooSmall,
                format!("buffer holds {cap}, set has {}", s.set.len()),
            ));
        }
        if s.set.is_empty() {
            return Ok(());
        }
        if buf.is_null() {
            return Err(null("buf"));
        }
        for (i, x) in s.set.iter().enumerate() {
            buf.add(i).write(x);
        }
        Ok(())
    })
}

/// `q=<int>; {..}` as a new C string, released with [`ds_string_free`];
/// null for a null handle.
#[no_mangle]
pub unsafe extern "C" fn ds_subset_to_string(set: *const DsSubset) -> *mut c_char {
    match set.as_ref() {
        Some(s) => CString::new(s.set.to_string()).map_or(ptr::null_mut(), CString::into_raw),
        None => ptr::null_mut(),
    }
}

#[no_mangle]
pub unsafe extern "C" fn ds_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}

/// `S - S`.
#[no_mangle]
pub unsafe extern "C" fn ds_subset_difference(set: *const DsSubset, out: *mut *mut DsSubset) -> DsStatus {
    guard(|| emit_subset(out, deref(set, "set")?.set.difference_set()?))
}

/// `A + B`.
#[no_mangle]
pub unsafe extern "C" fn ds_subset_sumset(
    a: *const DsSubset,
    b: *const DsSubset,
    out: *mut *mut DsSubset,
) -> DsStatus {
    guard(|| emit_subset(out, deref(a, "a")?.set.sumset(&deref(b, "b")?.set)?))
}

/// `A · B`.
#[no_mangle]
pub unsafe extern "C" fn ds_subset_product(
    a: *const DsSubset,
    b: *const DsSubset,
    out: *mut *mut DsSubset,
) -> DsStatus {
    guard(|| emit_subset(out, deref(a, "a")?.set.product_set(&deref(b, "b")?.set)?))
}

/// `λ · S`.
#[no_mangle]
pub unsafe extern "C" fn ds_subset_dilate(
    set: *const DsSubset,
    lambda: u64,
    out: *mut *mut DsSubset,
) -> DsStatus {
    guard(|| emit_subset(out, deref(set, "set")?.set.dilate(lambda)))
}

/// `(A - A)(B - B)`.
#[no_mangle]
pub unsafe extern "C" fn ds_product_of_differences(
    a: *const DsSubset,
    b: *const DsSubset,
    out: *mut *mut DsSubset,
) -> DsStatus {
    guard(|| {
        emit_subset(
            out,
            product_of_differences(&deref(a, "a")?.set, &deref(b, "b")?.set)?,
        )
    })
}

/// Smallest `d | q` with `d·Z_q ⊆ (A - A)(B - B)`.
#[no_mangle]
pub unsafe extern "C" fn ds_minimal_divisor_d(
    a: *const DsSubset,
    b: *const DsSubset,
    out_d: *mut u64,
) -> DsStatus {
    guard(|| {
        let (d, _) = minimal_divisor_d(&deref(a, "a")?.set, &deref(b, "b")?.set)?;
        write(out_d, d, "out_d")
    })
}

/// Exact covering number and a minimum cover `X`; `out_x` may be null.
#[no_mangle]
pub unsafe extern "C" fn ds_cov_exact(
    set: *const DsSubset,
    kind: DsCoverKind,
    out_k: *mut usize,
    out_x: *mut *mut DsSubset,
) -> DsStatus {
    guard(|| {
        let kind = match kind {
            DsCoverKind::Additive => CoverKind::Additive,
            DsCoverKind::Multiplicative => CoverKind::Multiplicative,
        };
        let (k, cert) = cov_exact(&deref(set, "set")?.set, kind)?;
        write(out_k, k, "out_k")?;
        if !out_x.is_null() {
            emit_subset(out_x, cert.x_set)?;
        }
        Ok(())
    })
}

/// `k*`, `X = [k*]^{-1}`, whether `X·(A - A) = Z_q`, and whether the least
/// prime factor of `q` exceeds `2α^{-1} + 3`. `out_x` may be null.
#[no_mangle]
pub unsafe extern "C" fn ds_theorem_cover(
    set: *const DsSubset,
    out_k_star: *mut u64,
    out_x: *mut *mut DsSubset,
    out_verified: *mut bool,
    out_precondition: *mut bool,
) -> DsStatus {
    guard(|| {
        let t = theorem_cover_certificate(&deref(set, "set")?.set)?;
        write(out_k_star, t.k_star, "out_k_star")?;
        write(out_verified, t.certificate.verified, "out_verified")?;
        write(out_precondition, t.precondition_ok, "out_precondition")?;
        if !out_x.is_null() {
            emit_subset(out_x, t.certificate.x_set)?;
        }
        Ok(())
    })
}
