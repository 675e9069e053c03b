//! C ABI over `apgaps`.
//!
//! Every fallible function returns an [`ApgStatus`]; results go through out
//! pointers. On failure a message is kept per thread and can be read with
//! [`apg_last_error_message`]. Scans are returned as opaque [`ApgScan`]
//! handles that must be released with [`apg_scan_free`].

use std::cell::RefCell;
use std::ffi::{c_char, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use apgaps::brun;
use apgaps::evstats::fit_gumbel;
use apgaps::numutil::{log_integral, totient};
use apgaps::trend::predict_first_occurrence;
use apgaps::{Error, ResidueClass, ScanResult, SieveConfig};

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ApgStatus {
    Ok = 0,
    /// Argument outside the domain of the operation, or an invalid residue class.
    InvalidArgument = 1,
    /// A required pointer was null.
    NullPointer = 2,
    /// The sieve budget would be exceeded.
    BudgetExceeded = 3,
    /// Index past the end of a result set.
    OutOfRange = 4,
    /// Overflow, non-convergence, I/O or other failure while computing.
    Computation = 5,
    /// A Rust panic was caught at the boundary.
    Panic = 6,
}

/// Opaque result of a gap scan.
pub struct ApgScan {
    result: ScanResult,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ApgGapEvent {
    pub start_prime: u64,
    pub end_prime: u64,
    pub size: u64,
    pub is_maximal: bool,
    /// 1-based index among maximal gaps, 0 when the gap is not maximal.
    pub maximal_index: u64,
    /// 1-based index among first-occurrence gaps.
    pub fo_index: u64,
    pub csg: f64,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ApgGumbelFit {
    pub scale: f64,
    pub mode: f64,
    pub ks: f64,
}

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_error(msg: String) {
    let c = CString::new(msg.replace('\0', " ")).unwrap_or_default();
    LAST_ERROR.with(|e| *e.borrow_mut() = Some(c));
}

fn status_of(err: &Error) -> ApgStatus {
    match err {
        Error::Budget { .. } => ApgStatus::BudgetExceeded,
        Error::Domain(_)
        | Error::Range(_)
        | Error::InvalidClass { .. }
        | Error::NotFound(_)
        | Error::EmptySample
        | Error::InsufficientSample { .. } => ApgStatus::InvalidArgument,
        _ => ApgStatus::Computation,
    }
}

/// Runs `f` with panics contained, recording any error message.
fn guard<F: FnOnce() -> Result<(), (ApgStatus, String)>>(f: F) -> ApgStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => {
            LAST_ERROR.with(|e| *e.borrow_mut() = None);
            ApgStatus::Ok
        }
        Ok(Err((status, msg))) => {
            set_error(msg);
            status
        }
        Err(_) => {
            set_error("panic inside apgaps".into());
            ApgStatus::Panic
        }
    }
}

fn lib<T>(r: apgaps::Result<T>) -> Result<T, (ApgStatus, String)> {
    r.map_err(|e| (status_of(&e), e.to_string()))
}

fn invalid(msg: &str) -> (ApgStatus, String) {
    (ApgStatus::InvalidArgument, msg.to_string())
}

fn write_out<T>(out: *mut T, value: T) -> Result<(), (ApgStatus, String)> {
    if out.is_null() {
        return Err((ApgStatus::NullPointer, "output pointer is null".into()));
    }
    // SAFETY: non-null, and the caller promises it points to writable storage for T.
    unsafe { out.write(value) };
    Ok(())
}

/// Message for the last failed call on this thread, or NULL. The pointer stays
/// valid until the next apgaps call on the same thread.
#[no_mangle]
pub extern "C" fn apg_last_error_message() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(ptr::null(), |s| s.as_ptr()))
}

#[no_mangle]
pub extern "C" fn apg_clear_last_error() {
    LAST_ERROR.with(|e| *e.borrow_mut() = None);
}

/// Scans the class r mod q up to x_max on `threads` worker threads.
///
/// # Safety
/// `out` must be null or point to writable storage for one pointer.
#[no_mangle]
pub unsafe extern "C" fn apg_scan_create(q: u64, r: u64, x_max: u64, threads: u32, out: *mut *mut ApgScan) -> ApgStatus {
    guard(|| {
        if out.is_null() {
            return Err((ApgStatus::NullPointer, "output pointer is null".into()));
        }
        let cls = lib(ResidueClass::new(q, r))?;
        let cfg = SieveConfig::with_threads(threads.max(1) as usize);
        let result = lib(apgaps::scan_with(cls, x_max, &cfg))?;
        write_out(out, Box::into_raw(Box::new(ApgScan { result })))
    })
}

/// Number of events in a scan; 0 for a null handle.
///
/// # Safety
/// `scan` must be null or a live handle from [`apg_scan_create`].
#[no_mangle]
pub unsafe extern "C" fn apg_scan_event_count(scan: *const ApgScan) -> usize {
    // SAFETY: caller guarantees the handle is live.
    unsafe { scan.as_ref() }.map_or(0, |s| s.result.events.len())
}

/// Number of maximal gaps in a scan; 0 for a null handle.
///
/// # Safety
/// `scan` must be null or a live handle from [`apg_scan_create`].
#[no_mangle]
pub unsafe extern "C" fn apg_scan_maximal_count(scan: *const ApgScan) -> u64 {
    // SAFETY: caller guarantees the handle is live.
    unsafe { scan.as_ref() }.map_or(0, |s| s.result.n_maximal)
}

/// Copies event `index` (in order of end prime) into `out`.
///
/// # Safety
/// `scan` must be null or a live handle; `out` must be null or writable.
#[no_mangle]
pub unsafe extern "C" fn apg_scan_get_event(scan: *const ApgScan, index: usize, out: *mut ApgGapEvent) -> ApgStatus {
    guard(|| {
        // SAFETY: caller guarantees the handle is live.
        let Some(s) = (unsafe { scan.as_ref() }) else {
            return Err((ApgStatus::NullPointer, "scan handle is null".into()));
        };
        let Some(e) = s.result.events.get(index) else {
            return Err((
                ApgStatus::OutOfRange,
                format!("event index {index} out of range (count {})", s.result.events.len()),
            ));
        };
        write_out(
            out,
            ApgGapEvent {
                start_prime: e.start_prime,
                end_prime: e.end_prime,
                size: e.size,
                is_maximal: e.is_maximal,
                maximal_index: e.maximal_index.unwrap_or(0),
                fo_index: e.fo_index.unwrap_or(0),
                csg: e.csg,
            },
        )
    })
}

/// Releases a scan handle. Null is ignored.
///
/// # Safety
/// `scan` must be null or a handle from [`apg_scan_create`] not yet freed.
#[no_mangle]
pub unsafe extern "C" fn apg_scan_free(scan: *mut ApgScan) {
    if !scan.is_null() {
        // SAFETY: the handle came from Box::into_raw and is freed once.
        drop(unsafe { Box::from_raw(scan) });
    }
}

/// # Safety
/// `out` must be null or writable.
#[no_mangle]
pub unsafe extern "C" fn apg_totient(q: u64, out: *mut u64) -> ApgStatus {
    guard(|| {
        if q == 0 {
            return Err(invalid("totient needs q >= 1"));
        }
        write_out(out, totient(q))
    })
}

/// # Safety
/// `out` must be null or writable.
#[no_mangle]
pub unsafe extern "C" fn apg_log_integral(x: f64, out: *mut f64) -> ApgStatus {
    guard(|| write_out(out, lib(log_integral(x))?))
}

/// Mean of S(d) over d = r + nq as num/den times 1/(twin prime constant), and its value.
///
/// # Safety
/// Each out pointer must be null or writable; all three are required.
#[no_mangle]
pub unsafe extern "C" fn apg_mean_singular_product(
    q: u64,
    r: u64,
    num: *mut u64,
    den: *mut u64,
    value: *mut f64,
) -> ApgStatus {
    guard(|| {
        let m = lib(brun::mean_singular_product(q, r))?;
        write_out(num, *m.multiplier.numer())?;
        write_out(den, *m.multiplier.denom())?;
        write_out(value, m.value)
    })
}

/// sqrt(d) e^sqrt(d / phi(q)); +inf when too large for a double.
///
/// # Safety
/// `out` must be null or writable.
#[no_mangle]
pub unsafe extern "C" fn apg_predict_first_occurrence(d: u64, q: u64, out: *mut f64) -> ApgStatus {
    guard(|| {
        if q == 0 || d == 0 {
            return Err(invalid("need d >= 1 and q >= 1"));
        }
        write_out(out, predict_first_occurrence(d, q))
    })
}

/// Maximum-likelihood Gumbel fit of `n` samples.
///
/// # Safety
/// `samples` must point to `n` readable doubles; `out` must be null or writable.
#[no_mangle]
pub unsafe extern "C" fn apg_fit_gumbel(samples: *const f64, n: usize, out: *mut ApgGumbelFit) -> ApgStatus {
    guard(|| {
        if samples.is_null() {
            return Err((ApgStatus::NullPointer, "samples pointer is null".into()));
        }
        // SAFETY: caller guarantees `n` readable doubles.
        let xs = unsafe { std::slice::from_raw_parts(samples, n) };
        let fit = lib(fit_gumbel(xs))?;
        write_out(out, ApgGumbelFit { scale: fit.scale, mode: fit.mode, ks: fit.ks })
    })
}

/// Sum of 1/p + 1/p' over consecutive primes p < p' <= x of r mod q with p' - p = d.
///
/// # Safety
/// `out` must be null or writable.
#[no_mangle]
pub unsafe extern "C" fn apg_brun_partial_sum(d: u64, q: u64, r: u64, x: u64, out: *mut f64) -> ApgStatus {
    guard(|| {
        let cls = lib(ResidueClass::new(q, r))?;
        write_out(out, lib(brun::brun_partial_sum(d, cls, x))?.partial_sum)
    })
}
