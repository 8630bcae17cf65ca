//! C ABI for `relay_dp`.
//!
//! Conventions:
//! * Every fallible function returns an [`RdpStatus`]; on failure a message is
//!   available from [`rdp_last_error_message`] on the same thread.
//! * Objects are opaque handles created by `*_new`/`*_from_*` functions and
//!   released with the matching `*_free`. Freeing NULL is a no-op.
//! * Panics never cross the boundary; they surface as `RDP_STATUS_PANIC`.

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;
use std::slice;

use relay_dp::channel::{sample_large_scale, sample_small_scale};
use relay_dp::dp::{count_comparisons, dp_solve};
use relay_dp::experiment::ExperimentSpec;
use relay_dp::montecarlo::{is_outage, SimOptions, Simulation};
use relay_dp::selection::{RelayAssignment, Scheme, SelectOptions, Selector};
use relay_dp::topology::{Network, NetworkConfig};
use relay_dp::trellis::BranchWeights;
use relay_dp::Error;

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RdpStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidArgument = 2,
    ConfigError = 3,
    TooFewRelays = 4,
    ShapeMismatch = 5,
    BudgetExceeded = 6,
    BufferTooSmall = 7,
    IoError = 8,
    Panic = 9,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RdpScheme {
    Optimal = 0,
    Exhaustive = 1,
    Greedy = 2,
    HopGreedy = 3,
    Drs = 4,
}

impl From<RdpScheme> for Scheme {
    fn from(s: RdpScheme) -> Self {
        match s {
            RdpScheme::Optimal => Scheme::Optimal,
            RdpScheme::Exhaustive => Scheme::Exhaustive,
            RdpScheme::Greedy => Scheme::Greedy,
            RdpScheme::HopGreedy => Scheme::HopGreedy,
            RdpScheme::Drs => Scheme::Drs,
        }
    }
}

/// Outage estimate of one scheme.
#[repr(C)]
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct RdpOutageEstimate {
    pub trials: u64,
    pub outage_count: u64,
    pub probability: f64,
    pub ci_low: f64,
    pub ci_high: f64,
    pub mean_time_ms: f64,
    pub mean_comparisons: f64,
}

/// A validated network with its trellis state space.
pub struct RdpNetwork {
    net: Network,
    selector: Selector,
}

/// Relays chosen by a selector for one channel realization.
pub struct RdpAssignment {
    inner: RelayAssignment,
}

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_error(msg: String) {
    let c = CString::new(msg.replace('\0', " ")).unwrap_or_default();
    LAST_ERROR.with(|e| *e.borrow_mut() = Some(c));
}

struct Failure(RdpStatus, String);

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let status = match &e {
            Error::TooFewRelays { .. } => RdpStatus::TooFewRelays,
            Error::ShapeMismatch(_) | Error::ThresholdCountMismatch { .. } | Error::RelayCountMismatch { .. } => {
                RdpStatus::ShapeMismatch
            }
            Error::BudgetExceeded { .. } => RdpStatus::BudgetExceeded,
            Error::Config { .. } => RdpStatus::ConfigError,
            Error::Io(_) => RdpStatus::IoError,
            _ => RdpStatus::InvalidArgument,
        };
        Failure(status, e.to_string())
    }
}

fn null(what: &str) -> Failure {
    Failure(RdpStatus::NullPointer, format!("`{what}` is NULL"))
}

fn guard(f: impl FnOnce() -> Result<(), Failure>) -> RdpStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => RdpStatus::Ok,
        Ok(Err(Failure(status, msg))) => {
            set_error(msg);
            status
        }
        Err(_) => {
            set_error("internal panic".into());
            RdpStatus::Panic
        }
    }
}

unsafe fn deref<'a, T>(p: *const T, what: &str) -> Result<&'a T, Failure> {
    // SAFETY: the caller passes a pointer obtained from this library or NULL.
    unsafe { p.as_ref() }.ok_or_else(|| null(what))
}

fn network_handle(config: &NetworkConfig) -> Result<Box<RdpNetwork>, Failure> {
    let net = Network::new(config)?;
    let selector = Selector::new(&net, SelectOptions::default())?;
    Ok(Box::new(RdpNetwork { net, selector }))
}

/// Message of the last failed call on this thread, or NULL. The pointer
/// stays valid until the next failing call on the same thread.
#[no_mangle]
pub extern "C" fn rdp_last_error_message() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(ptr::null(), |c| c.as_ptr()))
}

/// Library version as a static NUL-terminated string.
#[no_mangle]
pub extern "C" fn rdp_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr().cast()
}

/// Network with `n_pairs` pairs, `relays` relays per stage, `n_hops` hops
/// over `distance_km`, and default channel parameters.
///
/// # Safety
/// `out` must be a valid pointer to writable storage for one handle.
#[no_mangle]
pub unsafe extern "C" fn rdp_network_new(
    n_pairs: usize,
    relays: usize,
    n_hops: usize,
    distance_km: f64,
    out: *mut *mut RdpNetwork,
) -> RdpStatus {
    guard(|| {
        if out.is_null() {
            return Err(null("out"));
        }
        let handle = network_handle(&NetworkConfig::new(n_pairs, relays, n_hops, distance_km))?;
        // SAFETY: checked non-null above.
        unsafe { *out = Box::into_raw(handle) };
        Ok(())
    })
}

/// Network described by flat `key = value` text, the same format the
/// command-line tool reads. Unset keys take the tool's defaults.
///
/// # Safety
/// `config` must be a NUL-terminated string; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn rdp_network_from_config(config: *const c_char, out: *mut *mut RdpNetwork) -> RdpStatus {
    guard(|| {
        if config.is_null() {
            return Err(null("config"));
        }
        if out.is_null() {
            return Err(null("out"));
        }
        // SAFETY: non-null and NUL-terminated by contract.
        let text = unsafe { CStr::from_ptr(config) }
            .to_str()
            .map_err(|_| Failure(RdpStatus::InvalidArgument, "config is not UTF-8".into()))?;
        let mut spec = ExperimentSpec::default();
        spec.apply_config_str(text)?;
        let handle = network_handle(&spec.config)?;
        // SAFETY: checked non-null above.
        unsafe { *out = Box::into_raw(handle) };
        Ok(())
    })
}

/// # Safety
/// `net` must be NULL or a handle from this library not yet freed.
#[no_mangle]
pub unsafe extern "C" fn rdp_network_free(net: *mut RdpNetwork) {
    if !net.is_null() {
        // SAFETY: ownership returns to Rust exactly once.
        drop(unsafe { Box::from_raw(net) });
    }
}

/// Pair count, relays per stage (after padding), hops and trellis states
/// per stage. Any output pointer may be NULL.
///
/// # Safety
/// `net` must be a live handle; non-NULL outputs must be writable.
#[no_mangle]
pub unsafe extern "C" fn rdp_network_shape(
    net: *const RdpNetwork,
    n_pairs: *mut usize,
    relays: *mut usize,
    n_hops: *mut usize,
    states: *mut usize,
) -> RdpStatus {
    guard(|| {
        // SAFETY: handle validity is the caller's contract.
        let h = unsafe { deref(net, "net") }?;
        let values = [
            (n_pairs, h.net.n_pairs()),
            (relays, h.net.relays()),
            (n_hops, h.net.n_hops()),
            (states, h.selector.space().len()),
        ];
        for (p, v) in values {
            if !p.is_null() {
                // SAFETY: non-null outputs are writable by contract.
                unsafe { *p = v };
            }
        }
        Ok(())
    })
}

/// Samples the channel of `slot` under `seed` and runs `scheme` on it.
///
/// # Safety
/// `net` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn rdp_select(
    net: *const RdpNetwork,
    scheme: RdpScheme,
    seed: u64,
    slot: u64,
    out: *mut *mut RdpAssignment,
) -> RdpStatus {
    guard(|| {
        // SAFETY: handle validity is the caller's contract.
        let h = unsafe { deref(net, "net") }?;
        if out.is_null() {
            return Err(null("out"));
        }
        if slot >= 1 << 63 {
            return Err(Failure(RdpStatus::InvalidArgument, "slot must be below 2^63".into()));
        }
        let channel = sample_small_scale(&sample_large_scale(&h.net, seed), seed, slot);
        let inner = h.selector.select(scheme.into(), &channel)?;
        // SAFETY: checked non-null above.
        unsafe { *out = Box::into_raw(Box::new(RdpAssignment { inner })) };
        Ok(())
    })
}

/// # Safety
/// `a` must be NULL or a handle from this library not yet freed.
#[no_mangle]
pub unsafe extern "C" fn rdp_assignment_free(a: *mut RdpAssignment) {
    if !a.is_null() {
        // SAFETY: ownership returns to Rust exactly once.
        drop(unsafe { Box::from_raw(a) });
    }
}

/// Smallest normalized end-to-end SINR over all pairs; NaN for NULL.
///
/// # Safety
/// `a` must be NULL or a live handle.
#[no_mangle]
pub unsafe extern "C" fn rdp_assignment_value(a: *const RdpAssignment) -> f64 {
    // SAFETY: NULL or live by contract.
    unsafe { a.as_ref() }.map_or(f64::NAN, |a| a.inner.value)
}

/// Comparisons (or visited paths) spent by the selector; 0 for NULL.
///
/// # Safety
/// `a` must be NULL or a live handle.
#[no_mangle]
pub unsafe extern "C" fn rdp_assignment_comparisons(a: *const RdpAssignment) -> u64 {
    // SAFETY: NULL or live by contract.
    unsafe { a.as_ref() }.map_or(0, |a| a.inner.comparisons)
}

/// True when some pair's normalized SINR is below 1; true for NULL.
///
/// # Safety
/// `a` must be NULL or a live handle.
#[no_mangle]
pub unsafe extern "C" fn rdp_assignment_is_outage(a: *const RdpAssignment) -> bool {
    // SAFETY: NULL or live by contract.
    unsafe { a.as_ref() }.is_none_or(|a| is_outage(&a.inner))
}

/// Copies the relays as a row-major `stages x pairs` array into `out`.
/// With `out` NULL, only reports the required length through `len_out`.
///
/// # Safety
/// `a` must be a live handle; `out` must hold `capacity` elements.
#[no_mangle]
pub unsafe extern "C" fn rdp_assignment_relays(
    a: *const RdpAssignment,
    out: *mut usize,
    capacity: usize,
    len_out: *mut usize,
) -> RdpStatus {
    guard(|| {
        // SAFETY: handle validity is the caller's contract.
        let a = unsafe { deref(a, "assignment") }?;
        let flat: Vec<usize> = a.inner.relays.concat();
        // SAFETY: output pointers follow the documented contract.
        unsafe { copy_out(&flat, out, capacity, len_out) }
    })
}

/// Copies the per-pair normalized end-to-end SINRs into `out`.
///
/// # Safety
/// As for [`rdp_assignment_relays`].
#[no_mangle]
pub unsafe extern "C" fn rdp_assignment_per_user_sinr(
    a: *const RdpAssignment,
    out: *mut f64,
    capacity: usize,
    len_out: *mut usize,
) -> RdpStatus {
    guard(|| {
        // SAFETY: handle validity is the caller's contract.
        let a = unsafe { deref(a, "assignment") }?;
        // SAFETY: output pointers follow the documented contract.
        unsafe { copy_out(&a.inner.per_user_sinr, out, capacity, len_out) }
    })
}

unsafe fn copy_out<T: Copy>(data: &[T], out: *mut T, capacity: usize, len_out: *mut usize) -> Result<(), Failure> {
    if !len_out.is_null() {
        // SAFETY: writable by contract.
        unsafe { *len_out = data.len() };
    }
    if out.is_null() {
        return if len_out.is_null() { Err(null("out")) } else { Ok(()) };
    }
    if capacity < data.len() {
        return Err(Failure(
            RdpStatus::BufferTooSmall,
            format!("need {} elements, buffer holds {capacity}", data.len()),
        ));
    }
    // SAFETY: `out` holds at least `capacity >= data.len()` elements.
    unsafe { ptr::copy_nonoverlapping(data.as_ptr(), out, data.len()) };
    Ok(())
}

/// Max-min path through explicit branch weights.
///
/// `weights` holds `2 Z + (L-2) Z^2` values: the `Z` weights out of the
/// source layer, then each interior hop as a row-major `Z x Z` matrix
/// (`from`, `to`), then the `Z` weights into the destination layer. The
/// `L-1` chosen states go to `path`.
///
/// # Safety
/// `weights` must hold `weights_len` values and `path` `path_len` slots;
/// `value` and `comparisons` may be NULL.
#[no_mangle]
pub unsafe extern "C" fn rdp_solve_weights(
    states: usize,
    hops: usize,
    weights: *const f64,
    weights_len: usize,
    path: *mut usize,
    path_len: usize,
    value: *mut f64,
    comparisons: *mut u64,
) -> RdpStatus {
    guard(|| {
        if weights.is_null() {
            return Err(null("weights"));
        }
        if path.is_null() {
            return Err(null("path"));
        }
        if hops < 2 {
            return Err(Error::TooFewHops(hops).into());
        }
        let expected = states
            .checked_mul(states)
            .and_then(|zz| zz.checked_mul(hops - 2))
            .and_then(|v| v.checked_add(2 * states))
            .ok_or_else(|| Failure(RdpStatus::InvalidArgument, "trellis too large".into()))?;
        if weights_len != expected {
            return Err(Failure(
                RdpStatus::ShapeMismatch,
                format!("expected {expected} weights for Z={states}, L={hops}, got {weights_len}"),
            ));
        }
        if path_len < hops - 1 {
            return Err(Failure(
                RdpStatus::BufferTooSmall,
                format!("path needs {} slots, got {path_len}", hops - 1),
            ));
        }
        // SAFETY: `weights` holds `weights_len` values by contract.
        let w = unsafe { slice::from_raw_parts(weights, weights_len) };
        let first = w[..states].to_vec();
        let interior = w[states..weights_len - states].chunks(states * states.max(1)).map(<[f64]>::to_vec).collect();
        let last = w[weights_len - states..].to_vec();
        let bw = BranchWeights::new(states, first, interior, last)?;
        let sol = dp_solve(&bw)?;
        // SAFETY: `path` holds `path_len >= L-1` slots; other outputs are
        // NULL or writable.
        unsafe {
            ptr::copy_nonoverlapping(sol.path.as_ptr(), path, sol.path.len());
            if !value.is_null() {
                *value = sol.value;
            }
            if !comparisons.is_null() {
                *comparisons = sol.tables.comparisons();
            }
        }
        Ok(())
    })
}

/// Monte-Carlo outage of `scheme` over `n_slots` slots.
///
/// # Safety
/// `net` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn rdp_estimate_outage(
    net: *const RdpNetwork,
    scheme: RdpScheme,
    n_slots: u64,
    seed: u64,
    out: *mut RdpOutageEstimate,
) -> RdpStatus {
    guard(|| {
        // SAFETY: handle validity is the caller's contract.
        let h = unsafe { deref(net, "net") }?;
        if out.is_null() {
            return Err(null("out"));
        }
        let sim = Simulation::new(&h.net, &[scheme.into()], seed, &SimOptions::default())?;
        let e = sim.estimate(n_slots)?.remove(0);
        // SAFETY: checked non-null above.
        unsafe {
            *out = RdpOutageEstimate {
                trials: e.trials,
                outage_count: e.outage_count,
                probability: e.probability,
                ci_low: e.ci_low,
                ci_high: e.ci_high,
                mean_time_ms: e.mean_time_ms,
                mean_comparisons: e.mean_comparisons,
            }
        };
        Ok(())
    })
}

/// `Z + Z^2 (L-2)`, or 0 when `hops < 2`.
#[no_mangle]
pub extern "C" fn rdp_count_comparisons(states: u64, hops: u64) -> u64 {
    if hops < 2 {
        0
    } else {
        count_comparisons(states, hops)
    }
}
