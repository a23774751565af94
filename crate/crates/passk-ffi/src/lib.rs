//! C ABI for the passk simulation library.
//!
//! Instances travel as opaque handles created from JSON, files, or generator
//! specs; every fallible call returns a [`PasskStatus`] and writes its result
//! through an out-pointer. On failure, [`passk_last_error`] returns a
//! thread-local message describing what went wrong.
//!
//! # Safety
//!
//! Callers own every handle and string this library returns and must release
//! them with `passk_instance_free` / `passk_string_free` exactly once.
//! Pointers passed in must be valid for the duration of the call; strings
//! must be NUL-terminated UTF-8.

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use passk::{bounds, hard_instances, simulation, Error, Instance, StrategySpec};

/// Result code of a C API call.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PasskStatus {
    Ok = 0,
    /// A required pointer argument was NULL.
    NullPointer = 1,
    /// A string argument was not valid UTF-8.
    InvalidUtf8 = 2,
    /// A strategy or generator spec string did not parse.
    ParseError = 3,
    /// An instance failed validation; see `passk_last_error`.
    InvalidInstance = 4,
    /// A parameter violated a documented precondition.
    Precondition = 5,
    /// Exhaustive enumeration would exceed its state-count guard.
    Infeasible = 6,
    /// File I/O failed.
    IoError = 7,
    /// Internal failure (a panic was caught at the boundary).
    Internal = 8,
}

/// Opaque handle to a validated instance.
#[repr(C)]
pub struct PasskInstance {
    _private: [u8; 0],
}

/// Monte Carlo regret estimate.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PasskRegretEstimate {
    pub mean: f64,
    /// Standard error of the mean (named to avoid C's `stderr` macro).
    pub std_error: f64,
    pub trials: u64,
    pub ci95_low: f64,
    pub ci95_high: f64,
}

/// Derived instance statistics.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PasskDerivedStats {
    /// Coverage coefficient C*.
    pub coverage: f64,
    pub eps_rm: f64,
    pub eps_opt: f64,
}

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_error(message: String) {
    let message = CString::new(message).unwrap_or_else(|_| CString::new("invalid error text").unwrap());
    LAST_ERROR.with(|slot| *slot.borrow_mut() = Some(message));
}

fn status_of(err: &Error) -> PasskStatus {
    match err {
        Error::InvalidInstance(_) => PasskStatus::InvalidInstance,
        Error::BadStrategySpec { .. } => PasskStatus::ParseError,
        Error::Json(_) | Error::Ingest { .. } => PasskStatus::ParseError,
        Error::EnumerationInfeasible { .. } => PasskStatus::Infeasible,
        Error::Io(_) => PasskStatus::IoError,
        Error::DegenerateInstance(_)
        | Error::Precondition(_)
        | Error::InsufficientData(_)
        | Error::UndefinedBudget
        | Error::InconsistentCorrectness { .. } => PasskStatus::Precondition,
    }
}

fn fail(err: Error) -> PasskStatus {
    let status = status_of(&err);
    set_error(err.to_string());
    status
}

/// Runs `f` with panics caught at the ABI boundary.
fn guarded(f: impl FnOnce() -> PasskStatus) -> PasskStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(status) => status,
        Err(_) => {
            set_error("internal panic".into());
            PasskStatus::Internal
        }
    }
}

fn instance_ref<'a>(handle: *const PasskInstance) -> Option<&'a Instance> {
    unsafe { (handle as *const Instance).as_ref() }
}

fn leak(instance: Instance) -> *mut PasskInstance {
    Box::into_raw(Box::new(instance)) as *mut PasskInstance
}

fn read_str<'a>(ptr: *const c_char) -> Result<&'a str, PasskStatus> {
    if ptr.is_null() {
        set_error("NULL string argument".into());
        return Err(PasskStatus::NullPointer);
    }
    unsafe { CStr::from_ptr(ptr) }.to_str().map_err(|_| {
        set_error("string argument is not valid UTF-8".into());
        PasskStatus::InvalidUtf8
    })
}

macro_rules! out_ptr {
    ($ptr:expr) => {
        match unsafe { $ptr.as_mut() } {
            Some(slot) => slot,
            None => {
                set_error("NULL out-pointer".into());
                return PasskStatus::NullPointer;
            }
        }
    };
}

/// Message for the most recent failure on this thread, or NULL.
///
/// The pointer stays valid until the next failing call on the same thread.
#[no_mangle]
pub extern "C" fn passk_last_error() -> *const c_char {
    LAST_ERROR.with(|slot| slot.borrow().as_ref().map_or(ptr::null(), |s| s.as_ptr()))
}

/// Parses and validates an instance from its JSON document.
///
/// # Safety
///
/// Pointer arguments must be valid (or NULL where documented); handles must
/// come from this library and still be live.
#[no_mangle]
pub unsafe extern "C" fn passk_instance_from_json(
    json: *const c_char,
    out: *mut *mut PasskInstance,
) -> PasskStatus {
    guarded(|| {
        let slot = out_ptr!(out);
        let text = match read_str(json) {
            Ok(text) => text,
            Err(status) => return status,
        };
        match Instance::from_json(text) {
            Ok(instance) => {
                *slot = leak(instance);
                PasskStatus::Ok
            }
            Err(err) => fail(err),
        }
    })
}

/// Loads and validates an instance from a JSON file.
///
/// # Safety
///
/// Pointer arguments must be valid (or NULL where documented); handles must
/// come from this library and still be live.
#[no_mangle]
pub unsafe extern "C" fn passk_instance_from_file(
    path: *const c_char,
    out: *mut *mut PasskInstance,
) -> PasskStatus {
    guarded(|| {
        let slot = out_ptr!(out);
        let path = match read_str(path) {
            Ok(path) => path,
            Err(status) => return status,
        };
        match Instance::load(path) {
            Ok(instance) => {
                *slot = leak(instance);
                PasskStatus::Ok
            }
            Err(err) => fail(err),
        }
    })
}

/// Builds one member of a generator-spec family, e.g.
/// `"hammer:cstar=16,k=4,m=8,eps_rm=0.1"` (see the README for the grammar).
///
/// # Safety
///
/// Pointer arguments must be valid (or NULL where documented); handles must
/// come from this library and still be live.
#[no_mangle]
pub unsafe extern "C" fn passk_instance_from_spec(
    spec: *const c_char,
    member: usize,
    out: *mut *mut PasskInstance,
) -> PasskStatus {
    guarded(|| {
        let slot = out_ptr!(out);
        let spec = match read_str(spec) {
            Ok(spec) => spec,
            Err(status) => return status,
        };
        let family = match hard_instances::from_spec(spec) {
            Ok(family) => family,
            Err(err) => return fail(err),
        };
        let len = family.len();
        match family.into_iter().nth(member) {
            Some(instance) => {
                *slot = leak(instance);
                PasskStatus::Ok
            }
            None => fail(Error::Precondition(format!(
                "member {member} out of range for a family of {len}"
            ))),
        }
    })
}

/// Number of members the generator spec would produce.
///
/// # Safety
///
/// Pointer arguments must be valid (or NULL where documented); handles must
/// come from this library and still be live.
#[no_mangle]
pub unsafe extern "C" fn passk_spec_family_size(spec: *const c_char, out: *mut usize) -> PasskStatus {
    guarded(|| {
        let slot = out_ptr!(out);
        let spec = match read_str(spec) {
            Ok(spec) => spec,
            Err(status) => return status,
        };
        match hard_instances::from_spec(spec) {
            Ok(family) => {
                *slot = family.len();
                PasskStatus::Ok
            }
            Err(err) => fail(err),
        }
    })
}

/// Serializes the instance back to its JSON document. Free the string with
/// `passk_string_free`.
///
/// # Safety
///
/// Pointer arguments must be valid (or NULL where documented); handles must
/// come from this library and still be live.
#[no_mangle]
pub unsafe extern "C" fn passk_instance_to_json(
    instance: *const PasskInstance,
    out: *mut *mut c_char,
) -> PasskStatus {
    guarded(|| {
        let slot = out_ptr!(out);
        let Some(instance) = instance_ref(instance) else {
            set_error("NULL instance handle".into());
            return PasskStatus::NullPointer;
        };
        match CString::new(instance.to_json()) {
            Ok(json) => {
                *slot = json.into_raw();
                PasskStatus::Ok
            }
            Err(_) => {
                set_error("serialized JSON contained NUL".into());
                PasskStatus::Internal
            }
        }
    })
}

/// Releases an instance handle. NULL is a no-op.
///
/// # Safety
///
/// Pointer arguments must be valid (or NULL where documented); handles must
/// come from this library and still be live.
#[no_mangle]
pub unsafe extern "C" fn passk_instance_free(instance: *mut PasskInstance) {
    if !instance.is_null() {
        drop(unsafe { Box::from_raw(instance as *mut Instance) });
    }
}

/// Releases a string returned by this library. NULL is a no-op.
///
/// # Safety
///
/// `text` must have been returned by this library and not freed before.
#[no_mangle]
pub unsafe extern "C" fn passk_string_free(text: *mut c_char) {
    if !text.is_null() {
        drop(CString::from_raw(text));
    }
}

/// Number of responses in the instance's universe.
///
/// # Safety
///
/// Pointer arguments must be valid (or NULL where documented); handles must
/// come from this library and still be live.
#[no_mangle]
pub unsafe extern "C" fn passk_instance_len(instance: *const PasskInstance, out: *mut usize) -> PasskStatus {
    guarded(|| {
        let slot = out_ptr!(out);
        let Some(instance) = instance_ref(instance) else {
            set_error("NULL instance handle".into());
            return PasskStatus::NullPointer;
        };
        *slot = instance.len();
        PasskStatus::Ok
    })
}

/// Coverage coefficient and reward-model errors of the instance.
///
/// # Safety
///
/// Pointer arguments must be valid (or NULL where documented); handles must
/// come from this library and still be live.
#[no_mangle]
pub unsafe extern "C" fn passk_instance_stats(
    instance: *const PasskInstance,
    out: *mut PasskDerivedStats,
) -> PasskStatus {
    guarded(|| {
        let slot = out_ptr!(out);
        let Some(instance) = instance_ref(instance) else {
            set_error("NULL instance handle".into());
            return PasskStatus::NullPointer;
        };
        match instance.derived_stats() {
            Ok(stats) => {
                *slot = PasskDerivedStats {
                    coverage: stats.coverage,
                    eps_rm: stats.eps_rm,
                    eps_opt: stats.eps_opt,
                };
                PasskStatus::Ok
            }
            Err(err) => fail(err),
        }
    })
}

fn parse_strategy(spec: *const c_char) -> Result<StrategySpec, PasskStatus> {
    let text = read_str(spec)?;
    StrategySpec::parse(text).map_err(|err| {
        let status = status_of(&err);
        set_error(err.to_string());
        status
    })
}

/// Monte Carlo regret of `strategy` (a config string such as `"bon"` or
/// `"bom:alpha=auto"`) over `trials` independent batches of `n` draws.
///
/// # Safety
///
/// Pointer arguments must be valid (or NULL where documented); handles must
/// come from this library and still be live.
#[no_mangle]
pub unsafe extern "C" fn passk_estimate_regret(
    instance: *const PasskInstance,
    strategy: *const c_char,
    n: u64,
    k: u64,
    trials: u64,
    seed: u64,
    out: *mut PasskRegretEstimate,
) -> PasskStatus {
    guarded(|| {
        let slot = out_ptr!(out);
        let Some(instance) = instance_ref(instance) else {
            set_error("NULL instance handle".into());
            return PasskStatus::NullPointer;
        };
        let strategy = match parse_strategy(strategy) {
            Ok(strategy) => strategy,
            Err(status) => return status,
        };
        match simulation::estimate_regret(instance, &strategy, n as usize, k as usize, trials, seed) {
            Ok(est) => {
                *slot = PasskRegretEstimate {
                    mean: est.mean,
                    std_error: est.stderr,
                    trials: est.trials,
                    ci95_low: est.ci95.0,
                    ci95_high: est.ci95.1,
                };
                PasskStatus::Ok
            }
            Err(err) => fail(err),
        }
    })
}

/// Exact regret by exhaustive enumeration (guarded by the state-count limit).
///
/// # Safety
///
/// Pointer arguments must be valid (or NULL where documented); handles must
/// come from this library and still be live.
#[no_mangle]
pub unsafe extern "C" fn passk_exact_regret(
    instance: *const PasskInstance,
    strategy: *const c_char,
    n: u64,
    k: u64,
    out: *mut f64,
) -> PasskStatus {
    guarded(|| {
        let slot = out_ptr!(out);
        let Some(instance) = instance_ref(instance) else {
            set_error("NULL instance handle".into());
            return PasskStatus::NullPointer;
        };
        let strategy = match parse_strategy(strategy) {
            Ok(strategy) => strategy,
            Err(status) => return status,
        };
        match simulation::exact_regret_enumeration(instance, &strategy, n as usize, k as usize) {
            Ok(value) => {
                *slot = value;
                PasskStatus::Ok
            }
            Err(err) => fail(err),
        }
    })
}

/// Empirical probability of the frequency-sandwich event at threshold
/// `3/(4 C*)`.
///
/// # Safety
///
/// Pointer arguments must be valid (or NULL where documented); handles must
/// come from this library and still be live.
#[no_mangle]
pub unsafe extern "C" fn passk_event_e_monte_carlo(
    instance: *const PasskInstance,
    n: u64,
    trials: u64,
    seed: u64,
    out: *mut f64,
) -> PasskStatus {
    guarded(|| {
        let slot = out_ptr!(out);
        let Some(instance) = instance_ref(instance) else {
            set_error("NULL instance handle".into());
            return PasskStatus::NullPointer;
        };
        match bounds::event_e_monte_carlo(instance, n as usize, trials, seed) {
            Ok(value) => {
                *slot = value;
                PasskStatus::Ok
            }
            Err(err) => fail(err),
        }
    })
}

/// Best-of-Majority regret upper bound, clamped to [0, 1].
#[no_mangle]
pub extern "C" fn passk_bom_upper_bound(
    c_star: f64,
    k: u64,
    eps_rm: f64,
    eps_opt: f64,
    n: u64,
) -> f64 {
    bounds::bom_upper_bound(c_star, k as usize, eps_rm, eps_opt, n as usize)
}

/// Minimal sampling budget for the Best-of-Majority guarantee.
///
/// # Safety
///
/// Pointer arguments must be valid (or NULL where documented); handles must
/// come from this library and still be live.
#[no_mangle]
pub unsafe extern "C" fn passk_bom_min_budget(
    c_star: f64,
    k: u64,
    eps_rm: f64,
    out: *mut u64,
) -> PasskStatus {
    guarded(|| {
        let slot = out_ptr!(out);
        match bounds::bom_min_budget(c_star, k as usize, eps_rm) {
            Ok(budget) => {
                *slot = budget as u64;
                PasskStatus::Ok
            }
            Err(err) => fail(err),
        }
    })
}

/// Majority-voting constant-regret budget threshold `ceil(9 C* ln(2k + 2))`.
#[no_mangle]
pub extern "C" fn passk_mv_budget(c_star: f64, k: u64) -> u64 {
    bounds::mv_budget(c_star, k as usize) as u64
}

/// Minimax lower bound from an m-member symmetric family.
///
/// # Safety
///
/// Pointer arguments must be valid (or NULL where documented); handles must
/// come from this library and still be live.
#[no_mangle]
pub unsafe extern "C" fn passk_general_lower_bound(
    c_star: f64,
    k: u64,
    m: u64,
    eps_rm: f64,
    out: *mut f64,
) -> PasskStatus {
    guarded(|| {
        let slot = out_ptr!(out);
        match bounds::general_lower_bound(c_star, k as usize, m as usize, eps_rm) {
            Ok(value) => {
                *slot = value;
                PasskStatus::Ok
            }
            Err(err) => fail(err),
        }
    })
}

/// Best-of-N regret lower bound `min(1, 0.004 sqrt(N eps_rm^2 / k))`.
#[no_mangle]
pub extern "C" fn passk_bon_lower_bound(n: u64, k: u64, eps_rm: f64) -> f64 {
    bounds::bon_lower_bound(n as usize, k as usize, eps_rm)
}

/// Analytic lower bound on the frequency-sandwich probability.
#[no_mangle]
pub extern "C" fn passk_event_e_prob_bound(c_star: f64, n: u64) -> f64 {
    bounds::event_e_prob_bound(c_star, n as usize)
}
