//! C ABI for the LPRC solver.
//!
//! Instances are opaque handles created from JSON documents; results come
//! back as heap-allocated JSON strings that the caller must release with
//! `lprc_string_free`. All functions return an error code; the most recent
//! error message per thread is available via `lprc_last_error`.
//!
//! The header shipped at `include/lprc.h` mirrors this surface.

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::ptr;

use lprc::genbench::{run_trials, AlgorithmSpec};
use lprc::instance::{load_instance, validate, Instance};
use lprc::lpcore::DEFAULT_TOLERANCE;
use lprc::oracle::{solve_exact, OracleError, OracleLimits};
use lprc::rational::parse_rat;
use lprc::relaxation::{solve_relaxation, LpMode, Restriction};
use serde_json::json;

/// Success.
pub const LPRC_OK: i32 = 0;
/// A required pointer argument was null.
pub const LPRC_ERR_NULL: i32 = 1;
/// Input was not valid UTF-8 or not parseable.
pub const LPRC_ERR_PARSE: i32 = 2;
/// The instance failed structural validation.
pub const LPRC_ERR_INVALID: i32 = 3;
/// A solver reported an error.
pub const LPRC_ERR_SOLVE: i32 = 4;
/// A configured search or enumeration limit was exceeded.
pub const LPRC_ERR_LIMIT: i32 = 5;

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_error(message: String) {
    let c = CString::new(message).unwrap_or_else(|_| CString::new("error").unwrap());
    LAST_ERROR.with(|slot| *slot.borrow_mut() = Some(c));
}

/// Opaque instance handle.
pub struct LprcInstance {
    inner: Instance,
}

fn to_owned_cstring(value: &serde_json::Value) -> *mut c_char {
    let text = serde_json::to_string(value).unwrap_or_default();
    CString::new(text).map(CString::into_raw).unwrap_or(ptr::null_mut())
}

unsafe fn read_str<'a>(ptr: *const c_char, name: &str) -> Result<&'a str, i32> {
    if ptr.is_null() {
        set_error(format!("{name} is null"));
        return Err(LPRC_ERR_NULL);
    }
    CStr::from_ptr(ptr).to_str().map_err(|_| {
        set_error(format!("{name} is not valid UTF-8"));
        LPRC_ERR_PARSE
    })
}

/// Most recent error message on this thread, or null. Owned by the library;
/// valid until the next failing call on the same thread.
#[no_mangle]
pub extern "C" fn lprc_last_error() -> *const c_char {
    LAST_ERROR.with(|slot| {
        slot.borrow().as_ref().map_or(ptr::null(), |c| c.as_ptr())
    })
}

/// Parses an instance from a JSON document and validates it.
///
/// # Safety
/// `json` must be a NUL-terminated string; `out` must be a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn lprc_instance_parse(
    json: *const c_char,
    out: *mut *mut LprcInstance,
) -> i32 {
    if out.is_null() {
        set_error("out is null".into());
        return LPRC_ERR_NULL;
    }
    let text = match read_str(json, "json") {
        Ok(t) => t,
        Err(code) => return code,
    };
    let instance = match load_instance(text.as_bytes()) {
        Ok(i) => i,
        Err(e) => {
            set_error(e.to_string());
            return LPRC_ERR_PARSE;
        }
    };
    let violations = validate(&instance);
    if !violations.is_empty() {
        let messages: Vec<&str> = violations.iter().map(|v| v.message.as_str()).collect();
        set_error(messages.join("; "));
        return LPRC_ERR_INVALID;
    }
    *out = Box::into_raw(Box::new(LprcInstance { inner: instance }));
    LPRC_OK
}

/// Releases an instance handle. Null is ignored.
///
/// # Safety
/// `handle` must come from `lprc_instance_parse` and not be freed twice.
#[no_mangle]
pub unsafe extern "C" fn lprc_instance_free(handle: *mut LprcInstance) {
    if !handle.is_null() {
        drop(Box::from_raw(handle));
    }
}

unsafe fn borrow<'a>(handle: *const LprcInstance) -> Result<&'a Instance, i32> {
    if handle.is_null() {
        set_error("instance handle is null".into());
        return Err(LPRC_ERR_NULL);
    }
    Ok(&(*handle).inner)
}

/// Solves the full LP relaxation; writes a fractional-plan JSON string.
///
/// # Safety
/// `handle` must be a live instance; `out_json` must be a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn lprc_relax_json(
    handle: *const LprcInstance,
    exact: i32,
    out_json: *mut *mut c_char,
) -> i32 {
    if out_json.is_null() {
        set_error("out_json is null".into());
        return LPRC_ERR_NULL;
    }
    let instance = match borrow(handle) {
        Ok(i) => i,
        Err(code) => return code,
    };
    let mode = if exact != 0 { LpMode::Exact } else { LpMode::Float(DEFAULT_TOLERANCE) };
    match solve_relaxation(instance, Restriction::Full, mode) {
        Ok(plan) => {
            *out_json = to_owned_cstring(&plan.to_json(instance));
            LPRC_OK
        }
        Err(e) => {
            set_error(e.to_string());
            LPRC_ERR_SOLVE
        }
    }
}

/// Runs seeded rounding trials; writes a trial-statistics JSON string.
/// `algorithm` is one of "nc", "lc", "c", "c-tol"; `eta` and `tau` are
/// rational strings (may be null where the algorithm ignores them).
///
/// # Safety
/// `handle` must be a live instance; string arguments must be
/// NUL-terminated; `out_json` must be a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn lprc_round_json(
    handle: *const LprcInstance,
    algorithm: *const c_char,
    eta: *const c_char,
    tau: *const c_char,
    trials: u64,
    seed: u64,
    out_json: *mut *mut c_char,
) -> i32 {
    if out_json.is_null() {
        set_error("out_json is null".into());
        return LPRC_ERR_NULL;
    }
    let instance = match borrow(handle) {
        Ok(i) => i,
        Err(code) => return code,
    };
    let name = match read_str(algorithm, "algorithm") {
        Ok(s) => s,
        Err(code) => return code,
    };
    let parse_opt = |ptr: *const c_char, name: &str, default: &str| -> Result<lprc::Rat, i32> {
        let text = if ptr.is_null() {
            default.to_string()
        } else {
            {
                let s = read_str(ptr, name)?;
                s.to_string()
            }
        };
        parse_rat(&text).ok_or_else(|| {
            set_error(format!("{name}: cannot parse '{text}' as a rational"));
            LPRC_ERR_PARSE
        })
    };
    let spec = match name {
        "nc" => AlgorithmSpec::Nc,
        "lc" => match parse_opt(eta, "eta", "1/5") {
            Ok(eta) => AlgorithmSpec::Lc { eta },
            Err(code) => return code,
        },
        "c" => match parse_opt(eta, "eta", "1/5") {
            Ok(eta) => AlgorithmSpec::C { eta },
            Err(code) => return code,
        },
        "c-tol" => {
            match (parse_opt(eta, "eta", "1/5"), parse_opt(tau, "tau", "1/10")) {
                (Ok(eta), Ok(tau)) => AlgorithmSpec::CTol { eta, tau },
                (Err(code), _) | (_, Err(code)) => return code,
            }
        }
        other => {
            set_error(format!("unknown algorithm '{other}'"));
            return LPRC_ERR_PARSE;
        }
    };
    match run_trials(
        instance,
        &spec,
        trials as usize,
        seed,
        LpMode::Float(DEFAULT_TOLERANCE),
        lprc::composite::DEFAULT_ENUM_CAP,
        None,
    ) {
        Ok(stats) => {
            *out_json = to_owned_cstring(&stats.to_json());
            LPRC_OK
        }
        Err(e) => {
            set_error(e.to_string());
            LPRC_ERR_SOLVE
        }
    }
}

/// Computes the exact optimum; writes an oracle-result JSON string.
///
/// # Safety
/// `handle` must be a live instance; `out_json` must be a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn lprc_oracle_json(
    handle: *const LprcInstance,
    out_json: *mut *mut c_char,
) -> i32 {
    if out_json.is_null() {
        set_error("out_json is null".into());
        return LPRC_ERR_NULL;
    }
    let instance = match borrow(handle) {
        Ok(i) => i,
        Err(code) => return code,
    };
    match solve_exact(instance, &OracleLimits::default()) {
        Ok(result) => {
            let report = json!({
                "opt_value": result.opt_f64(),
                "plan": result.plan.to_json(instance),
                "nodes_explored": result.nodes_explored,
                "assignments_enumerated": result.assignments_enumerated,
            });
            *out_json = to_owned_cstring(&report);
            LPRC_OK
        }
        Err(e @ OracleError::LimitExceeded { .. }) => {
            set_error(e.to_string());
            LPRC_ERR_LIMIT
        }
        Err(e) => {
            set_error(e.to_string());
            LPRC_ERR_SOLVE
        }
    }
}

/// Releases a string returned by this library. Null is ignored.
///
/// # Safety
/// `s` must come from this library and not be freed twice.
#[no_mangle]
pub unsafe extern "C" fn lprc_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use lprc::genbench::{gen_kcover_instance, KCoverSpec};
    use lprc::instance::save_instance;

    fn sample_json() -> CString {
        let spec = KCoverSpec { n: 4, family: vec![vec![1, 2], vec![3, 4]], k: 2 };
        let inst = gen_kcover_instance(&spec).unwrap();
        CString::new(save_instance(&inst)).unwrap()
    }

    #[test]
    fn parse_round_trip_and_relax() {
        let json = sample_json();
        let mut handle: *mut LprcInstance = ptr::null_mut();
        let code = unsafe { lprc_instance_parse(json.as_ptr(), &mut handle) };
        assert_eq!(code, LPRC_OK);
        let mut out: *mut c_char = ptr::null_mut();
        let code = unsafe { lprc_relax_json(handle, 1, &mut out) };
        assert_eq!(code, LPRC_OK);
        let text = unsafe { CStr::from_ptr(out) }.to_str().unwrap();
        let doc: serde_json::Value = serde_json::from_str(text).unwrap();
        assert_eq!(doc["gamma"], 4.0);
        unsafe {
            lprc_string_free(out);
            lprc_instance_free(handle);
        }
    }

    #[test]
    fn round_and_oracle() {
        let json = sample_json();
        let mut handle: *mut LprcInstance = ptr::null_mut();
        unsafe { lprc_instance_parse(json.as_ptr(), &mut handle) };
        let algo = CString::new("nc").unwrap();
        let mut out: *mut c_char = ptr::null_mut();
        let code = unsafe {
            lprc_round_json(handle, algo.as_ptr(), ptr::null(), ptr::null(), 20, 3, &mut out)
        };
        assert_eq!(code, LPRC_OK);
        unsafe { lprc_string_free(out) };
        let mut oracle_out: *mut c_char = ptr::null_mut();
        let code = unsafe { lprc_oracle_json(handle, &mut oracle_out) };
        assert_eq!(code, LPRC_OK);
        let text = unsafe { CStr::from_ptr(oracle_out) }.to_str().unwrap();
        let doc: serde_json::Value = serde_json::from_str(text).unwrap();
        assert_eq!(doc["opt_value"], 4.0);
        unsafe {
            lprc_string_free(oracle_out);
            lprc_instance_free(handle);
        }
    }

    #[test]
    fn null_and_bad_input_error_codes() {
        let mut handle: *mut LprcInstance = ptr::null_mut();
        let code = unsafe { lprc_instance_parse(ptr::null(), &mut handle) };
        assert_eq!(code, LPRC_ERR_NULL);
        assert!(!lprc_last_error().is_null());
        let bad = CString::new("{not json").unwrap();
        let code = unsafe { lprc_instance_parse(bad.as_ptr(), &mut handle) };
        assert_eq!(code, LPRC_ERR_PARSE);
    }
}
