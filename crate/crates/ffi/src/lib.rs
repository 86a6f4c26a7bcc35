//! C ABI over the crancov engine.
//!
//! Scenarios are opaque handles created from `key = value` text and released
//! with [`crancov_scenario_free`]. Every call returns a [`CrancovStatus`];
//! on failure [`crancov_last_error`] describes the cause. Panics never cross
//! the boundary.

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};

use crancov::analytic::{rate_profile, AnalyticMethod, CoverageModel};
use crancov::harness::{parse_config_str, ScenarioFile};
use crancov::model::db_to_linear;
use crancov::simulator::simulate;
use crancov::Error;

/// Status codes; 2, 3 and 4 match the command-line exit codes.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CrancovStatus {
    Ok = 0,
    /// Null pointer, invalid UTF-8 or a zero-length buffer.
    InvalidArgument = 1,
    Config = 2,
    Io = 3,
    Numeric = 4,
    /// An internal panic was caught.
    Internal = 5,
}

/// A parsed scenario: network parameters plus simulation plan.
pub struct CrancovScenario {
    file: ScenarioFile,
}

/// Percentile and mean rates in bits/s/Hz.
#[repr(C)]
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct CrancovRateProfile {
    pub p5: f64,
    pub p10: f64,
    pub p50: f64,
    pub mean: f64,
}

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_error(message: String) {
    let text = CString::new(message.replace('\0', " ")).expect("nul bytes removed");
    LAST_ERROR.with(|e| *e.borrow_mut() = Some(text));
}

fn status_of(err: &Error) -> CrancovStatus {
    match err.exit_code() {
        2 => CrancovStatus::Config,
        3 => CrancovStatus::Io,
        _ => CrancovStatus::Numeric,
    }
}

/// Runs `f`, recording the error message and mapping panics.
fn guard<F>(f: F) -> CrancovStatus
where
    F: FnOnce() -> Result<(), (CrancovStatus, String)>,
{
    LAST_ERROR.with(|e| *e.borrow_mut() = None);
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => CrancovStatus::Ok,
        Ok(Err((status, message))) => {
            set_error(message);
            status
        }
        Err(_) => {
            set_error("internal panic".into());
            CrancovStatus::Internal
        }
    }
}

fn engine(err: Error) -> (CrancovStatus, String) {
    (status_of(&err), err.to_string())
}

fn invalid(message: &str) -> (CrancovStatus, String) {
    (CrancovStatus::InvalidArgument, message.to_string())
}

unsafe fn scenario_ref<'a>(ptr: *const CrancovScenario) -> Result<&'a CrancovScenario, (CrancovStatus, String)> {
    ptr.as_ref().ok_or_else(|| invalid("scenario handle is null"))
}

unsafe fn slice_in<'a>(ptr: *const f64, len: usize, what: &str) -> Result<&'a [f64], (CrancovStatus, String)> {
    if ptr.is_null() || len == 0 {
        return Err(invalid(&format!("{what} must be a non-empty array")));
    }
    Ok(std::slice::from_raw_parts(ptr, len))
}

unsafe fn slice_out<'a>(ptr: *mut f64, len: usize, what: &str) -> Result<&'a mut [f64], (CrancovStatus, String)> {
    if ptr.is_null() {
        return Err(invalid(&format!("{what} is null")));
    }
    Ok(std::slice::from_raw_parts_mut(ptr, len))
}

/// Parses a scenario from NUL-terminated `key = value` text.
///
/// # Safety
/// `text` must be a valid NUL-terminated string and `out` a valid pointer.
/// The handle written to `*out` must be released with
/// [`crancov_scenario_free`].
#[no_mangle]
pub unsafe extern "C" fn crancov_scenario_parse(text: *const c_char, out: *mut *mut CrancovScenario) -> CrancovStatus {
    guard(|| {
        if text.is_null() || out.is_null() {
            return Err(invalid("null argument"));
        }
        let text = CStr::from_ptr(text).to_str().map_err(|_| invalid("scenario text is not UTF-8"))?;
        let file = parse_config_str(text).map_err(engine)?;
        *out = Box::into_raw(Box::new(CrancovScenario { file }));
        Ok(())
    })
}

/// Releases a scenario handle. Null is ignored.
///
/// # Safety
/// `scenario` must come from [`crancov_scenario_parse`] and not be used
/// afterwards.
#[no_mangle]
pub unsafe extern "C" fn crancov_scenario_free(scenario: *mut CrancovScenario) {
    if !scenario.is_null() {
        drop(Box::from_raw(scenario));
    }
}

/// Analytic coverage at `len` thresholds in dB, written to `coverage_out`.
///
/// # Safety
/// Both arrays must hold `len` doubles.
#[no_mangle]
pub unsafe extern "C" fn crancov_coverage(
    scenario: *const CrancovScenario,
    thresholds_db: *const f64,
    len: usize,
    coverage_out: *mut f64,
) -> CrancovStatus {
    guard(|| {
        let s = scenario_ref(scenario)?;
        let t = slice_in(thresholds_db, len, "thresholds")?;
        let out = slice_out(coverage_out, len, "coverage output")?;
        let config = s.file.config.clone();
        let method = AnalyticMethod::for_config(&config);
        let model = CoverageModel::new(config, method).map_err(engine)?;
        let linear: Vec<f64> = t.iter().map(|db| db_to_linear(*db)).collect();
        out.copy_from_slice(&model.coverage_many(&linear).map_err(engine)?);
        Ok(())
    })
}

/// Analytic rate profile of the scenario.
///
/// # Safety
/// `out` must be a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn crancov_rate_profile(
    scenario: *const CrancovScenario,
    out: *mut CrancovRateProfile,
) -> CrancovStatus {
    guard(|| {
        let s = scenario_ref(scenario)?;
        let out = out.as_mut().ok_or_else(|| invalid("output is null"))?;
        let config = s.file.config.clone();
        let method = AnalyticMethod::for_config(&config);
        let p = rate_profile(&CoverageModel::new(config, method).map_err(engine)?).map_err(engine)?;
        *out = CrancovRateProfile {
            p5: p.p5,
            p10: p.p10,
            p50: p.p50,
            mean: p.mean,
        };
        Ok(())
    })
}

/// Monte Carlo coverage with the scenario's plan, overriding its budget and
/// seed. `halfwidth_out` receives 95% half-widths and may be null.
///
/// # Safety
/// Arrays must hold `len` doubles.
#[no_mangle]
pub unsafe extern "C" fn crancov_simulate_coverage(
    scenario: *const CrancovScenario,
    realizations: u64,
    seed: u64,
    thresholds_db: *const f64,
    len: usize,
    coverage_out: *mut f64,
    halfwidth_out: *mut f64,
) -> CrancovStatus {
    guard(|| {
        let s = scenario_ref(scenario)?;
        let t = slice_in(thresholds_db, len, "thresholds")?;
        let out = slice_out(coverage_out, len, "coverage output")?;
        let mut plan = s.file.plan.clone();
        plan.realizations = realizations;
        plan.seed = seed;
        let curve = simulate(&plan).and_then(|run| run.coverage(t)).map_err(engine)?;
        out.copy_from_slice(&curve.coverage);
        if !halfwidth_out.is_null() {
            let hw = curve.ci_halfwidth.expect("simulated curves carry half-widths");
            std::slice::from_raw_parts_mut(halfwidth_out, len).copy_from_slice(&hw);
        }
        Ok(())
    })
}

/// Message of the last failed call on this thread, or null. Valid until the
/// next call into this library on the same thread.
#[no_mangle]
pub extern "C" fn crancov_last_error() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(std::ptr::null(), |s| s.as_ptr()))
}

/// Library version as a static NUL-terminated string.
#[no_mangle]
pub extern "C" fn crancov_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr().cast()
}
