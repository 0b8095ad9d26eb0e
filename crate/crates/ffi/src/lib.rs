//! C ABI for `ehbounds`.
//!
//! Every entry point returns an [`EhbStatus`]. Results are written through
//! out-pointers and are left untouched on failure. The message for the most
//! recent failure on the calling thread is available from
//! [`ehb_last_error_message`]. Panics never cross the boundary; they are
//! reported as [`EhbStatus::Panic`].
//!
//! Models are opaque handles created by the `ehb_model_*` constructors and
//! released with [`ehb_model_free`].

#![allow(clippy::missing_safety_doc)]

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};

use ehbounds::converse::converse_log_m;
use ehbounds::energy::EnergyModel;
use ehbounds::error::Error;
use ehbounds::gaussian;
use ehbounds::linear::{rate_quantile, QuantileMode};
use ehbounds::montecarlo::{simulate_outage, OutageOptions, Runner};
use ehbounds::report::BoundReport;
use ehbounds::save_transmit::{achievable_log_m, saving_length, second_order_lower, Regime};

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum EhbStatus {
    Ok = 0,
    Domain = 1,
    InfeasibleTilt = 2,
    DivergentMoment = 3,
    UnsupportedMode = 4,
    Consistency = 5,
    Config = 6,
    Io = 7,
    NullPointer = 8,
    Panic = 9,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum EhbQuantileMode {
    Lower = 0,
    Upper = 1,
    Threshold = 2,
}

/// Opaque energy-arrival model.
pub struct EhbModel {
    inner: EnergyModel,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct EhbBound {
    pub value: f64,
    pub first_order: f64,
    pub second_order: f64,
    pub residual: f64,
    /// All side conditions of the bound hold.
    pub feasible: bool,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct EhbSavingLength {
    pub t_n: f64,
    /// Valid only when `has_m` is set.
    pub m: u64,
    pub has_m: bool,
    pub feasible: bool,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct EhbSecondOrder {
    pub v_minus: f64,
    /// Valid only when `has_v_minus_minus` is set (eps < 1/2).
    pub v_minus_minus: f64,
    pub has_v_minus_minus: bool,
    pub v_plus: f64,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct EhbSimEstimate {
    pub estimate: f64,
    pub std_error: f64,
    pub trials: u64,
    pub seed: u64,
}

thread_local! {
    static LAST_ERROR: RefCell<CString> = RefCell::new(CString::default());
}

fn set_error(msg: String) {
    let c = CString::new(msg.replace('\0', " ")).unwrap_or_default();
    LAST_ERROR.with(|e| *e.borrow_mut() = c);
}

fn status_of(e: &Error) -> EhbStatus {
    match e {
        Error::Domain(_) => EhbStatus::Domain,
        Error::InfeasibleTilt(_) => EhbStatus::InfeasibleTilt,
        Error::DivergentMoment(_) => EhbStatus::DivergentMoment,
        Error::UnsupportedMode(_) => EhbStatus::UnsupportedMode,
        Error::Consistency(_) => EhbStatus::Consistency,
        Error::Config(_) => EhbStatus::Config,
        Error::Io(_) => EhbStatus::Io,
    }
}

enum Failure {
    Lib(Error),
    Null(&'static str),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Lib(e)
    }
}

fn guard(f: impl FnOnce() -> Result<(), Failure>) -> EhbStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => EhbStatus::Ok,
        Ok(Err(Failure::Lib(e))) => {
            set_error(e.to_string());
            status_of(&e)
        }
        Ok(Err(Failure::Null(name))) => {
            set_error(format!("null pointer: {name}"));
            EhbStatus::NullPointer
        }
        Err(p) => {
            let msg = p
                .downcast_ref::<&str>()
                .map(|s| s.to_string())
                .or_else(|| p.downcast_ref::<String>().cloned())
                .unwrap_or_else(|| "unknown panic".into());
            set_error(format!("panic: {msg}"));
            EhbStatus::Panic
        }
    }
}

unsafe fn model_ref<'a>(m: *const EhbModel) -> Result<&'a EnergyModel, Failure> {
    m.as_ref().map(|m| &m.inner).ok_or(Failure::Null("model"))
}

unsafe fn write<T>(out: *mut T, v: T) -> Result<(), Failure> {
    if out.is_null() {
        return Err(Failure::Null("out"));
    }
    out.write(v);
    Ok(())
}

fn bound(r: &BoundReport) -> EhbBound {
    EhbBound {
        value: r.value,
        first_order: r.first_order,
        second_order: r.second_order,
        residual: r.residual,
        feasible: r.feasible(),
    }
}

/// Message for the last failure on this thread, or an empty string. The
/// pointer stays valid until the next failing call on the same thread.
#[no_mangle]
pub extern "C" fn ehb_last_error_message() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ptr())
}

/// Library version as a static NUL-terminated string.
#[no_mangle]
pub extern "C" fn ehb_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr().cast()
}

unsafe fn emit_model(out: *mut *mut EhbModel, m: ehbounds::error::Result<EnergyModel>) -> Result<(), Failure> {
    if out.is_null() {
        return Err(Failure::Null("out"));
    }
    let m = m?;
    out.write(Box::into_raw(Box::new(EhbModel { inner: m })));
    Ok(())
}

#[no_mangle]
pub unsafe extern "C" fn ehb_model_deterministic(value: f64, out: *mut *mut EhbModel) -> EhbStatus {
    guard(|| emit_model(out, EnergyModel::deterministic(value)))
}

#[no_mangle]
pub unsafe extern "C" fn ehb_model_exponential(mean: f64, out: *mut *mut EhbModel) -> EhbStatus {
    guard(|| emit_model(out, EnergyModel::exponential(mean)))
}

/// Uniform on [0, 2·mean].
#[no_mangle]
pub unsafe extern "C" fn ehb_model_uniform(mean: f64, out: *mut *mut EhbModel) -> EhbStatus {
    guard(|| emit_model(out, EnergyModel::uniform(mean)))
}

#[no_mangle]
pub unsafe extern "C" fn ehb_model_two_point(low: f64, high: f64, p_high: f64, out: *mut *mut EhbModel) -> EhbStatus {
    guard(|| emit_model(out, EnergyModel::two_point(low, high, p_high)))
}

/// Parses `{"family": ..., "params": {...}}`.
#[no_mangle]
pub unsafe extern "C" fn ehb_model_from_json(json: *const c_char, out: *mut *mut EhbModel) -> EhbStatus {
    guard(|| {
        if json.is_null() {
            return Err(Failure::Null("json"));
        }
        let text = CStr::from_ptr(json).to_str().map_err(|e| Error::Config(e.to_string()))?;
        let v: serde_json::Value = serde_json::from_str(text).map_err(|e| Error::Config(e.to_string()))?;
        emit_model(out, EnergyModel::from_json(&v))
    })
}

/// Releases a model. Null is ignored.
#[no_mangle]
pub unsafe extern "C" fn ehb_model_free(model: *mut EhbModel) {
    if !model.is_null() {
        let _ = catch_unwind(AssertUnwindSafe(|| drop(Box::from_raw(model))));
    }
}

/// Writes E[E], E[E²] and E[E³]. Any out-pointer may be null.
#[no_mangle]
pub unsafe extern "C" fn ehb_model_moments(
    model: *const EhbModel,
    mean: *mut f64,
    m2: *mut f64,
    m3: *mut f64,
) -> EhbStatus {
    guard(|| {
        let m = model_ref(model)?;
        for (ptr, v) in [(mean, m.mean()), (m2, m.m2()), (m3, m.m3())] {
            if !ptr.is_null() {
                ptr.write(v);
            }
        }
        Ok(())
    })
}

/// ½ log₂(1 + p).
#[no_mangle]
pub unsafe extern "C" fn ehb_capacity(p: f64, out: *mut f64) -> EhbStatus {
    guard(|| write(out, gaussian::capacity(p)?))
}

#[no_mangle]
pub extern "C" fn ehb_normal_cdf(x: f64) -> f64 {
    gaussian::normal_cdf(x)
}

#[no_mangle]
pub unsafe extern "C" fn ehb_normal_inv_cdf(p: f64, out: *mut f64) -> EhbStatus {
    guard(|| write(out, gaussian::normal_inv_cdf(p)?))
}

#[no_mangle]
pub unsafe extern "C" fn ehb_achievable_log_m(p: f64, n: u64, eps2: f64, out: *mut EhbBound) -> EhbStatus {
    guard(|| write(out, bound(&achievable_log_m(p, n, eps2)?)))
}

#[no_mangle]
pub unsafe extern "C" fn ehb_converse_log_m(
    model: *const EhbModel,
    n: u64,
    l: u64,
    eps: f64,
    out: *mut EhbBound,
) -> EhbStatus {
    guard(|| write(out, bound(&converse_log_m(model_ref(model)?, n, l, eps)?)))
}

#[no_mangle]
pub unsafe extern "C" fn ehb_saving_length(
    model: *const EhbModel,
    l: u64,
    n: u64,
    eps1: f64,
    out: *mut EhbSavingLength,
) -> EhbStatus {
    guard(|| {
        let s = saving_length(model_ref(model)?, l, n, eps1)?;
        write(
            out,
            EhbSavingLength { t_n: s.t_n, m: s.m.unwrap_or(0), has_m: s.m.is_some(), feasible: s.feasible },
        )
    })
}

/// Second-order coefficients. `l = 0` selects the growing-L regime,
/// otherwise L is held constant.
#[no_mangle]
pub unsafe extern "C" fn ehb_second_order(
    model: *const EhbModel,
    l: u64,
    eps: f64,
    out: *mut EhbSecondOrder,
) -> EhbStatus {
    guard(|| {
        let m = model_ref(model)?;
        let regime = if l == 0 { Regime::GrowingL } else { Regime::ConstantL(l) };
        let lower = second_order_lower(m, regime, eps)?;
        let v_plus = ehbounds::converse::second_order_upper(m, eps)?;
        write(
            out,
            EhbSecondOrder {
                v_minus: lower.v_minus,
                v_minus_minus: lower.v_minus_minus.unwrap_or(f64::NAN),
                has_v_minus_minus: lower.v_minus_minus.is_some(),
                v_plus,
            },
        )
    })
}

#[no_mangle]
pub unsafe extern "C" fn ehb_rate_quantile(
    model: *const EhbModel,
    lambda: f64,
    eps: f64,
    mode: EhbQuantileMode,
    out: *mut f64,
) -> EhbStatus {
    guard(|| {
        let mode = match mode {
            EhbQuantileMode::Lower => QuantileMode::Lower,
            EhbQuantileMode::Upper => QuantileMode::Upper,
            EhbQuantileMode::Threshold => QuantileMode::Threshold,
        };
        write(out, rate_quantile(model_ref(model)?, lambda, eps, mode)?)
    })
}

/// Monte Carlo energy-outage probability with all per-trajectory identity
/// checks enabled. The result does not depend on `workers`.
#[no_mangle]
#[allow(clippy::too_many_arguments)]
pub unsafe extern "C" fn ehb_simulate_outage(
    model: *const EhbModel,
    p: f64,
    n: u64,
    l: u64,
    m: u64,
    trials: u64,
    seed: u64,
    workers: usize,
    out: *mut EhbSimEstimate,
) -> EhbStatus {
    guard(|| {
        let runner = Runner::new(workers)?;
        let r = simulate_outage(&runner, model_ref(model)?, p, n, l, m, trials, seed, OutageOptions::default())?;
        let e = r.outage;
        write(out, EhbSimEstimate { estimate: e.estimate, std_error: e.stderr, trials: e.trials, seed: e.seed })
    })
}
