use std::ffi::{CStr, CString};
use std::ptr;

use ehbounds_ffi::*;

fn last_error() -> String {
    unsafe { CStr::from_ptr(ehb_last_error_message()) }.to_string_lossy().into_owned()
}

fn det(value: f64) -> *mut EhbModel {
    let mut m = ptr::null_mut();
    assert_eq!(unsafe { ehb_model_deterministic(value, &mut m) }, EhbStatus::Ok);
    m
}

#[test]
fn version_matches_crate() {
    let v = unsafe { CStr::from_ptr(ehb_version()) }.to_str().unwrap();
    assert_eq!(v, env!("CARGO_PKG_VERSION"));
}

#[test]
fn model_lifecycle_and_moments() {
    let mut m = ptr::null_mut();
    let json = CString::new(r#"{"family":"exponential","params":{"mean":2.0}}"#).unwrap();
    assert_eq!(unsafe { ehb_model_from_json(json.as_ptr(), &mut m) }, EhbStatus::Ok);
    let (mut mean, mut m2, mut m3) = (0.0, 0.0, 0.0);
    assert_eq!(unsafe { ehb_model_moments(m, &mut mean, &mut m2, &mut m3) }, EhbStatus::Ok);
    assert_eq!((mean, m2, m3), (2.0, 8.0, 48.0));
    assert_eq!(unsafe { ehb_model_moments(m, ptr::null_mut(), ptr::null_mut(), &mut m3) }, EhbStatus::Ok);
    unsafe { ehb_model_free(m) };
    unsafe { ehb_model_free(ptr::null_mut()) };
}

#[test]
fn invalid_inputs_map_to_status_codes() {
    let mut m = ptr::null_mut();
    assert_eq!(unsafe { ehb_model_exponential(-1.0, &mut m) }, EhbStatus::Domain);
    assert!(m.is_null());
    assert!(!last_error().is_empty());
    let bad = CString::new(r#"{"family":"gamma","params":{}}"#).unwrap();
    assert_eq!(unsafe { ehb_model_from_json(bad.as_ptr(), &mut m) }, EhbStatus::Config);
    assert_eq!(unsafe { ehb_model_uniform(1.0, ptr::null_mut()) }, EhbStatus::NullPointer);
    let mut x = 0.0;
    assert_eq!(unsafe { ehb_normal_inv_cdf(1.5, &mut x) }, EhbStatus::Domain);
    assert_eq!(unsafe { ehb_rate_quantile(ptr::null(), 0.5, 0.5, EhbQuantileMode::Lower, &mut x) }, EhbStatus::NullPointer);
    assert!(last_error().contains("null"));
}

#[test]
fn unsupported_threshold_mode() {
    let m = det(1.0);
    let mut x = 0.0;
    assert_eq!(unsafe { ehb_rate_quantile(m, 0.5, 0.5, EhbQuantileMode::Threshold, &mut x) }, EhbStatus::UnsupportedMode);
    assert_eq!(unsafe { ehb_rate_quantile(m, 0.5, 0.5, EhbQuantileMode::Lower, &mut x) }, EhbStatus::Ok);
    assert_eq!(x, 0.5);
    unsafe { ehb_model_free(m) };
}

#[test]
fn bounds_match_reference_values() {
    let m = det(1.0);
    let mut b = EhbBound::default();
    assert_eq!(unsafe { ehb_achievable_log_m(1.0, 10_000, 0.5, &mut b) }, EhbStatus::Ok);
    assert!((b.value - 4603.216110938121).abs() < 1e-8);
    assert!(!b.feasible);
    assert_eq!(unsafe { ehb_converse_log_m(m, 10_000, 1, 0.5, &mut b) }, EhbStatus::Ok);
    assert!((b.value - 5077.355997565064).abs() < 1e-8);
    let mut c = 0.0;
    assert_eq!(unsafe { ehb_capacity(1.0, &mut c) }, EhbStatus::Ok);
    assert_eq!(c, 0.5);
    assert!((ehb_normal_cdf(0.0) - 0.5).abs() < 1e-16);

    let mut s = EhbSavingLength::default();
    assert_eq!(unsafe { ehb_saving_length(m, 1, 100, 0.5, &mut s) }, EhbStatus::Ok);
    assert!((s.t_n - 0.1).abs() < 1e-15);
    assert!(s.has_m && s.m == 34);

    let mut so = EhbSecondOrder::default();
    assert_eq!(unsafe { ehb_second_order(m, 0, 0.1, &mut so) }, EhbStatus::Ok);
    assert!(so.has_v_minus_minus && so.v_minus_minus <= so.v_minus && so.v_minus <= so.v_plus);
    assert!((so.v_plus + 0.8005920265915001).abs() < 1e-12);
    assert_eq!(unsafe { ehb_second_order(m, 4, 0.6, &mut so) }, EhbStatus::Ok);
    assert!(!so.has_v_minus_minus);
    unsafe { ehb_model_free(m) };
}

#[test]
fn outage_is_worker_independent() {
    let m = det(1.0);
    let mut a = EhbSimEstimate::default();
    let mut b = EhbSimEstimate::default();
    assert_eq!(unsafe { ehb_simulate_outage(m, 1.0, 50, 1, 5, 20_000, 9, 1, &mut a) }, EhbStatus::Ok);
    assert_eq!(unsafe { ehb_simulate_outage(m, 1.0, 50, 1, 5, 20_000, 9, 3, &mut b) }, EhbStatus::Ok);
    assert_eq!(a, b);
    assert!(a.estimate > 0.0 && a.estimate < 1.0);
    assert_eq!(unsafe { ehb_simulate_outage(m, 1.0, 50, 1, 5, 20_000, 9, 0, &mut b) }, EhbStatus::Domain);
    unsafe { ehb_model_free(m) };
}
