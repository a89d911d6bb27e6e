use std::ffi::{CStr, CString};
use std::ptr;

use hrvlab_ffi::*;

fn last_error() -> String {
    let p = hrv_last_error();
    assert!(!p.is_null());
    unsafe { CStr::from_ptr(p) }.to_string_lossy().into_owned()
}

fn experiment_batch(name: &str, n: usize, seed: u64) -> *mut HrvSampleBatch {
    let name = CString::new(name).unwrap();
    let mut batch = ptr::null_mut();
    let status = unsafe { hrv_generate_experiment(name.as_ptr(), n, seed, 1, &mut batch) };
    assert_eq!(status, HrvStatus::Ok);
    batch
}

#[test]
fn batch_matches_core_generator() {
    let batch = experiment_batch("ex32-case2", 500, 4);
    let expected = hrvlab::generators::generate(
        &"ex32-case2"
            .parse::<hrvlab::pipeline::Experiment>()
            .unwrap()
            .spec(),
        500,
        4,
        1,
    )
    .unwrap();
    unsafe {
        assert_eq!(hrv_batch_len(batch), 500);
        for (i, &(a, b)) in expected.pairs.iter().enumerate() {
            let (mut z1, mut z2) = (0.0, 0.0);
            assert_eq!(hrv_batch_get(batch, i, &mut z1, &mut z2), HrvStatus::Ok);
            assert_eq!((z1, z2), (a, b));
        }
        hrv_batch_free(batch);
    }
}

#[test]
fn spec_json_and_bad_spec() {
    let good = CString::new(r#"{"model":"axes_y","alpha":1.0,"axis_prob":0.5}"#).unwrap();
    let bad = CString::new(r#"{"model":"axes_y","alpha":-1.0,"axis_prob":0.5}"#).unwrap();
    let mut batch = ptr::null_mut();
    unsafe {
        assert_eq!(
            hrv_generate_json(good.as_ptr(), 10, 1, 1, &mut batch),
            HrvStatus::Ok
        );
        assert_eq!(hrv_batch_len(batch), 10);
        hrv_batch_free(batch);
        let mut other = ptr::null_mut();
        assert_eq!(
            hrv_generate_json(bad.as_ptr(), 10, 1, 1, &mut other),
            HrvStatus::Config
        );
        assert!(other.is_null());
    }
    assert!(!last_error().is_empty());
}

#[test]
fn unknown_experiment_is_usage() {
    let name = CString::new("ex99").unwrap();
    let mut batch = ptr::null_mut();
    let status = unsafe { hrv_generate_experiment(name.as_ptr(), 10, 1, 1, &mut batch) };
    assert_eq!(status, HrvStatus::Usage);
    assert!(last_error().contains("ex31-case1"));
}

#[test]
fn null_arguments() {
    let mut out = 0.0;
    unsafe {
        assert_eq!(
            hrv_hill(ptr::null(), 5, 2, &mut out),
            HrvStatus::NullPointer
        );
        assert_eq!(hrv_batch_len(ptr::null()), 0);
        hrv_batch_free(ptr::null_mut());
        hrv_report_free(ptr::null_mut());
        hrv_string_free(ptr::null_mut());
        let mut report = ptr::null_mut();
        assert_eq!(
            hrv_detect(ptr::null(), ptr::null(), &mut report),
            HrvStatus::NullPointer
        );
    }
}

#[test]
fn kernels_agree_with_core() {
    let xi = [9.0, 3.0, 7.0, 1.0, 5.0, 2.0, 8.0, 4.0];
    let eta = [2.0, 6.0, 1.0, 8.0, 3.0, 7.0, 5.0, 4.0];
    let mut v = 0.0;
    unsafe {
        assert_eq!(hrv_hill(xi.as_ptr(), xi.len(), 3, &mut v), HrvStatus::Ok);
        assert_eq!(v, hrvlab::diagnostics::hill_at(&xi, 3).unwrap());
        assert_eq!(
            hrv_hillish(xi.as_ptr(), eta.as_ptr(), 8, 6, &mut v),
            HrvStatus::Ok
        );
        assert_eq!(v, hrvlab::diagnostics::hillish(&xi, &eta, 6).unwrap());
        assert_eq!(
            hrv_pickandsish(xi.as_ptr(), eta.as_ptr(), 8, 8, 0.8, &mut v),
            HrvStatus::Ok
        );
        assert_eq!(
            v,
            hrvlab::diagnostics::pickandsish(&xi, &eta, 8, 0.8).unwrap()
        );
        assert_eq!(hrv_hill(xi.as_ptr(), xi.len(), 8, &mut v), HrvStatus::Usage);
    }
}

#[test]
fn gpolar_axes_codes() {
    let (mut r, mut t, mut w) = (0.0, 0.0, -1);
    unsafe {
        assert_eq!(
            hrv_gpolar_axes(10.0, 2.0, &mut r, &mut t, &mut w),
            HrvStatus::Ok
        );
        assert_eq!((r, t, w), (2.0, 5.0, 1));
        assert_eq!(
            hrv_gpolar_axes(2.0, 2.0, &mut r, &mut t, &mut w),
            HrvStatus::Ok
        );
        assert_eq!((r, t, w), (2.0, 1.0, 0));
        assert_eq!(
            hrv_gpolar_axes(0.0, 2.0, &mut r, &mut t, &mut w),
            HrvStatus::Domain
        );
    }
}

#[test]
fn report_round_trip_through_json() {
    let batch = experiment_batch("ex31-case1", 3000, 11);
    let cfg = CString::new(r#"{"thresholds":[60],"k_grid":{"k_min":10,"k_max":200}}"#).unwrap();
    let label = CString::new("min_hill").unwrap();
    unsafe {
        let mut report = ptr::null_mut();
        assert_eq!(hrv_detect(batch, cfg.as_ptr(), &mut report), HrvStatus::Ok);
        let mut json = ptr::null_mut();
        assert_eq!(hrv_report_json(report, &mut json), HrvStatus::Ok);
        let text = CStr::from_ptr(json).to_str().unwrap().to_owned();
        hrv_string_free(json);
        let parsed: hrvlab::diagnostics::DetectionReport = serde_json::from_str(&text).unwrap();
        let v = hrv_report_value(report, label.as_ptr(), 100);
        assert_eq!(parsed.value("min_hill", 100), Some(v));
        assert!(hrv_report_value(report, label.as_ptr(), 1_000_000).is_nan());
        hrv_report_free(report);
        hrv_batch_free(batch);
    }
}

#[test]
fn header_declares_every_export() {
    let header =
        std::fs::read_to_string(concat!(env!("CARGO_MANIFEST_DIR"), "/include/hrvlab.h")).unwrap();
    let src = std::fs::read_to_string(concat!(env!("CARGO_MANIFEST_DIR"), "/src/lib.rs")).unwrap();
    let mut count = 0;
    for line in src.lines() {
        if let Some(rest) = line.split("extern \"C\" fn ").nth(1) {
            let name = rest.split('(').next().unwrap();
            assert!(
                header.contains(&format!("{name}(")),
                "{name} missing from header"
            );
            count += 1;
        }
    }
    assert!(count >= 15);
}
