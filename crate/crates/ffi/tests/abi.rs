use std::ffi::{CStr, CString};
use std::path::Path;
use std::process::Command;
use std::ptr;

use scatter_tex_ffi::*;

fn last_error() -> String {
    let p = st_last_error();
    assert!(!p.is_null());
    unsafe { CStr::from_ptr(p) }.to_string_lossy().into_owned()
}

#[test]
fn path_count_matches_core() {
    assert_eq!(st_path_count(4, 8, 2), 417);
    assert_eq!(st_path_count(3, 8, 1), 25);
}

#[test]
fn channel_count_and_bad_tag() {
    let mut n = 0usize;
    let tag = CString::new("double-opponent").unwrap();
    assert_eq!(unsafe { st_channel_count(tag.as_ptr(), &mut n) }, StStatus::Ok);
    assert_eq!(n, 4);

    let bad = CString::new("nope").unwrap();
    assert_eq!(unsafe { st_channel_count(bad.as_ptr(), &mut n) }, StStatus::InvalidArgument);
    assert!(last_error().contains("nope"));
    assert_eq!(unsafe { st_channel_count(ptr::null(), &mut n) }, StStatus::NullPointer);
}

#[test]
fn convert_gray_pixel_to_opponent() {
    let rgb = [100.0, 100.0, 100.0, 10.0, 20.0, 30.0];
    let tag = CString::new("opponent").unwrap();
    let mut out = [f64::NAN; 6];
    let mut written = 0;
    let st = unsafe { st_convert(rgb.as_ptr(), 2, 1, tag.as_ptr(), out.as_mut_ptr(), 6, &mut written) };
    assert_eq!(st, StStatus::Ok);
    assert_eq!(written, 6);
    // planar: O1 for both pixels, then O2, then O3
    assert!(out[0].abs() < 1e-12);
    assert!(out[2].abs() < 1e-12);
    let o3 = 300.0 / 255.0 / 3f64.sqrt();
    assert!((out[4] - o3).abs() < 1e-12);
}

#[test]
fn convert_reports_needed_capacity() {
    let rgb = [1.0; 12];
    let tag = CString::new("rgb").unwrap();
    let mut out = [0.0; 4];
    let mut written = 0;
    let st = unsafe { st_convert(rgb.as_ptr(), 2, 2, tag.as_ptr(), out.as_mut_ptr(), 4, &mut written) };
    assert_eq!(st, StStatus::BufferTooSmall);
    assert_eq!(written, 12);
}

#[test]
fn filter_bank_lifecycle_and_scatter() {
    let mut bank = ptr::null_mut();
    assert_eq!(unsafe { st_filter_bank_new(4, 8, 256, 256, &mut bank) }, StStatus::Ok);
    let (mut lo, mut hi) = (0.0, 0.0);
    assert_eq!(unsafe { st_filter_bank_littlewood_paley(bank, &mut lo, &mut hi) }, StStatus::Ok);
    assert!(hi <= 1.0 + 1e-6 && lo > 0.0);
    unsafe { st_filter_bank_free(bank) };

    let mut bank = ptr::null_mut();
    assert_eq!(unsafe { st_filter_bank_for_image(20, 20, 2, 4, &mut bank) }, StStatus::Ok);
    let plane: Vec<f64> = (0..400).map(|i| ((i * 13) % 17) as f64).collect();
    let mut out = vec![0.0; 64];
    let mut n = 0;
    let st = unsafe { st_scatter_plane(bank, plane.as_ptr(), 20, 20, 2, 1, out.as_mut_ptr(), 64, &mut n) };
    assert_eq!(st, StStatus::Ok);
    assert_eq!(n, st_path_count(2, 4, 2));
    assert!(out[0] > 0.0);

    let flat = vec![7.0; 400];
    let st = unsafe { st_scatter_plane(bank, flat.as_ptr(), 20, 20, 2, 1, out.as_mut_ptr(), 64, &mut n) };
    assert_eq!(st, StStatus::Ok);
    assert!((out[0] - 7.0).abs() < 1e-9);
    assert!(out[1..n].iter().all(|v| v.abs() < 1e-8));

    // wrong plane size for this bank
    let st = unsafe { st_scatter_plane(bank, plane.as_ptr(), 10, 40, 2, 1, out.as_mut_ptr(), 64, &mut n) };
    assert_eq!(st, StStatus::Geometry);
    unsafe { st_filter_bank_free(bank) };
    unsafe { st_filter_bank_free(ptr::null_mut()) };
}

#[test]
fn bank_too_small_is_geometry_error() {
    let mut bank = ptr::null_mut();
    assert_eq!(unsafe { st_filter_bank_for_image(8, 8, 4, 8, &mut bank) }, StStatus::Geometry);
    assert!(bank.is_null());
    assert!(last_error().contains("2^J"));
}

#[test]
fn classifier_fit_predict() {
    // two clusters in 3-d
    let mut feats = Vec::new();
    let mut labels = Vec::new();
    for i in 0..6 {
        let t = i as f64 * 0.1;
        feats.extend_from_slice(&[t, 0.0, 0.0]);
        labels.push(0u32);
        feats.extend_from_slice(&[10.0 + t, 10.0, 0.0]);
        labels.push(1u32);
    }
    let mut model = ptr::null_mut();
    let st = unsafe { st_classifier_fit(feats.as_ptr(), 3, 12, labels.as_ptr(), 2, 1, &mut model) };
    assert_eq!(st, StStatus::Ok);
    let mut label = 99;
    unsafe {
        assert_eq!(st_classifier_predict(model, [0.3, 0.1, 0.0].as_ptr(), 3, &mut label), StStatus::Ok);
        assert_eq!(label, 0);
        assert_eq!(st_classifier_predict(model, [9.0, 10.2, 0.0].as_ptr(), 3, &mut label), StStatus::Ok);
        assert_eq!(label, 1);
        assert_eq!(st_classifier_predict(model, [1.0].as_ptr(), 1, &mut label), StStatus::InvalidArgument);
        st_classifier_free(model);
    }
}

#[test]
fn classifier_rejects_empty_class() {
    let feats = [0.0, 1.0];
    let labels = [0u32, 0];
    let mut model = ptr::null_mut();
    let st = unsafe { st_classifier_fit(feats.as_ptr(), 1, 2, labels.as_ptr(), 2, 0, &mut model) };
    assert_eq!(st, StStatus::InvalidArgument);
    assert!(model.is_null());
}

#[test]
fn version_is_nul_terminated() {
    let v = unsafe { CStr::from_ptr(st_version()) };
    assert_eq!(v.to_str().unwrap(), env!("CARGO_PKG_VERSION"));
}

#[test]
fn header_declares_every_export() {
    let dir = Path::new(env!("CARGO_MANIFEST_DIR"));
    let header = std::fs::read_to_string(dir.join("include/scatter_tex.h")).unwrap();
    for sym in [
        "st_last_error",
        "st_version",
        "st_channel_count",
        "st_convert",
        "st_path_count",
        "st_filter_bank_new",
        "st_filter_bank_for_image",
        "st_filter_bank_free",
        "st_filter_bank_littlewood_paley",
        "st_scatter_plane",
        "st_classifier_fit",
        "st_classifier_free",
        "st_classifier_predict",
        "ST_STATUS_BUFFER_TOO_SMALL",
        "typedef struct StFilterBank StFilterBank",
    ] {
        assert!(header.contains(sym), "{sym} missing from header");
    }
}

#[test]
fn header_compiles_as_c() {
    let dir = Path::new(env!("CARGO_MANIFEST_DIR"));
    let Ok(status) = Command::new("cc")
        .args(["-std=c99", "-Wall", "-Werror", "-fsyntax-only", "-I"])
        .arg(dir.join("include"))
        .arg(dir.join("examples/demo.c"))
        .status()
    else {
        eprintln!("no C compiler; skipping");
        return;
    };
    assert!(status.success());
}
