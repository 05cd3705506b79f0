//! Drives the C surface exactly as a foreign caller would: raw pointers in,
//! status codes out.

use std::ffi::{CStr, CString};
use std::ptr;

use incidence_lab_ffi::*;
use libc::c_char;

fn last_error() -> String {
    unsafe { CStr::from_ptr(lab_last_error()) }
        .to_string_lossy()
        .into_owned()
}

fn take_string(ptr: *mut c_char) -> String {
    assert!(!ptr.is_null());
    let text = unsafe { CStr::from_ptr(ptr) }
        .to_string_lossy()
        .into_owned();
    unsafe { lab_string_free(ptr) };
    text
}

#[test]
fn field_space_spectrum_roundtrip() {
    unsafe {
        let mut field: *mut LabField = ptr::null_mut();
        assert_eq!(lab_field_new(3, 1, &mut field), LabStatus::Ok);
        assert_eq!(lab_field_order(field), 3);

        let desc = CString::new("full:1,2").unwrap();
        let mut space: *mut LabSpace = ptr::null_mut();
        assert_eq!(
            lab_space_new(field, desc.as_ptr(), &mut space),
            LabStatus::Ok
        );
        assert_eq!(lab_space_dim(space), 3);
        assert_eq!(lab_space_size(space), 27);
        assert_eq!(lab_space_has_star(space), 1);

        let mut text: *mut c_char = ptr::null_mut();
        assert_eq!(lab_space_describe(space, &mut text), LabStatus::Ok);
        let described = take_string(text);
        assert!(described.contains("GF(3)"));
        assert!(described.contains("|V| = 27"));

        let mut spectrum: *mut LabSpectrum = ptr::null_mut();
        assert_eq!(lab_spectrum_compute(space, &mut spectrum), LabStatus::Ok);
        assert_eq!(lab_spectrum_lambda(spectrum), 9.0);
        assert_eq!(lab_spectrum_matches_prediction(spectrum), 1);
        let distinct = lab_spectrum_distinct_count(spectrum);
        assert_eq!(distinct, 3);
        let mut total = 0u64;
        for i in 0..distinct {
            let (mut re, mut im, mut mult) = (0.0f64, 0.0f64, 0u64);
            assert_eq!(
                lab_spectrum_entry(spectrum, i, &mut re, &mut im, &mut mult),
                LabStatus::Ok
            );
            assert_eq!(im, 0.0);
            total += mult;
        }
        assert_eq!(total, 27);
        assert_eq!(
            lab_spectrum_entry(
                spectrum,
                distinct,
                ptr::null_mut(),
                ptr::null_mut(),
                ptr::null_mut()
            ),
            LabStatus::InvalidArgument
        );

        lab_spectrum_free(spectrum);
        lab_space_free(space);
        lab_field_free(field);
    }
}

#[test]
fn custom_modulus_and_json_support() {
    unsafe {
        // x² + 1 over GF(3)
        let coeffs = [1u32, 0, 1];
        let mut field: *mut LabField = ptr::null_mut();
        assert_eq!(
            lab_field_with_modulus(3, 2, coeffs.as_ptr(), coeffs.len(), &mut field),
            LabStatus::Ok
        );
        assert_eq!(lab_field_order(field), 9);

        let desc = CString::new(r#"{"m": 1, "exponents": [[0], [1]]}"#).unwrap();
        let mut space: *mut LabSpace = ptr::null_mut();
        assert_eq!(
            lab_space_new(field, desc.as_ptr(), &mut space),
            LabStatus::Ok
        );
        assert_eq!(lab_space_size(space), 81);
        lab_space_free(space);
        lab_field_free(field);
    }
}

#[test]
fn errors_set_status_and_message() {
    unsafe {
        let mut field: *mut LabField = ptr::null_mut();
        assert_eq!(lab_field_new(4, 1, &mut field), LabStatus::InvalidArgument);
        assert!(last_error().contains("not prime"));
        assert_eq!(lab_field_new(3, 0, &mut field), LabStatus::InvalidArgument);
        assert!(last_error().contains("invalid extension degree"));

        assert_eq!(lab_field_new(3, 1, &mut field), LabStatus::Ok);
        let bad = CString::new("diagonal:1,2").unwrap();
        let mut space: *mut LabSpace = ptr::null_mut();
        assert_eq!(
            lab_space_new(field, bad.as_ptr(), &mut space),
            LabStatus::InvalidArgument
        );

        // budget refusal surfaces as BudgetExceeded
        let big = CString::new("full:2,9").unwrap();
        assert_eq!(
            lab_space_new(field, big.as_ptr(), &mut space),
            LabStatus::BudgetExceeded
        );
        assert!(last_error().contains("size limit"));

        // null handling
        assert_eq!(
            lab_space_new(ptr::null(), bad.as_ptr(), &mut space),
            LabStatus::NullPointer
        );
        assert_eq!(lab_field_order(ptr::null()), 0);
        assert_eq!(lab_space_has_star(ptr::null()), -1);
        assert!(lab_spectrum_lambda(ptr::null()).is_nan());
        lab_field_free(field);
    }
}

#[test]
fn verify_runs_a_small_config() {
    unsafe {
        let config = CString::new(
            r#"{
                "spaces": [
                    {"field": {"p": 2, "s": 1}, "support": "full:1,2"}
                ],
                "suites": ["spectrum", "key-lemma", "alon-boppana"],
                "trials": 4,
                "seed": 42
            }"#,
        )
        .unwrap();
        let mut report: *mut c_char = ptr::null_mut();
        assert_eq!(lab_verify(config.as_ptr(), &mut report), LabStatus::Ok);
        let text = take_string(report);
        let lines: Vec<&str> = text.lines().collect();
        assert!(!lines.is_empty());
        for line in &lines {
            let row: serde_json::Value = serde_json::from_str(line).unwrap();
            assert_eq!(row["holds"], true);
            assert_eq!(row["seed"], 42);
        }

        let bad = CString::new(r#"{"spaces": []}"#).unwrap();
        assert_eq!(
            lab_verify(bad.as_ptr(), &mut report),
            LabStatus::InvalidArgument
        );
    }
}

#[test]
fn generated_header_declares_the_surface() {
    let header = std::fs::read_to_string(concat!(
        env!("CARGO_MANIFEST_DIR"),
        "/include/incidence_lab.h"
    ))
    .expect("header generated at build time");
    for symbol in [
        "LabStatus",
        "lab_field_new",
        "lab_space_new",
        "lab_spectrum_compute",
        "lab_spectrum_entry",
        "lab_verify",
        "lab_string_free",
        "lab_last_error",
    ] {
        assert!(header.contains(symbol), "missing {symbol}");
    }
    // handles stay opaque
    assert!(header.contains("typedef struct LabField LabField;"));
    assert!(header.contains("typedef struct LabSpace LabSpace;"));
    assert!(header.contains("typedef struct LabSpectrum LabSpectrum;"));
}
