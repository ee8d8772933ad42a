use std::ffi::{CStr, CString};
use std::path::Path;
use std::process::Command;
use std::ptr;

use freepd_ffi::*;

fn last_error() -> String {
    let p = fpd_last_error();
    assert!(!p.is_null());
    unsafe { CStr::from_ptr(p) }.to_string_lossy().into_owned()
}

fn take_string(p: *mut std::ffi::c_char) -> String {
    let s = unsafe { CStr::from_ptr(p) }.to_string_lossy().into_owned();
    unsafe { fpd_string_free(p) };
    s
}

fn haagerup(m: usize, t: f64, n: usize) -> *mut FpdFunction {
    let mut phi = ptr::null_mut();
    assert_eq!(unsafe { fpd_haagerup(m, 1, t, n, &mut phi) }, FpdStatus::Ok);
    phi
}

#[test]
fn haagerup_round_trip_through_json() {
    let phi = haagerup(2, 2f64.ln(), 2);
    let (mut radius, mut k) = (0, 0);
    assert_eq!(unsafe { fpd_function_shape(phi, &mut radius, &mut k) }, FpdStatus::Ok);
    assert_eq!((radius, k), (2, 1));

    let mut buf = [0.0; 2];
    let word = [-2, 1];
    assert_eq!(
        unsafe { fpd_function_value(phi, word.as_ptr(), 2, buf.as_mut_ptr(), 2) },
        FpdStatus::Ok
    );
    assert!((buf[0] - 0.25).abs() < 1e-15 && buf[1] == 0.0);

    let mut text = ptr::null_mut();
    assert_eq!(unsafe { fpd_function_to_json(phi, &mut text) }, FpdStatus::Ok);
    let text = take_string(text);
    let c = CString::new(text.clone()).unwrap();
    let mut back = ptr::null_mut();
    assert_eq!(unsafe { fpd_function_from_json(c.as_ptr(), &mut back) }, FpdStatus::Ok);
    let mut again = ptr::null_mut();
    assert_eq!(unsafe { fpd_function_to_json(back, &mut again) }, FpdStatus::Ok);
    assert_eq!(take_string(again), text);
    unsafe {
        fpd_function_free(phi);
        fpd_function_free(back);
    }
}

#[test]
fn central_extension_is_pd_and_orthogonal() {
    let phi = haagerup(2, 0.5, 1);
    let mut ext = ptr::null_mut();
    assert_eq!(unsafe { fpd_extend_central(phi, 3, 1e-10, &mut ext) }, FpdStatus::Ok);
    let (mut is_pd, mut min_eig) = (false, 0.0);
    assert_eq!(unsafe { fpd_verify(ext, 1e-10, &mut is_pd, &mut min_eig) }, FpdStatus::Ok);
    assert!(is_pd && min_eig > 0.0);
    let (mut holds, mut violation) = (false, 1.0);
    assert_eq!(unsafe { fpd_check_ortho(ext, 1, 1e-8, &mut holds, &mut violation) }, FpdStatus::Ok);
    assert!(holds, "violation {violation}");
    unsafe {
        fpd_function_free(phi);
        fpd_function_free(ext);
    }
}

#[test]
fn params_regenerate_random_extension() {
    let phi = haagerup(2, 0.7, 1);
    let mut ext = ptr::null_mut();
    assert_eq!(unsafe { fpd_extend_random(phi, 3, 11, 0.9, 1e-10, &mut ext) }, FpdStatus::Ok);
    let mut params = ptr::null_mut();
    assert_eq!(unsafe { fpd_extract_params(ext, 1, 1e-10, &mut params) }, FpdStatus::Ok);
    let params = CString::new(take_string(params)).unwrap();
    let mut again = ptr::null_mut();
    assert_eq!(
        unsafe { fpd_extend_params(phi, params.as_ptr(), 3, 1e-10, &mut again) },
        FpdStatus::Ok
    );
    let mut a = [0.0; 2];
    let mut b = [0.0; 2];
    for word in [[1, 2, -1], [-2, -2, 1], [2, 1, 1]] {
        unsafe {
            fpd_function_value(ext, word.as_ptr(), 3, a.as_mut_ptr(), 2);
            fpd_function_value(again, word.as_ptr(), 3, b.as_mut_ptr(), 2);
        }
        assert!((a[0] - b[0]).abs() < 1e-10 && (a[1] - b[1]).abs() < 1e-10);
    }
    unsafe {
        fpd_function_free(phi);
        fpd_function_free(ext);
        fpd_function_free(again);
    }
}

#[test]
fn factor_returns_certificate() {
    let p = CString::new(
        r#"{"m":1,"c":1,"terms":[
            {"word":[],"value":[[[2.0,0.0]]]},
            {"word":[1],"value":[[[1.0,0.0]]]},
            {"word":[-1],"value":[[[1.0,0.0]]]}]}"#,
    )
    .unwrap();
    let mut cert = ptr::null_mut();
    assert_eq!(unsafe { fpd_factor_sos(p.as_ptr(), 1e-8, 20_000, &mut cert) }, FpdStatus::Ok);
    let cert = take_string(cert);
    assert!(cert.contains("\"residual\""));

    let negative = CString::new(r#"{"m":1,"c":1,"terms":[{"word":[],"value":[[[-1.0,0.0]]]}]}"#).unwrap();
    let mut none = ptr::null_mut();
    assert_eq!(
        unsafe { fpd_factor_sos(negative.as_ptr(), 1e-8, 2_000, &mut none) },
        FpdStatus::MathFailure
    );
    assert!(none.is_null());
    assert!(last_error().contains("no certificate"));
}

#[test]
fn errors_are_reported() {
    let mut out = ptr::null_mut();
    assert_eq!(unsafe { fpd_function_from_json(ptr::null(), &mut out) }, FpdStatus::NullPointer);
    assert!(last_error().contains("json"));

    let bad = CString::new("{not json").unwrap();
    assert_eq!(unsafe { fpd_function_from_json(bad.as_ptr(), &mut out) }, FpdStatus::InvalidInput);
    assert!(out.is_null());

    assert_eq!(unsafe { fpd_haagerup(2, 1, -1.0, 2, &mut out) }, FpdStatus::InvalidInput);
    assert!(last_error().starts_with("invalid"));

    let phi = haagerup(2, 0.5, 1);
    let mut tiny = [0.0; 1];
    let word = [1];
    assert_eq!(
        unsafe { fpd_function_value(phi, word.as_ptr(), 1, tiny.as_mut_ptr(), 1) },
        FpdStatus::InvalidInput
    );
    // success clears the message
    let (mut r, mut k) = (0, 0);
    assert_eq!(unsafe { fpd_function_shape(phi, &mut r, &mut k) }, FpdStatus::Ok);
    assert!(fpd_last_error().is_null());
    unsafe { fpd_function_free(phi) };
    unsafe { fpd_function_free(ptr::null_mut()) };
    unsafe { fpd_string_free(ptr::null_mut()) };
}

#[test]
fn version_is_set() {
    let v = unsafe { CStr::from_ptr(fpd_version()) }.to_str().unwrap();
    assert_eq!(v, env!("CARGO_PKG_VERSION"));
}

#[test]
fn header_compiles_as_c() {
    let header = Path::new(env!("CARGO_MANIFEST_DIR")).join("include/freepd.h");
    let text = std::fs::read_to_string(&header).unwrap();
    for name in ["fpd_extend_central", "fpd_factor_sos", "FPD_STATUS_MATH_FAILURE", "typedef struct FpdFunction"] {
        assert!(text.contains(name), "header lacks {name}");
    }
    let Ok(status) = Command::new("cc")
        .args(["-fsyntax-only", "-Wall", "-Werror", "-x", "c"])
        .arg(&header)
        .status()
    else {
        eprintln!("no C compiler; skipped syntax check");
        return;
    };
    assert!(status.success());
}
