use std::ffi::{CStr, CString};
use std::ptr;

use ncrational_ffi::*;

fn realize(expr: &str, d: usize) -> *mut NcRealization {
    let e = CString::new(expr).unwrap();
    let mut h = ptr::null_mut();
    assert_eq!(unsafe { nc_realization_from_expression(e.as_ptr(), d, &mut h) }, NcStatus::Ok);
    assert!(!h.is_null());
    h
}

fn minimal(expr: &str, d: usize) -> *mut NcRealization {
    let raw = realize(expr, d);
    let mut h = ptr::null_mut();
    assert_eq!(unsafe { nc_realization_minimize(raw, 1e-10, &mut h) }, NcStatus::Ok);
    unsafe { nc_realization_free(raw) };
    h
}

fn last_error() -> String {
    let p = nc_last_error();
    assert!(!p.is_null());
    let s = unsafe { CStr::from_ptr(p) }.to_str().unwrap().to_owned();
    unsafe { nc_string_free(p) };
    s
}

#[test]
fn three_state_fixture_through_handles() {
    let h = minimal("inv(1 - 0.5*z1*z2 - 0.5*z2*z1)", 2);
    unsafe {
        assert_eq!(nc_realization_size(h), 3);
        assert_eq!(nc_realization_vars(h), 2);
        let mut rho = 0.0;
        assert_eq!(nc_spr(h, &mut rho), NcStatus::Ok);
        assert!((rho - 2f64.powf(-0.25)).abs() < 1e-8);
        let mut inside = false;
        assert_eq!(nc_is_in_fock(h, &mut inside, ptr::null_mut()), NcStatus::Ok);
        assert!(inside);
        let (mut re, mut im) = (0.0, 0.0);
        let w = [1usize, 2];
        assert_eq!(nc_taylor_coeff(h, w.as_ptr(), 2, &mut re, &mut im), NcStatus::Ok);
        assert!((re - 0.5).abs() < 1e-12 && im.abs() < 1e-12);
        assert_eq!(nc_taylor_coeff(h, ptr::null(), 0, &mut re, &mut im), NcStatus::Ok);
        assert!((re - 1.0).abs() < 1e-12);
        nc_realization_free(h);
    }
}

#[test]
fn norm_and_evaluation() {
    let h = realize("1 + z1 + z1*z2", 2);
    unsafe {
        let mut norm = 0.0;
        assert_eq!(nc_h2_norm(h, &mut norm), NcStatus::Ok);
        assert!((norm - 3f64.sqrt()).abs() < 1e-12);
        // scalar point (0.5, 2i): 1 + 0.5 + 0.5·2i
        let x = [0.5, 0.0, 0.0, 2.0];
        let mut out = [0.0; 2];
        assert_eq!(nc_evaluate(h, 1, x.as_ptr(), out.as_mut_ptr()), NcStatus::Ok);
        assert!((out[0] - 1.5).abs() < 1e-14 && (out[1] - 1.0).abs() < 1e-14);
        nc_realization_free(h);
    }
}

#[test]
fn json_round_trip() {
    let h = minimal("inv(1 - 0.5*z1)", 1);
    unsafe {
        let mut s = ptr::null_mut();
        assert_eq!(nc_realization_to_json(h, &mut s), NcStatus::Ok);
        let mut back = ptr::null_mut();
        assert_eq!(nc_realization_from_json(s, &mut back), NcStatus::Ok);
        let (mut a, mut b, mut im) = (0.0, 0.0, 0.0);
        let w = [1usize, 1, 1];
        nc_taylor_coeff(h, w.as_ptr(), 3, &mut a, &mut im);
        nc_taylor_coeff(back, w.as_ptr(), 3, &mut b, &mut im);
        assert_eq!(a, b);
        assert!((a - 0.125).abs() < 1e-15);
        nc_string_free(s);
        nc_realization_free(back);
        nc_realization_free(h);
    }
}

#[test]
fn error_codes_and_messages() {
    unsafe {
        let bad = CString::new("1 + * z1").unwrap();
        let mut h = ptr::null_mut();
        assert_eq!(nc_realization_from_expression(bad.as_ptr(), 1, &mut h), NcStatus::SyntaxError);
        assert!(h.is_null());
        assert!(last_error().starts_with("syntax_error"));

        let g = minimal("inv(1 - z1)", 1);
        let mut norm = 0.0;
        assert_eq!(nc_h2_norm(g, &mut norm), NcStatus::NotInFockSpace);
        let mut inside = true;
        assert_eq!(nc_is_in_fock(g, &mut inside, ptr::null_mut()), NcStatus::Ok);
        assert!(!inside);
        let w = [2usize];
        let (mut re, mut im) = (0.0, 0.0);
        assert_eq!(nc_taylor_coeff(g, w.as_ptr(), 1, &mut re, &mut im), NcStatus::VariableOutOfRange);
        nc_realization_free(g);

        assert_eq!(nc_spr(ptr::null(), &mut norm), NcStatus::NullPointer);
        assert_eq!(nc_realization_size(ptr::null()), 0);
        nc_realization_free(ptr::null_mut());
        nc_string_free(ptr::null_mut());
        let mut out = ptr::null_mut();
        assert_eq!(nc_realization_from_json(ptr::null(), &mut out), NcStatus::NullPointer);
    }
}

#[test]
fn success_clears_last_error() {
    let bad = CString::new("z9").unwrap();
    let mut h = ptr::null_mut();
    assert_eq!(unsafe { nc_realization_from_expression(bad.as_ptr(), 2, &mut h) }, NcStatus::VariableOutOfRange);
    let h = realize("z1", 1);
    assert!(nc_last_error().is_null());
    unsafe { nc_realization_free(h) };
}

#[test]
fn header_declares_every_export() {
    let header = std::fs::read_to_string(concat!(env!("CARGO_MANIFEST_DIR"), "/include/ncrational.h")).unwrap();
    for name in [
        "nc_realization_from_expression",
        "nc_realization_from_json",
        "nc_realization_free",
        "nc_realization_size",
        "nc_realization_vars",
        "nc_realization_minimize",
        "nc_realization_to_json",
        "nc_spr",
        "nc_h2_norm",
        "nc_is_in_fock",
        "nc_taylor_coeff",
        "nc_evaluate",
        "nc_last_error",
        "nc_string_free",
        "typedef struct NcRealization NcRealization;",
        "NC_STATUS_NOT_IN_FOCK_SPACE = 10",
    ] {
        assert!(header.contains(name), "{name} missing from header");
    }
}

#[test]
fn header_compiles_as_c() {
    let header = concat!(env!("CARGO_MANIFEST_DIR"), "/include/ncrational.h");
    let Ok(out) = std::process::Command::new("cc").args(["-fsyntax-only", "-Wall", "-x", "c", header]).output() else {
        eprintln!("no C compiler; skipped");
        return;
    };
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
}
