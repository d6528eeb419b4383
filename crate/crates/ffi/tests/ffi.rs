use std::ffi::{c_char, CStr, CString};
use std::path::{Path, PathBuf};
use std::process::Command;
use std::ptr;

use circle_ergodic_ffi::*;

fn c(s: &str) -> CString {
    CString::new(s).unwrap()
}

/// Takes ownership of a returned string.
fn take(p: *mut c_char) -> String {
    assert!(!p.is_null());
    let s = unsafe { CStr::from_ptr(p) }.to_str().unwrap().to_string();
    unsafe { ce_string_free(p) };
    s
}

fn last_error() -> Option<String> {
    let p = ce_last_error();
    (!p.is_null()).then(|| take(p))
}

fn rotation(angle: &str) -> *mut CeMap {
    let mut m = ptr::null_mut();
    assert_eq!(unsafe { ce_map_rotation(c(angle).as_ptr(), &mut m) }, CeStatus::Ok);
    m
}

#[test]
fn maps_evaluate_and_compose() {
    unsafe {
        let xs = [c("0"), c("1/2"), c("1")];
        let ys = [c("0"), c("3/4"), c("1")];
        let xp: Vec<*const c_char> = xs.iter().map(|s| s.as_ptr()).collect();
        let yp: Vec<*const c_char> = ys.iter().map(|s| s.as_ptr()).collect();
        let mut h = ptr::null_mut();
        assert_eq!(ce_map_new(xp.as_ptr(), yp.as_ptr(), 3, &mut h), CeStatus::Ok);

        let mut y = ptr::null_mut();
        assert_eq!(ce_map_evaluate(h, c("1/4").as_ptr(), &mut y), CeStatus::Ok);
        assert_eq!(take(y), "3/8");

        let r = rotation("1/3");
        let mut rh = ptr::null_mut();
        assert_eq!(ce_map_compose(r, h, &mut rh), CeStatus::Ok);
        assert_eq!(ce_map_evaluate(rh, c("1/4").as_ptr(), &mut y), CeStatus::Ok);
        assert_eq!(take(y), "17/24");

        let mut d = ptr::null_mut();
        assert_eq!(ce_map_c0_distance(rh, h, &mut d), CeStatus::Ok);
        assert_eq!(take(d), "1/3");

        // JSON round trip
        let mut js = ptr::null_mut();
        assert_eq!(ce_map_to_json(h, &mut js), CeStatus::Ok);
        let js = c(&take(js));
        let mut h2 = ptr::null_mut();
        assert_eq!(ce_map_from_json(js.as_ptr(), &mut h2), CeStatus::Ok);
        assert_eq!(ce_map_c0_distance(h, h2, &mut d), CeStatus::Ok);
        assert_eq!(take(d), "0/1");

        for m in [h, h2, r, rh] {
            ce_map_free(m);
        }
    }
}

#[test]
fn rotation_number_is_exact_for_a_rational_rotation() {
    unsafe {
        let r = rotation("2/5");
        let (mut lo, mut hi) = (ptr::null_mut(), ptr::null_mut());
        assert_eq!(ce_map_rotation_number(r, 16, &mut lo, &mut hi), CeStatus::Ok);
        assert_eq!((take(lo), take(hi)), ("2/5".into(), "2/5".into()));
        ce_map_free(r);

        let mut e2 = ptr::null_mut();
        assert_eq!(ce_map_expanding(2, &mut e2), CeStatus::Ok);
        assert_eq!(ce_map_rotation_number(e2, 16, &mut lo, &mut hi), CeStatus::InvalidInput);
        assert!(last_error().is_some());
        ce_map_free(e2);
    }
}

#[test]
fn lebesgue_is_doubling_invariant() {
    unsafe {
        let mut e2 = ptr::null_mut();
        assert_eq!(ce_map_expanding(2, &mut e2), CeStatus::Ok);
        let mut leb = ptr::null_mut();
        assert_eq!(ce_measure_lebesgue(&mut leb), CeStatus::Ok);
        let mut push = ptr::null_mut();
        assert_eq!(ce_measure_pushforward(leb, e2, 1000, &mut push), CeStatus::Ok);
        let mut eq = false;
        assert_eq!(ce_measure_equal(leb, push, &mut eq), CeStatus::Ok);
        assert!(eq);
        let mut mass = ptr::null_mut();
        assert_eq!(ce_measure_total_mass(push, &mut mass), CeStatus::Ok);
        assert_eq!(take(mass), "1/1");

        let mut js = ptr::null_mut();
        assert_eq!(ce_measure_to_json(push, &mut js), CeStatus::Ok);
        let js = c(&take(js));
        let mut back = ptr::null_mut();
        assert_eq!(ce_measure_from_json(js.as_ptr(), &mut back), CeStatus::Ok);
        assert_eq!(ce_measure_equal(leb, back, &mut eq), CeStatus::Ok);
        assert!(eq);
        for m in [leb, push, back] {
            ce_measure_free(m);
        }
        ce_map_free(e2);
    }
}

#[test]
fn pushforward_past_the_cap_reports_resource_cap() {
    unsafe {
        let mut e3 = ptr::null_mut();
        assert_eq!(ce_map_expanding(3, &mut e3), CeStatus::Ok);
        let mut mu = ptr::null_mut();
        assert_eq!(ce_measure_lebesgue(&mut mu), CeStatus::Ok);
        let mut out = ptr::null_mut();
        assert_eq!(ce_measure_pushforward(mu, e3, 0, &mut out), CeStatus::ResourceCap);
        assert!(out.is_null());
        assert!(last_error().unwrap().contains("cap"));
        ce_measure_free(mu);
        ce_map_free(e3);
    }
}

#[test]
fn shredding_verifies_and_detects_a_wrong_map() {
    unsafe {
        let mut e2 = ptr::null_mut();
        assert_eq!(ce_map_expanding(2, &mut e2), CeStatus::Ok);
        let mut s = ptr::null_mut();
        assert_eq!(ce_shred(e2, c("1/5").as_ptr(), &mut s), CeStatus::Ok);
        let mut regions = 0usize;
        assert_eq!(ce_shred_region_count(s, &mut regions), CeStatus::Ok);
        assert!(regions > 0);

        let mut g = ptr::null_mut();
        assert_eq!(ce_shred_map(s, &mut g), CeStatus::Ok);
        let mut slack = ptr::null_mut();
        assert_eq!(ce_shred_verify(g, s, &mut slack), CeStatus::Ok);
        assert!(!take(slack).starts_with('-'));
        let mut d = ptr::null_mut();
        assert_eq!(ce_map_c0_distance(g, e2, &mut d), CeStatus::Ok);
        let d: circle_ergodic::exact::Rational = take(d).parse().unwrap();
        assert!(d < "1/5".parse().unwrap());

        let mut report = ptr::null_mut();
        assert_eq!(ce_shred_report_json(s, &mut report), CeStatus::Ok);
        assert!(take(report).contains("regions"));

        let id = rotation("0");
        assert_eq!(ce_shred_verify(id, s, ptr::null_mut()), CeStatus::VerificationFailed);
        assert!(last_error().unwrap().starts_with("verification failed"));
        for m in [e2, g, id] {
            ce_map_free(m);
        }
        ce_shred_free(s);
    }
}

#[test]
fn classify_returns_diagnostics_json() {
    unsafe {
        let id = rotation("0");
        let protocol = c(r#"{"grid": 16, "horizons": [10, 100]}"#);
        let mut out = ptr::null_mut();
        let status = ce_map_classify(id, protocol.as_ptr(), &mut out);
        assert_eq!(status, CeStatus::Ok, "{:?}", last_error());
        let v: serde_json::Value = serde_json::from_str(&take(out)).unwrap();
        assert!(v["verdicts"].as_array().unwrap().len() == 5);
        ce_map_free(id);
    }
}

#[test]
fn bad_arguments_are_reported() {
    unsafe {
        let mut m = ptr::null_mut();
        assert_eq!(ce_map_rotation(ptr::null(), &mut m), CeStatus::NullPointer);
        assert_eq!(ce_map_rotation(c("1/0").as_ptr(), &mut m), CeStatus::InvalidInput);
        assert_eq!(ce_map_rotation(c("1/2").as_ptr(), ptr::null_mut()), CeStatus::NullPointer);
        assert_eq!(ce_map_from_json(c("{").as_ptr(), &mut m), CeStatus::InvalidInput);
        assert!(m.is_null());
        let xs = [c("0"), c("1/2"), c("1")];
        let ys = [c("0"), c("3/4"), c("1/2")];
        let xp: Vec<*const c_char> = xs.iter().map(|s| s.as_ptr()).collect();
        let yp: Vec<*const c_char> = ys.iter().map(|s| s.as_ptr()).collect();
        assert_eq!(ce_map_new(xp.as_ptr(), yp.as_ptr(), 3, &mut m), CeStatus::InvalidInput);
        // success clears the message
        let r = rotation("1/2");
        assert!(last_error().is_none());
        ce_map_free(r);
        ce_map_free(ptr::null_mut());
        ce_string_free(ptr::null_mut());
    }
}

#[test]
fn version_matches_the_crate() {
    let v = unsafe { CStr::from_ptr(ce_version()) };
    assert_eq!(v.to_str().unwrap(), env!("CARGO_PKG_VERSION"));
}

/// `deps/` of the running profile, where `cargo test` leaves the static library.
fn deps_dir() -> PathBuf {
    std::env::current_exe().unwrap().parent().unwrap().to_path_buf()
}

/// Compiles a small C program against the generated header and the static
/// library, then runs it.
#[test]
fn c_program_links_against_the_header() {
    let header_dir = Path::new(env!("CARGO_MANIFEST_DIR")).join("include");
    assert!(header_dir.join("circle_ergodic.h").exists());
    let lib = deps_dir().join("libcircle_ergodic_ffi.a");
    assert!(lib.exists(), "{}", lib.display());
    let dir = tempfile::tempdir().unwrap();
    let src = dir.path().join("smoke.c");
    std::fs::write(
        &src,
        r#"#include <stdio.h>
#include <string.h>
#include "circle_ergodic.h"

int main(void) {
    CeMap *r = NULL;
    char *lo = NULL, *hi = NULL;
    if (ce_map_rotation("2/5", &r) != CE_STATUS_OK) return 10;
    if (ce_map_rotation_number(r, 16, &lo, &hi) != CE_STATUS_OK) return 11;
    int ok = strcmp(lo, "2/5") == 0 && strcmp(hi, "2/5") == 0;
    printf("%s %s\n", lo, hi);
    ce_string_free(lo);
    ce_string_free(hi);
    ce_map_free(r);
    if (ce_map_rotation("x", &r) != CE_STATUS_INVALID_INPUT) return 12;
    char *err = ce_last_error();
    if (err == NULL) return 13;
    ce_string_free(err);
    return ok ? 0 : 14;
}
"#,
    )
    .unwrap();
    let exe = dir.path().join("smoke");
    let cc = std::env::var("CC").unwrap_or_else(|_| "cc".into());
    let status = Command::new(cc)
        .arg(&src)
        .arg("-I")
        .arg(&header_dir)
        .arg(&lib)
        .args(["-lpthread", "-ldl", "-lm", "-o"])
        .arg(&exe)
        .status()
        .expect("C compiler available");
    assert!(status.success());
    let out = Command::new(&exe).output().unwrap();
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(String::from_utf8_lossy(&out.stdout), "2/5 2/5\n");
}
