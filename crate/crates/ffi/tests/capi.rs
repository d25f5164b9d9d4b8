use std::ffi::{CStr, CString};
use std::path::PathBuf;
use std::process::Command;
use std::ptr;

use conic_condition_ffi::*;

fn matrix(m: usize, rows: &[f64]) -> *mut ConicMatrix {
    let mut a = ptr::null_mut();
    let s = unsafe { conic_matrix_new(m, rows.len() / m, rows.as_ptr(), &mut a) };
    assert_eq!(s, ConicStatus::Ok);
    a
}

#[test]
fn identity_report() {
    let a = matrix(3, &[1.0, 0.0, 0.0, 0.0, 1.0, 0.0, 0.0, 0.0, 1.0]);
    let mut r = ptr::null_mut();
    unsafe {
        assert_eq!(conic_classify(a, false, &mut r), ConicStatus::Ok);
        assert_eq!(conic_report_class(r), ConicClass::StrictlyFeasible);
        assert!((conic_report_cond(r) - 3f64.sqrt()).abs() < 1e-12);
        let mut c = [0.0; 3];
        assert_eq!(conic_report_center(r, c.as_mut_ptr(), 3), ConicStatus::Ok);
        assert!(c.iter().all(|x| (x + 1.0 / 3f64.sqrt()).abs() < 1e-9));
        assert_eq!(conic_report_center(r, c.as_mut_ptr(), 2), ConicStatus::InvalidInput);

        let mut valid = false;
        assert_eq!(conic_verify(a, r, &mut valid), ConicStatus::Ok);
        assert!(valid);

        let (mut m, mut n) = (0, 0);
        conic_matrix_dims(a, &mut m, &mut n);
        assert_eq!((m, n), (3, 3));
        conic_report_free(r);
        conic_matrix_free(a);
    }
}

#[test]
fn json_round_trip() {
    let s = 3f64.sqrt() / 2.0;
    let a = matrix(2, &[1.0, 0.0, -0.5, s, -0.5, -s]);
    unsafe {
        let mut r = ptr::null_mut();
        assert_eq!(conic_classify(a, true, &mut r), ConicStatus::Ok);
        assert_eq!(conic_report_class(r), ConicClass::Infeasible);
        assert!((conic_report_cond(r) - 2.0).abs() < 1e-9);
        let mut js = ptr::null_mut();
        assert_eq!(conic_report_to_json(r, &mut js), ConicStatus::Ok);
        let text = CStr::from_ptr(js).to_str().unwrap().to_owned();
        assert!(text.contains("\"class\":\"Infeasible\""));
        let mut back = ptr::null_mut();
        assert_eq!(conic_report_from_json(js, &mut back), ConicStatus::Ok);
        assert_eq!(conic_report_theta(back), conic_report_theta(r));
        conic_string_free(js);
        conic_report_free(back);
        conic_report_free(r);
        conic_matrix_free(a);
    }
}

#[test]
fn errors_carry_codes_and_messages() {
    let mut a = ptr::null_mut();
    let zero = [0.0, 0.0, 1.0, 0.0];
    unsafe {
        assert_eq!(conic_matrix_new(2, 2, zero.as_ptr(), &mut a), ConicStatus::DegenerateRow);
        assert!(a.is_null());
        let msg = CStr::from_ptr(conic_last_error_message()).to_str().unwrap();
        assert!(msg.contains('0'), "{msg}");
        assert_eq!(conic_matrix_new(2, 2, ptr::null(), &mut a), ConicStatus::NullPointer);

        let mut v = 0.0;
        assert_eq!(conic_moment_bound_cori(3, 3, 1.0, &mut v), ConicStatus::MomentDivergent);
        assert_eq!(conic_moment_bound_cori(3, 3, 0.5, &mut v), ConicStatus::Ok);
        assert!((v - (1.0 + 2.0 * 3f64.powf(2.5))).abs() < 1e-9);
        assert_eq!(conic_cap_measure(3, std::f64::consts::FRAC_PI_2, &mut v), ConicStatus::Ok);
        assert!((v - 0.5).abs() < 1e-15);
        assert_eq!(conic_sin_power_integral(-1, 1.0, &mut v), ConicStatus::InvalidInput);
        assert_eq!(conic_mean_bound(3, 100, &mut v), ConicStatus::Ok);
        assert!((v - 18.256).abs() < 1e-3);
        assert_eq!(conic_upper_tail_bound(3, 4, 10.0, &mut v), ConicStatus::Ok);
        assert!(v > 0.0 && v <= 1.0);

        let missing = CString::new("/nonexistent/matrix.csv").unwrap();
        assert_eq!(conic_matrix_load(missing.as_ptr(), &mut a), ConicStatus::Io);
        conic_matrix_free(ptr::null_mut());
        conic_report_free(ptr::null_mut());
        conic_string_free(ptr::null_mut());
    }
}

#[test]
fn perceptron_call() {
    let a = matrix(2, &[1.0, 0.0, 0.0, 1.0]);
    let (mut it, mut ok, mut x) = (0u64, false, [0.0; 2]);
    unsafe {
        let s = conic_perceptron(a, 100, ConicRule::FirstViolated, &mut it, &mut ok, x.as_mut_ptr());
        assert_eq!(s, ConicStatus::Ok);
        conic_matrix_free(a);
    }
    assert!(ok);
    assert_eq!(it, 2);
    assert_eq!(x, [-1.0, -1.0]);
}

#[test]
fn version_string() {
    let v = unsafe { CStr::from_ptr(conic_version()) }.to_str().unwrap();
    assert_eq!(v, env!("CARGO_PKG_VERSION"));
}

fn header_path() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("include/conic_condition.h")
}

#[test]
fn header_declares_the_api() {
    let h = std::fs::read_to_string(header_path()).unwrap();
    for name in [
        "typedef struct ConicMatrix ConicMatrix;",
        "typedef struct ConicReport ConicReport;",
        "CONIC_STATUS_OK = 0",
        "CONIC_STATUS_MOMENT_DIVERGENT = 7",
        "conic_matrix_new(size_t m",
        "conic_classify(",
        "conic_report_to_json(",
        "conic_last_error_message(void)",
    ] {
        assert!(h.contains(name), "header lacks {name}");
    }
}

const C_PROGRAM: &str = r#"
#include <math.h>
#include <stdio.h>
#include "conic_condition.h"

int main(void) {
    const double rows[] = {1, 0, 0, 0, 1, 0, 0, 0, 1};
    ConicMatrix *a = NULL;
    ConicReport *r = NULL;
    if (conic_matrix_new(3, 3, rows, &a) != CONIC_STATUS_OK) return 1;
    if (conic_classify(a, false, &r) != CONIC_STATUS_OK) return 2;
    if (conic_report_class(r) != CONIC_CLASS_STRICTLY_FEASIBLE) return 3;
    if (fabs(conic_report_cond(r) - sqrt(3.0)) > 1e-12) return 4;
    double v = 0;
    if (conic_moment_bound_cori(3, 3, 1.0, &v) != CONIC_STATUS_MOMENT_DIVERGENT) return 5;
    printf("%s\n", conic_last_error_message());
    conic_report_free(r);
    conic_matrix_free(a);
    return 0;
}
"#;

// Compiles and links a C client against the header and the static library.
#[test]
fn c_client_links_and_runs() {
    let target = std::env::var_os("CARGO_TARGET_DIR")
        .map(PathBuf::from)
        .unwrap_or_else(|| PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../target"));
    let lib = ["debug", "release"].iter().map(|p| target.join(p).join("libconic_condition_ffi.a")).find(|p| p.exists());
    let Some(lib) = lib else {
        eprintln!("static library not built; skipping C client");
        return;
    };
    if Command::new("cc").arg("--version").output().is_err() {
        eprintln!("no C compiler; skipping C client");
        return;
    }
    let dir = tempfile::tempdir().unwrap();
    let src = dir.path().join("client.c");
    let exe = dir.path().join("client");
    std::fs::write(&src, C_PROGRAM).unwrap();
    let status = Command::new("cc")
        .arg(&src)
        .arg("-I")
        .arg(header_path().parent().unwrap())
        .arg(&lib)
        .args(["-lm", "-lpthread", "-ldl", "-o"])
        .arg(&exe)
        .status()
        .unwrap();
    assert!(status.success());
    let out = Command::new(&exe).output().unwrap();
    assert!(out.status.success(), "exit {:?}", out.status.code());
    assert!(String::from_utf8_lossy(&out.stdout).contains("moment of order 1 diverges"));
}
