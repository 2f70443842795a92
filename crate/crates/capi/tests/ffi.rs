use std::ffi::{CStr, CString};
use std::path::PathBuf;
use std::process::Command;
use std::ptr;

use cauchy_capi::*;

fn last_error() -> String {
    let p = cc_last_error();
    assert!(!p.is_null());
    unsafe { CStr::from_ptr(p) }.to_string_lossy().into_owned()
}

#[test]
fn young_handle_roundtrip() {
    unsafe {
        let mut h = ptr::null_mut();
        assert_eq!(cc_young_power(2.0, &mut h), CcStatus::Ok);
        let mut v = 0.0;
        assert_eq!(cc_young_eval(h, 3.0, &mut v), CcStatus::Ok);
        assert_eq!(v, 9.0);
        // (t²)*(x) = x²/4
        assert_eq!(cc_young_conjugate(h, 1.0, &mut v), CcStatus::Ok);
        assert!((v - 0.25).abs() < 1e-9, "{v}");
        let re = [3.0, 0.0];
        let im = [0.0, 4.0];
        assert_eq!(cc_orlicz_norm(h, re.as_ptr(), im.as_ptr(), 2, &mut v), CcStatus::Ok);
        assert!((v - 5.0).abs() < 1e-8, "{v}");
        cc_young_free(h);
    }
}

#[test]
fn errors_set_status_and_message() {
    unsafe {
        let mut h = ptr::null_mut();
        assert_ne!(cc_young_power(0.5, &mut h), CcStatus::Ok);
        assert!(h.is_null());
        assert!(!last_error().is_empty());
        assert_eq!(cc_young_power(2.0, ptr::null_mut()), CcStatus::NullPointer);
        assert!(last_error().contains("null"));
    }
}

#[test]
fn series_and_bloch_norm() {
    unsafe {
        let re = [0.0, 1.0];
        let mut f = ptr::null_mut();
        assert_eq!(cc_series_new(re.as_ptr(), ptr::null(), 2, &mut f), CcStatus::Ok);
        assert_eq!(cc_series_degree(f), 1);
        let (mut a, mut b) = (0.0, 0.0);
        assert_eq!(cc_series_eval(f, 0.0, 0.5, &mut a, &mut b), CcStatus::Ok);
        assert_eq!((a, b), (0.0, 0.5));
        let mut w = ptr::null_mut();
        assert_eq!(cc_majorant_constant(1.0, 20, &mut w), CcStatus::Ok);
        let mut n = 0.0;
        assert_eq!(cc_bloch_norm(f, w, &mut n), CcStatus::Ok);
        // |f(0)| + sup (1 − |z|)|f′(z)| = 0 + 1 at z = 0.
        assert!((n - 1.0).abs() < 1e-12, "{n}");
        cc_majorant_free(w);
        cc_series_free(f);
    }
}

#[test]
fn clark_residual_small() {
    let theta = [0.1, 0.4, 0.75];
    let mass = [0.5, 0.3, 0.2];
    let mut r = 1.0;
    let s = unsafe { cc_clark_kernel_residual(theta.as_ptr(), mass.as_ptr(), 3, 0.0, 256, 20, 0.9, &mut r) };
    assert_eq!(s, CcStatus::Ok);
    assert!(r <= 1e-9, "{r}");
}

#[test]
fn run_experiment_json_statuses() {
    let cfg = CString::new(r#"{"kind":"orlicz-norm","phi":{"family":"power","params":[2.0]},"vectors":[[[3,0],[0,4]]]}"#)
        .unwrap();
    let mut out = ptr::null_mut();
    assert_eq!(unsafe { cc_run_experiment_json(cfg.as_ptr(), &mut out) }, CcStatus::Ok);
    let doc = unsafe { CStr::from_ptr(out) }.to_str().unwrap().to_owned();
    unsafe { cc_string_free(out) };
    assert!(doc.contains("\"results_csv\"") && doc.contains("max_rel_err"), "{doc}");

    let bad = CString::new("{}").unwrap();
    let mut out = ptr::null_mut();
    assert_eq!(unsafe { cc_run_experiment_json(bad.as_ptr(), &mut out) }, CcStatus::Schema);
    assert!(out.is_null());

    let infeasible = CString::new(r#"{"kind":"sa-run"}"#).unwrap();
    assert_eq!(unsafe { cc_run_experiment_json(infeasible.as_ptr(), &mut out) }, CcStatus::Resource);
    assert!(last_error().contains("stage 1"));
}

#[test]
fn version_is_nul_terminated() {
    let v = unsafe { CStr::from_ptr(cc_version()) }.to_str().unwrap();
    assert_eq!(v, env!("CARGO_PKG_VERSION"));
}

fn header() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("include/cauchy_coeffs.h")
}

#[test]
fn header_declares_api() {
    let h = std::fs::read_to_string(header()).unwrap();
    for sym in [
        "cc_last_error",
        "cc_young_power",
        "cc_young_free",
        "cc_orlicz_norm",
        "cc_series_new",
        "cc_bloch_norm",
        "cc_clark_kernel_residual",
        "cc_run_experiment_json",
        "cc_string_free",
        "CC_STATUS_RESOURCE",
        "typedef struct CcYoung CcYoung",
    ] {
        assert!(h.contains(sym), "header lacks {sym}");
    }
}

/// Compiles a C program against the generated header, links the static
/// library built alongside this test and runs it.
#[test]
fn c_program_links_and_runs() {
    let exe = std::env::current_exe().unwrap();
    let lib_dir = exe.parent().and_then(|d| d.parent()).unwrap();
    assert!(lib_dir.join("libcauchy_capi.a").is_file(), "static library missing in {}", lib_dir.display());
    let dir = tempfile::tempdir().unwrap();
    let src = dir.path().join("probe.c");
    std::fs::write(
        &src,
        r#"#include <math.h>
#include <stdio.h>
#include "cauchy_coeffs.h"
int main(void) {
  CcYoung *h = NULL;
  double v = 0.0;
  if (cc_young_power(3.0, &h) != CC_STATUS_OK) return 1;
  if (cc_young_conjugate(h, 1.5, &v) != CC_STATUS_OK) return 2;
  cc_young_free(h);
  /* (t^3)*(x) = 2 (x/3)^{3/2} */
  if (fabs(v - 2.0 * pow(0.5, 1.5)) > 1e-9) return 3;
  if (cc_young_power(0.5, &h) == CC_STATUS_OK) return 4;
  if (cc_last_error() == NULL) return 5;
  printf("ok %s\n", cc_version());
  return 0;
}
"#,
    )
    .unwrap();
    let bin = dir.path().join("probe");
    let status = Command::new("cc")
        .args(["-std=c99", "-Wall", "-Werror", "-I"])
        .arg(header().parent().unwrap())
        .arg(&src)
        .arg(lib_dir.join("libcauchy_capi.a"))
        .args(["-lpthread", "-ldl", "-lm", "-o"])
        .arg(&bin)
        .status()
        .expect("a C compiler is on PATH");
    assert!(status.success(), "C build failed");
    let out = Command::new(&bin).output().unwrap();
    assert!(out.status.success(), "probe exited with {:?}", out.status.code());
    assert!(String::from_utf8_lossy(&out.stdout).starts_with("ok "));
}
