use std::ffi::CStr;
use std::path::PathBuf;
use std::process::Command;
use std::ptr;

use kummer_ffi::*;

fn last_error() -> Option<String> {
    let p = kummer_last_error_message();
    (!p.is_null()).then(|| unsafe { CStr::from_ptr(p) }.to_string_lossy().into_owned())
}

fn with_ctx<R>(terms: u32, f: impl FnOnce(*const KummerContext) -> R) -> R {
    let ctx = kummer_context_new(terms, 0.8);
    assert!(!ctx.is_null());
    let r = f(ctx);
    unsafe { kummer_context_free(ctx) };
    r
}

fn blank() -> KummerResult {
    KummerResult {
        value: f64::NAN,
        log_magnitude: f64::NAN,
        sign: 0,
        terms_used: 0,
        last_term_ratio: f64::NAN,
        domain_ok: false,
        status: KummerValueStatus::Normal,
    }
}

#[test]
fn eval_matches_core() {
    with_ctx(4, |ctx| {
        let mut out = blank();
        let s = unsafe { kummer_eval_m(ctx, 99.0, 500.0, 500.0, true, &mut out) };
        assert_eq!(s, KummerStatus::Ok);
        let p = kummer_core::Parameters::new(99.0, 500.0, 500.0).unwrap();
        let core = kummer_core::eval_m_scaled(&p, 4).unwrap();
        assert_eq!(out.value.to_bits(), core.value.to_bits());
        assert_eq!(out.terms_used, 5);
        assert_eq!(out.sign, 1);
        assert!(out.domain_ok);
        assert!(last_error().is_none());
    });
}

#[test]
fn eval_u_reports_tiny_values() {
    with_ctx(4, |ctx| {
        let mut out = blank();
        let s = unsafe { kummer_eval_u(ctx, 130.0, 25.1, 100.0, false, &mut out) };
        assert_eq!(s, KummerStatus::Ok);
        assert!((out.value / 3.8723892985558665e-293 - 1.0).abs() < 1e-11);
        let s = unsafe { kummer_eval_m(ctx, 3.0, 4.0, 1000.0, false, &mut out) };
        assert_eq!(s, KummerStatus::Ok);
        assert_eq!(out.status, KummerValueStatus::Overflow);
        assert!(out.log_magnitude > 900.0);
    });
}

#[test]
fn errors_map_to_status_codes() {
    assert!(kummer_context_new(9, 0.8).is_null());
    assert!(last_error().unwrap().contains("terms"));
    assert!(kummer_context_new(4, 1.5).is_null());
    with_ctx(2, |ctx| {
        let mut out = blank();
        let s = unsafe { kummer_eval_m(ctx, 1.0, -2.0, 3.0, false, &mut out) };
        assert_eq!(s, KummerStatus::Domain);
        assert!(last_error().unwrap().contains("domain"));
        let s = unsafe { kummer_eval_m(ctx, 1.0, 2.0, 3.0, false, ptr::null_mut()) };
        assert_eq!(s, KummerStatus::NullPointer);
    });
    let mut out = blank();
    let s = unsafe { kummer_eval_u(ptr::null(), 1.0, 2.0, 3.0, false, &mut out) };
    assert_eq!(s, KummerStatus::NullPointer);
}

#[test]
fn coefficient_handle() {
    let mut h: *mut KummerCoefficients = ptr::null_mut();
    let s = unsafe { kummer_coefficients_new(KummerWhich::U, 10.0, 20.0, 30.0, 6, &mut h) };
    assert_eq!(s, KummerStatus::Ok);
    assert_eq!(unsafe { kummer_coefficients_len(h) }, 7);
    let mut v = 0.0;
    assert_eq!(unsafe { kummer_coefficients_f_tilde(h, 0, &mut v) }, KummerStatus::Ok);
    assert_eq!(v, 1.0);
    assert_eq!(unsafe { kummer_coefficients_f_tilde(h, 7, &mut v) }, KummerStatus::Usage);
    unsafe { kummer_coefficients_free(h) };
    assert_eq!(unsafe { kummer_coefficients_len(ptr::null()) }, 0);
    let s = unsafe { kummer_coefficients_new(KummerWhich::M, 1.0, 2.0, 3.0, 20, &mut h) };
    assert_eq!(s, KummerStatus::Usage);
    assert!(h.is_null());
}

#[test]
fn residuals() {
    let mut r = f64::NAN;
    let s = unsafe { kummer_recurrence_residual(KummerWhich::M, 99.0, 500.0, 500.0, 0, &mut r) };
    assert_eq!(s, KummerStatus::Ok);
    assert!(r > 1e-6 && r < 1e-5, "{r}");
    let s = unsafe { kummer_recurrence_residual(KummerWhich::U, 3.0, 0.5, 10.0, 4, &mut r) };
    assert_eq!(s, KummerStatus::Domain);
    let s = unsafe { kummer_wronskian_residual(0.5, 0.7, 100.0, 4, &mut r) };
    assert_eq!(s, KummerStatus::Ok);
    assert!(r < 1e-10);
}

#[test]
fn errors_are_per_thread() {
    assert!(kummer_context_new(99, 0.8).is_null());
    let other = std::thread::spawn(last_error).join().unwrap();
    assert!(other.is_none());
    assert!(last_error().is_some());
}

#[test]
fn header_declares_api() {
    let header = std::fs::read_to_string(concat!(env!("CARGO_MANIFEST_DIR"), "/include/kummer.h")).unwrap();
    for name in [
        "kummer_context_new",
        "kummer_context_free",
        "kummer_eval_m",
        "kummer_eval_u",
        "kummer_coefficients_new",
        "kummer_coefficients_len",
        "kummer_coefficients_f_tilde",
        "kummer_coefficients_free",
        "kummer_recurrence_residual",
        "kummer_wronskian_residual",
        "kummer_last_error_message",
        "typedef struct KummerContext KummerContext;",
    ] {
        assert!(header.contains(name), "{name}");
    }
}

/// Builds `tests/c/smoke.c` against the header and the static library.
#[test]
fn c_program_links_and_runs() {
    let manifest = PathBuf::from(env!("CARGO_MANIFEST_DIR"));
    // target/<profile>/deps/<test binary>
    let profile_dir = std::env::current_exe().unwrap().parent().unwrap().parent().unwrap().to_path_buf();
    let lib = profile_dir.join("libkummer_ffi.a");
    if !lib.exists() {
        let status = Command::new(env!("CARGO"))
            .args(["build", "-p", "kummer-ffi", "--lib"])
            .current_dir(&manifest)
            .status()
            .unwrap();
        assert!(status.success());
    }
    assert!(lib.exists(), "{}", lib.display());
    let exe = std::env::temp_dir().join(format!("kummer_smoke_{}", std::process::id()));
    let status = Command::new("cc")
        .arg(manifest.join("tests/c/smoke.c"))
        .arg("-I")
        .arg(manifest.join("include"))
        .arg(&lib)
        .args(["-lm", "-lpthread", "-ldl", "-o"])
        .arg(&exe)
        .status()
        .expect("a C compiler is available");
    assert!(status.success());
    let out = Command::new(&exe).output().unwrap();
    let _ = std::fs::remove_file(&exe);
    assert!(out.status.success(), "exit {:?}", out.status.code());
    assert_eq!(String::from_utf8_lossy(&out.stdout), "ok\n");
}
