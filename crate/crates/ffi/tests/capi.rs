use std::ffi::{c_char, CString};
use std::path::Path;
use std::process::Command;
use std::ptr;

use schottky_lab_ffi::*;

fn last_error() -> String {
    unsafe {
        let n = sl_last_error_message(ptr::null_mut(), 0);
        let mut buf = vec![0 as c_char; n];
        sl_last_error_message(buf.as_mut_ptr(), n);
        std::ffi::CStr::from_ptr(buf.as_ptr()).to_string_lossy().into_owned()
    }
}

#[test]
fn theta_eval_round_trip() {
    unsafe {
        let mut tau = ptr::null_mut();
        assert_eq!(sl_period_matrix_new(1, [0.0, 1.0].as_ptr(), &mut tau), SlStatus::Ok);
        assert_eq!(sl_period_matrix_genus(tau), 1);
        let mut out = [0.0; 2];
        let mut bound = f64::NAN;
        let z = [0.0, 0.0];
        assert_eq!(sl_theta_eval(tau, z.as_ptr(), ptr::null(), ptr::null(), out.as_mut_ptr(), &mut bound), SlStatus::Ok);
        // θ(i, 0) = π^{1/4}/Γ(3/4)
        assert!((out[0] - 1.086_434_811_213_308).abs() < 1e-14 && out[1].abs() < 1e-15);
        assert!(bound < 1e-14);
        let half = [0.5];
        assert_eq!(sl_theta_eval(tau, z.as_ptr(), half.as_ptr(), half.as_ptr(), out.as_mut_ptr(), ptr::null_mut()), SlStatus::Ok);
        assert!(out[0].hypot(out[1]) < 1e-15);
        let bad = [0.25];
        assert_eq!(
            sl_theta_eval(tau, z.as_ptr(), bad.as_ptr(), half.as_ptr(), out.as_mut_ptr(), ptr::null_mut()),
            SlStatus::InvalidInput
        );
        assert!(last_error().contains("characteristic"));
        sl_period_matrix_free(tau);
    }
}

#[test]
fn rejects_bad_period_matrix_and_nulls() {
    unsafe {
        let mut tau = ptr::null_mut();
        assert_eq!(sl_period_matrix_new(1, [0.0, -1.0].as_ptr(), &mut tau), SlStatus::InvalidInput);
        assert!(tau.is_null());
        assert_eq!(sl_period_matrix_new(1, ptr::null(), &mut tau), SlStatus::NullPointer);
        assert_eq!(sl_theta_eval(ptr::null(), ptr::null(), ptr::null(), ptr::null(), ptr::null_mut(), ptr::null_mut()), SlStatus::NullPointer);
        assert_eq!(sl_period_matrix_genus(ptr::null()), 0);
        sl_period_matrix_free(ptr::null_mut());
        sl_report_free(ptr::null_mut());
    }
}

#[test]
fn fixture_documents() {
    let json = CString::new(r#"{"genus":1,"tau":[[[0,1]]],"provenance":"unit"}"#).unwrap();
    let bad = CString::new(r#"{"genus":1,"tau":[[[0,1]]]}"#).unwrap();
    unsafe {
        let mut tau = ptr::null_mut();
        assert_eq!(sl_period_matrix_from_fixture(json.as_ptr(), &mut tau), SlStatus::Ok);
        assert_eq!(sl_period_matrix_genus(tau), 1);
        sl_period_matrix_free(tau);
        let mut other = ptr::null_mut();
        assert_eq!(sl_period_matrix_from_fixture(bad.as_ptr(), &mut other), SlStatus::Schema);
        assert!(last_error().contains("provenance"));
    }
}

#[test]
fn run_check_and_read_report() {
    let cfg = CString::new(r#"{"check":"addition","genus":2,"samples":5,"seed":1}"#).unwrap();
    unsafe {
        let mut rep = ptr::null_mut();
        assert_eq!(sl_run_check(cfg.as_ptr(), 2, &mut rep), SlStatus::Ok);
        assert_eq!(sl_report_len(rep), 5);
        assert_eq!(sl_report_all_pass(rep), 1);
        let (mut r, mut n, mut t, mut p) = (0.0, 0.0, 0.0, 0);
        assert_eq!(sl_report_case(rep, 4, &mut r, &mut n, &mut t, &mut p), SlStatus::Ok);
        assert!(r < t && p == 1 && n > 0.0);
        assert_eq!(sl_report_case(rep, 5, &mut r, &mut n, &mut t, &mut p), SlStatus::OutOfRange);
        let mut need = 0;
        assert_eq!(sl_report_csv(rep, ptr::null_mut(), 0, &mut need), SlStatus::Ok);
        let mut buf = vec![0 as c_char; need];
        assert_eq!(sl_report_csv(rep, buf.as_mut_ptr(), need, &mut need), SlStatus::Ok);
        let csv = std::ffi::CStr::from_ptr(buf.as_ptr()).to_str().unwrap().to_string();
        assert_eq!(csv.lines().count(), 5);
        assert!(csv.starts_with("addition,0000,"));
        sl_report_free(rep);

        let mut one = ptr::null_mut();
        assert_eq!(sl_run_check(cfg.as_ptr(), 1, &mut one), SlStatus::Ok);
        let mut again = vec![0 as c_char; need];
        sl_report_csv(one, again.as_mut_ptr(), need, &mut need);
        assert_eq!(buf, again);
        sl_report_free(one);
    }
}

#[test]
fn run_check_errors() {
    let unknown = CString::new(r#"{"check":"nope"}"#).unwrap();
    let extra = CString::new(r#"{"check":"addition","extra":1}"#).unwrap();
    unsafe {
        let mut rep = ptr::null_mut();
        assert_eq!(sl_run_check(unknown.as_ptr(), 0, &mut rep), SlStatus::UnknownCheck);
        assert_eq!(sl_run_check(extra.as_ptr(), 0, &mut rep), SlStatus::Schema);
        let invalid = [0xffu8 as c_char, 0];
        assert_eq!(sl_run_check(invalid.as_ptr(), 0, &mut rep), SlStatus::InvalidUtf8);
        assert!(rep.is_null());
    }
}

#[test]
fn selftest_passes() {
    unsafe {
        let mut rep = ptr::null_mut();
        assert_eq!(sl_ops_selftest(&mut rep), SlStatus::Ok);
        assert!(sl_report_len(rep) > 10);
        assert_eq!(sl_report_all_pass(rep), 1);
        sl_report_free(rep);
    }
}

#[test]
fn header_declares_every_symbol_and_compiles() {
    let dir = Path::new(env!("CARGO_MANIFEST_DIR"));
    let header = std::fs::read_to_string(dir.join("include/schottky_lab.h")).unwrap();
    let src = std::fs::read_to_string(dir.join("src/lib.rs")).unwrap();
    let exported: Vec<&str> = src
        .lines()
        .filter_map(|l| l.trim().strip_prefix("pub unsafe extern \"C\" fn "))
        .map(|l| l.split('(').next().unwrap())
        .collect();
    assert!(exported.len() >= 12);
    for f in exported {
        assert!(header.contains(&format!("{f}(")), "{f} missing from header");
    }
    if let Ok(cc) = which_cc() {
        let probe = std::env::temp_dir().join(format!("schottky-lab-probe-{}.c", std::process::id()));
        std::fs::write(&probe, "#include \"schottky_lab.h\"\nint main(void) { return sl_period_matrix_genus(0) != 0; }\n").unwrap();
        let st = Command::new(cc)
            .args(["-fsyntax-only", "-Wall", "-Werror", "-I"])
            .arg(dir.join("include"))
            .arg(&probe)
            .status()
            .unwrap();
        assert!(st.success());
    }
}

fn which_cc() -> Result<&'static str, ()> {
    for cc in ["cc", "gcc", "clang"] {
        if Command::new(cc).arg("--version").output().is_ok_and(|o| o.status.success()) {
            return Ok(cc);
        }
    }
    Err(())
}
