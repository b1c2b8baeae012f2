use std::ffi::{c_void, CStr, CString};
use std::path::{Path, PathBuf};
use std::process::Command;
use std::ptr;

use isoext_ffi::*;

fn last_error() -> String {
    unsafe { CStr::from_ptr(iso_last_error_message()) }.to_string_lossy().into_owned()
}

fn matrix_algebra(n: usize) -> *mut IsoAlgebra {
    let mut alg = ptr::null_mut();
    assert_eq!(unsafe { iso_algebra_matrix(n, &mut alg) }, IsoStatus::Ok);
    alg
}

#[test]
fn matrix_unit_has_norm_one_and_radius_zero() {
    let alg = matrix_algebra(2);
    assert_eq!(unsafe { iso_algebra_dim(alg) }, 4);
    // E_12 in the matrix-unit basis.
    let coords = [0.0, 0.0, 1.0, 0.0, 0.0, 0.0, 0.0, 0.0];
    let (mut norm, mut radius) = (0.0, 1.0);
    unsafe {
        assert_eq!(iso_element_norm(alg, coords.as_ptr(), 8, &mut norm), IsoStatus::Ok);
        assert_eq!(iso_spectral_radius(alg, coords.as_ptr(), 8, &mut radius), IsoStatus::Ok);
        iso_algebra_free(alg);
    }
    assert!((norm - 1.0).abs() < 1e-12);
    assert!(radius.abs() < 1e-12);
}

#[test]
fn radical_dimensions() {
    let mut out = usize::MAX;
    let alg = matrix_algebra(3);
    assert_eq!(unsafe { iso_radical_dim(alg, &mut out) }, IsoStatus::Ok);
    assert_eq!(out, 0);
    unsafe { iso_algebra_free(alg) };
    for which in [IsoDame::A, IsoDame::B] {
        let mut alg = ptr::null_mut();
        unsafe {
            assert_eq!(iso_algebra_dame(which, &mut alg), IsoStatus::Ok);
            assert_eq!(iso_algebra_dim(alg), 4);
            assert_eq!(iso_radical_dim(alg, &mut out), IsoStatus::Ok);
            iso_algebra_free(alg);
        }
        assert_eq!(out, 3);
    }
}

#[test]
fn null_handles_are_errors() {
    let coords = [0.0; 2];
    let mut out = 0.0;
    let status = unsafe { iso_element_norm(ptr::null(), coords.as_ptr(), 2, &mut out) };
    assert_eq!(status, IsoStatus::NullPointer);
    assert!(last_error().contains("algebra"));
    assert_eq!(unsafe { iso_algebra_dim(ptr::null()) }, 0);
    unsafe { iso_algebra_free(ptr::null_mut()) };
    unsafe { iso_string_free(ptr::null_mut()) };
}

#[test]
fn invalid_sizes_are_rejected() {
    let mut alg = ptr::null_mut();
    assert_eq!(unsafe { iso_algebra_matrix(0, &mut alg) }, IsoStatus::InvalidArgument);
    assert!(alg.is_null());
    assert_eq!(unsafe { iso_algebra_function(0, &mut alg) }, IsoStatus::InvalidArgument);
}

/// `S(M) = M^T`.
unsafe extern "C" fn transpose(input: *const f64, output: *mut f64, n: usize, user: *mut c_void) {
    let calls = unsafe { &mut *(user as *mut usize) };
    *calls += 1;
    let a = unsafe { std::slice::from_raw_parts(input, 2 * n * n) };
    let b = unsafe { std::slice::from_raw_parts_mut(output, 2 * n * n) };
    for i in 0..n {
        for j in 0..n {
            b[2 * (j * n + i)] = a[2 * (i * n + j)];
            b[2 * (j * n + i) + 1] = a[2 * (i * n + j) + 1];
        }
    }
}

#[test]
fn classify_transpose_through_callback() {
    let n = 3;
    let mut calls = 0usize;
    let mut result = IsoClassification {
        form: IsoForm::NoFormFits,
        residual: f64::NAN,
        condition_number: f64::NAN,
        hypothesis_residuals: [f64::NAN; 4],
    };
    let mut u = vec![0.0; 2 * n * n];
    let status = unsafe {
        iso_classify_matrix(
            Some(transpose),
            &mut calls as *mut usize as *mut c_void,
            n,
            30,
            4,
            &mut result,
            u.as_mut_ptr(),
        )
    };
    assert_eq!(status, IsoStatus::Ok, "{}", last_error());
    assert_eq!(result.form, IsoForm::TransposeLinear);
    assert!(result.residual < 1e-8);
    assert!(calls >= 30);
    // U is the identity scaled to unit Frobenius norm.
    let d = 1.0 / (n as f64).sqrt();
    for i in 0..n {
        for j in 0..n {
            let want = if i == j { d } else { 0.0 };
            assert!((u[2 * (i * n + j)] - want).abs() < 1e-9);
            assert!(u[2 * (i * n + j) + 1].abs() < 1e-9);
        }
    }
}

#[test]
fn classify_reports_bad_input() {
    let mut result = IsoClassification {
        form: IsoForm::NoFormFits,
        residual: 0.0,
        condition_number: 0.0,
        hypothesis_residuals: [0.0; 4],
    };
    let mut u = vec![0.0; 8];
    let mut calls = 0usize;
    let status = unsafe {
        iso_classify_matrix(Some(transpose), &mut calls as *mut usize as *mut c_void, 2, 3, 0, &mut result, u.as_mut_ptr())
    };
    assert_eq!(status, IsoStatus::ClassifyFailed);
    assert!(last_error().contains("samples"));
}

fn scenario_text(name: &str) -> CString {
    let path = Path::new(env!("CARGO_MANIFEST_DIR"))
        .join("../core/scenarios")
        .join(format!("{name}.json"));
    CString::new(std::fs::read_to_string(path).unwrap()).unwrap()
}

#[test]
fn scenario_round_trip() {
    let json = scenario_text("swap_c2");
    let mut report = ptr::null_mut();
    let mut all_match = false;
    let status = unsafe { iso_run_scenario_json(json.as_ptr(), true, 3, &mut report, &mut all_match) };
    assert_eq!(status, IsoStatus::Ok, "{}", last_error());
    assert!(all_match);
    let text = unsafe { CStr::from_ptr(report) }.to_str().unwrap().to_owned();
    unsafe { iso_string_free(report) };
    let v: serde_json::Value = serde_json::from_str(&text).unwrap();
    assert_eq!(v["seed"], 3);
    assert_eq!(v["scenario_id"], "swap_c2");
}

#[test]
fn scenario_errors_map_to_status() {
    let mut report = ptr::null_mut();
    let mut all_match = true;
    let bad = CString::new("{ not json").unwrap();
    let status = unsafe { iso_run_scenario_json(bad.as_ptr(), false, 0, &mut report, &mut all_match) };
    assert_eq!(status, IsoStatus::ParseError);
    assert!(report.is_null());
    assert!(last_error().contains("line 1"));

    let broken = scenario_text("broken_custom");
    let status = unsafe { iso_run_scenario_json(broken.as_ptr(), false, 0, &mut report, &mut all_match) };
    assert_eq!(status, IsoStatus::FixtureError);
}

fn target_dir() -> PathBuf {
    // tests run from target/<profile>/deps
    let exe = std::env::current_exe().unwrap();
    exe.parent().unwrap().parent().unwrap().to_path_buf()
}

#[test]
fn header_compiles_and_links_from_c() {
    let header_dir = Path::new(env!("CARGO_MANIFEST_DIR")).join("include");
    let lib = target_dir().join("libisoext_ffi.a");
    if !lib.exists() {
        eprintln!("skipping link step: {} not built", lib.display());
        return;
    }
    let src = Path::new(env!("CARGO_MANIFEST_DIR")).join("tests").join("smoke.c");
    let out = std::env::temp_dir().join(format!("isoext-smoke-{}", std::process::id()));
    let status = Command::new("cc")
        .arg(&src)
        .arg("-I")
        .arg(&header_dir)
        .arg(&lib)
        .args(["-lpthread", "-ldl", "-lm", "-o"])
        .arg(&out)
        .status()
        .expect("cc available");
    assert!(status.success());
    let run = Command::new(&out).output().unwrap();
    assert!(run.status.success(), "{}", String::from_utf8_lossy(&run.stderr));
    assert_eq!(String::from_utf8_lossy(&run.stdout).trim(), "ok");
}
