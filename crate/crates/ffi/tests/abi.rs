use std::ffi::{CStr, CString};
use std::path::{Path, PathBuf};
use std::process::Command;
use std::ptr;

use iak_ffi::*;

fn scene_path(name: &str) -> CString {
    let p: PathBuf = Path::new(env!("CARGO_MANIFEST_DIR")).join(format!("../../scenes/{name}.json"));
    CString::new(p.to_str().unwrap()).unwrap()
}

fn load(name: &str) -> *mut IakScene {
    let mut scene = ptr::null_mut();
    let status = unsafe { iak_scene_load(scene_path(name).as_ptr(), &mut scene) };
    assert_eq!(status, IakStatus::Ok);
    assert!(!scene.is_null());
    scene
}

fn last_error() -> String {
    unsafe { CStr::from_ptr(iak_last_error_message()) }.to_string_lossy().into_owned()
}

#[test]
fn cantor_dimension_and_partition_sums() {
    let scene = load("cantor_point");
    let mut s = 0.0;
    assert_eq!(unsafe { iak_similarity_dimension(scene, &mut s) }, IakStatus::Ok);
    assert!((s - 2f64.ln() / 3f64.ln()).abs() < 1e-12);
    let mut z = 0.0;
    assert_eq!(unsafe { iak_partition_sum(scene, 3, s, &mut z) }, IakStatus::Ok);
    assert!((z - 1.0).abs() < 1e-9);
    let mut count = 0usize;
    assert_eq!(unsafe { iak_stopping_count(scene, 0.05, &mut count) }, IakStatus::Ok);
    // 3^-3 is the first power of 1/3 below 0.05
    assert_eq!(count, 8);
    let mut b = 0.0;
    assert_eq!(unsafe { iak_b_t_constant(scene, 1.0, &mut b) }, IakStatus::Ok);
    assert!((b - 2.0).abs() < 1e-12);
    unsafe { iak_scene_free(scene) };
}

#[test]
fn affine_scene_through_the_abi() {
    let scene = load("affine_point");
    let mut s = 0.0;
    assert_eq!(unsafe { iak_similarity_dimension(scene, &mut s) }, IakStatus::InvalidInput);
    assert!(!last_error().is_empty());
    let mut s1 = 0.0;
    assert_eq!(unsafe { iak_solve_s_k(scene, 1, 1e-12, &mut s1) }, IakStatus::Ok);
    assert!((s1 - 1.0).abs() < 1e-9);
    let mut bound = 0.0;
    let mut converged = false;
    assert_eq!(unsafe { iak_upper_lipschitz_dimension(scene, 1e-10, &mut bound, &mut converged) }, IakStatus::Ok);
    assert!(bound < s1);

    let mut report = IakBoundsReport::default();
    assert_eq!(unsafe { iak_verify_bounds(scene, -1.0, &mut report) }, IakStatus::Ok);
    assert!(report.holds, "{report:?}");
    assert_eq!(unsafe { iak_verify_bounds(scene, 0.0, &mut report) }, IakStatus::Ok);
    assert_eq!(report.slack, 0.0);

    let mut cloud = ptr::null_mut();
    assert_eq!(unsafe { iak_homogeneous_points(scene, 0.01, &mut cloud) }, IakStatus::Ok);
    let (len, dim) = unsafe { (iak_cloud_len(cloud), iak_cloud_dim(cloud)) };
    assert_eq!(dim, 2);
    let data = unsafe { std::slice::from_raw_parts(iak_cloud_data(cloud), len * dim) };
    assert!(data.iter().all(|x| (0.0..=1.0).contains(x)));
    unsafe { iak_cloud_free(cloud) };
    unsafe { iak_scene_free(scene) };
}

#[test]
fn measure_entry_points() {
    let scene = load("cantor_square");
    let mut closed = 0.0;
    assert_eq!(unsafe { iak_closed_form_measure(scene, &mut closed) }, IakStatus::Ok);
    assert!((closed - 0.25 * 9.0 / 7.0).abs() < 1e-12);
    let (mut ratio, mut exact) = (0.0, 0.0);
    assert_eq!(unsafe { iak_empirical_ratio(scene, 512, &mut ratio, &mut exact) }, IakStatus::Ok);
    assert!((exact - 9.0 / 7.0).abs() < 1e-12);
    assert!((ratio / exact - 1.0).abs() < 0.03);
    unsafe { iak_scene_free(scene) };
}

#[test]
fn failures_report_codes_and_messages() {
    let mut scene = ptr::null_mut();
    let missing = CString::new("/nonexistent/scene.json").unwrap();
    assert_eq!(unsafe { iak_scene_load(missing.as_ptr(), &mut scene) }, IakStatus::Io);
    assert!(last_error().contains("/nonexistent/scene.json"));

    let junk = CString::new("{\"name\": 3}").unwrap();
    assert_eq!(unsafe { iak_scene_from_json(junk.as_ptr(), &mut scene) }, IakStatus::Parse);
    assert!(scene.is_null());

    let mut s = 0.0;
    assert_eq!(unsafe { iak_similarity_dimension(ptr::null(), &mut s) }, IakStatus::NullPointer);
    assert_eq!(unsafe { iak_scene_load(ptr::null(), &mut scene) }, IakStatus::NullPointer);

    let warned = load("cantor_cosc_violation");
    let mut warnings = 0usize;
    assert_eq!(unsafe { iak_scene_warning_count(warned, &mut warnings) }, IakStatus::Ok);
    assert_eq!(warnings, 1);
    unsafe { iak_scene_free(warned) };
    unsafe { iak_scene_free(ptr::null_mut()) };
    unsafe { iak_cloud_free(ptr::null_mut()) };
}

#[test]
fn header_declares_the_api_and_compiles() {
    let include = Path::new(env!("CARGO_MANIFEST_DIR")).join("include");
    let header = std::fs::read_to_string(include.join("iak.h")).unwrap();
    for f in ["iak_scene_load", "iak_verify_bounds", "iak_cloud_data", "iak_last_error_message"] {
        assert!(header.contains(f), "{f} missing from iak.h");
    }
    let smoke = Path::new(env!("CARGO_MANIFEST_DIR")).join("tests/c/smoke.c");
    let status = Command::new("cc")
        .args(["-std=c99", "-Wall", "-Werror", "-fsyntax-only", "-I"])
        .arg(&include)
        .arg(&smoke)
        .status()
        .expect("a C compiler on PATH");
    assert!(status.success());
}
