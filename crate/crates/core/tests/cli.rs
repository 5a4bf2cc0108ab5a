use std::path::{Path, PathBuf};
use std::process::{Command, Output};

fn scenes_dir() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../../scenes")
}

fn bundled() -> Vec<PathBuf> {
    let mut paths: Vec<PathBuf> = std::fs::read_dir(scenes_dir())
        .unwrap()
        .map(|e| e.unwrap().path())
        .filter(|p| p.extension().is_some_and(|x| x == "json"))
        .collect();
    paths.sort();
    paths
}

fn iak(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_iak")).args(args).output().unwrap()
}

fn scene_arg(name: &str) -> String {
    scenes_dir().join(format!("{name}.json")).display().to_string()
}

fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}

#[test]
fn repeated_runs_are_byte_identical() {
    let scene = scene_arg("affine_point");
    for args in [
        vec!["dim", "pressure", "--scene", &scene],
        vec!["stopping", "--delta", "0.01", "--scene", &scene],
        vec!["dim", "box", "--scene", &scene, "--seed", "11"],
        vec!["render", "--delta", "0.005", "--format", "pgm", "--resolution", "64", "--scene", &scene],
    ] {
        let first = iak(&args);
        assert!(first.status.success(), "{args:?}: {}", stderr(&first));
        for threads in ["1", "4"] {
            let again = Command::new(env!("CARGO_BIN_EXE_iak")).args(&args).env("IAK_THREADS", threads).output().unwrap();
            assert_eq!(first.stdout, again.stdout, "{args:?} with {threads} threads");
        }
    }
}

#[test]
fn bundled_scenes_verify() {
    let mut args = vec!["verify".to_string()];
    args.extend(bundled().iter().map(|p| p.display().to_string()));
    let args: Vec<&str> = args.iter().map(String::as_str).collect();
    let out = iak(&args);
    let csv = String::from_utf8_lossy(&out.stdout).into_owned();
    assert!(out.status.success(), "{csv}\n{}", stderr(&out));
    assert!(csv.lines().skip(1).all(|l| l.split(',').nth(5) == Some("true")), "{csv}");
}

#[test]
fn empty_verify_prints_only_the_header() {
    let out = iak(&["verify"]);
    assert!(out.status.success());
    assert_eq!(String::from_utf8(out.stdout).unwrap(), "scene,check,value,lower,upper,holds,note\n");
}

#[test]
fn tiny_slack_fails_verification() {
    let out = iak(&["verify", "--slack", "0.0001", &scene_arg("cantor_square")]);
    assert_eq!(out.status.code(), Some(1));
    let csv = String::from_utf8_lossy(&out.stdout).into_owned();
    assert!(csv.lines().any(|l| l.contains("box:theorem_bounds") && l.contains(",false,")), "{csv}");
}

#[test]
fn expanding_map_is_rejected() {
    let text = std::fs::read_to_string(scenes_dir().join("cantor_point.json")).unwrap();
    let bad = text.replacen("\"ratio\": 0.3333333333333333,\n      \"translation\"", "\"ratio\": 1.2,\n      \"translation\"", 1);
    assert_ne!(bad, text);
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("expanding.json");
    std::fs::write(&path, bad).unwrap();
    let out = iak(&["dim", "pressure", "--scene", path.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
    assert!(stderr(&out).contains("ratio in (0,1): got 1.2"), "{}", stderr(&out));
}

#[test]
fn condensation_inside_a_first_level_image_warns() {
    let out = iak(&["dim", "pressure", "--scene", &scene_arg("cantor_cosc_violation")]);
    assert!(out.status.success());
    assert!(stderr(&out).contains("COSC looks violated"), "{}", stderr(&out));
}

#[test]
fn out_directory_receives_named_files() {
    let dir = tempfile::tempdir().unwrap();
    let out_dir = dir.path().to_str().unwrap();
    let out = iak(&["dim", "pressure", "--scene", &scene_arg("three_map"), "--out", out_dir]);
    assert!(out.status.success(), "{}", stderr(&out));
    assert!(out.stdout.is_empty());
    let csv = std::fs::read_to_string(dir.path().join("three_map_pressure.csv")).unwrap();
    assert!(csv.starts_with("k,s_k\n1,1.0000000000"), "{csv}");
}
