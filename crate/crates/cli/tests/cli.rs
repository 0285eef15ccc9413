//! End-to-end tests of the binary: output contracts, exit codes, and
//! the cache round trip (including rejection of malformed caches and
//! detection of wrong cached values).

use std::path::Path;
use std::process::{Command, Output};

fn kdvtau(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_kdvtau"))
        .args(args)
        .env_remove("KDVTAU_CACHE")
        .output()
        .expect("binary runs")
}

fn stdout(out: &Output) -> String {
    String::from_utf8_lossy(&out.stdout).into_owned()
}

fn stderr(out: &Output) -> String {
    String::from_utf8_lossy(&out.stderr).into_owned()
}

#[test]
fn scalar_outputs() {
    let out = kdvtau(&["wk", "--g", "1", "--ks", "1"]);
    assert_eq!(stdout(&out).trim(), "1/24");
    assert!(out.status.success());

    let out = kdvtau(&["wk", "--g", "1", "--ks", "2"]);
    assert_eq!(stdout(&out).trim(), "0");

    let out = kdvtau(&["nbi", "--g", "1", "--ks", "0"]);
    assert_eq!(stdout(&out).trim(), "1/8 · (x²/2)^0");

    let out = kdvtau(&["cbgw", "--g", "0", "--ks", "0"]);
    assert_eq!(stdout(&out).trim(), "1/4 · (x²)^1");
}

#[test]
fn kn_outputs() {
    let out = kdvtau(&["kn", "--g", "0", "--ks", "0,0,0"]);
    assert_eq!(stdout(&out).trim(), "1");

    let out = kdvtau(&["kn", "--g", "2", "--ks", "0"]);
    assert_eq!(stdout(&out).trim(), "0");

    let out = kdvtau(&["kn", "--g", "2", "--n", "0"]);
    assert_eq!(stdout(&out).trim(), "-1/240");

    // unstable input is a usage error
    let out = kdvtau(&["kn", "--g", "0", "--ks", "0"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn malformed_arguments_exit_2() {
    let out = kdvtau(&["wk", "--g", "1", "--ks", "1,x"]);
    assert_eq!(out.status.code(), Some(2));
    let out = kdvtau(&["verify", "nosuchsuite"]);
    assert_eq!(out.status.code(), Some(2));
    let out = kdvtau(&["kn", "--g", "1"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn guard_rails_rejected_before_compute() {
    let out = kdvtau(&["verify", "theorem18", "--gmax", "7"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(stderr(&out).contains("guard rails"));
    let out = kdvtau(&["verify", "theorem18", "--nmax", "11"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn verify_suites_pass_at_small_bounds() {
    for suite in ["kdv", "hirota", "theorem18", "cor41", "cor42", "galilean-group"] {
        let out = kdvtau(&[
            "verify", suite, "--gmax", "1", "--nmax", "3", "--kmax", "2", "--qmax", "1",
        ]);
        assert_eq!(out.status.code(), Some(0), "{suite}: {}", stderr(&out));
        assert!(stdout(&out).contains("# summary"), "{suite}");
        assert!(!stdout(&out).contains("ok=false"), "{suite}");
    }
}

#[test]
fn json_and_csv_formats() {
    let out = kdvtau(&["nbi", "--g", "1", "--ks", "0", "--format", "json"]);
    let v: serde_json::Value = serde_json::from_str(&stdout(&out)).unwrap();
    assert_eq!(v["value"], "1/8");
    assert_eq!(v["base"], "x²/2");
    assert_eq!(v["exponent"], 0);

    let out = kdvtau(&[
        "verify", "theorem18", "--gmax", "0", "--nmax", "3", "--kmax", "1", "--format", "json",
    ]);
    let v: serde_json::Value = serde_json::from_str(&stdout(&out)).unwrap();
    assert_eq!(v["failed"], 0);
    assert!(v["records"].as_array().unwrap().len() > 0);

    let out = kdvtau(&[
        "verify", "theorem18", "--gmax", "0", "--nmax", "3", "--kmax", "1", "--format", "csv",
    ]);
    let text = stdout(&out);
    assert!(text.starts_with("identity,location,lhs,rhs,ok"));
    assert!(text.lines().count() > 1);
}

#[test]
fn cache_round_trip() {
    let dir = tempfile::tempdir().unwrap();
    let cache = dir.path().join("cache.txt");
    let cache_str = cache.to_str().unwrap();

    let out = kdvtau(&["wk", "--g", "1", "--ks", "1", "--cache", cache_str]);
    assert!(out.status.success());
    let saved = std::fs::read_to_string(&cache).unwrap();
    assert!(saved.lines().any(|l| l == "WK 1 1 1/24"), "cache: {saved}");

    // warm-cache rerun gives the same answer and leaves the file valid
    let out = kdvtau(&["wk", "--g", "1", "--ks", "1", "--cache", cache_str]);
    assert_eq!(stdout(&out).trim(), "1/24");
}

#[test]
fn cache_path_from_environment() {
    let dir = tempfile::tempdir().unwrap();
    let cache = dir.path().join("env-cache.txt");
    let out = Command::new(env!("CARGO_BIN_EXE_kdvtau"))
        .args(["wk", "--g", "1", "--ks", "1"])
        .env("KDVTAU_CACHE", &cache)
        .output()
        .unwrap();
    assert!(out.status.success());
    assert!(std::fs::read_to_string(&cache).unwrap().contains("WK 1 1 1/24"));
}

#[test]
fn corrupt_cache_rejected_with_line_number() {
    let dir = tempfile::tempdir().unwrap();
    let cache = dir.path().join("cache.txt");
    std::fs::write(&cache, "WK 1 1 1/24\nWK 1 x 1/24\n").unwrap();
    let out = kdvtau(&["wk", "--g", "1", "--ks", "1", "--cache", cache.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
    assert!(stderr(&out).contains("line 2"), "stderr: {}", stderr(&out));
}

#[test]
fn wrong_cached_value_fails_verification() {
    let dir = tempfile::tempdir().unwrap();
    let cache = dir.path().join("cache.txt");
    // a well-formed but wrong three-point value; it passes load-time
    // validation and must be caught by the identity check instead
    std::fs::write(&cache, "WK 0 0,0,0 2\n").unwrap();
    let out = kdvtau(&[
        "verify", "kdv", "--gmax", "0", "--nmax", "4", "--kmax", "2",
        "--cache", cache.to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(1));
    let text = stdout(&out);
    let failing = text.lines().find(|l| l.contains("ok=false")).expect("a failing record");
    assert!(failing.contains("genus=0"), "failing line: {failing}");
}

#[test]
fn reports_are_byte_identical_across_runs(){
    let dir = tempfile::tempdir().unwrap();
    let cache = dir.path().join("cache.txt");
    let args = ["verify", "theorem18", "--gmax", "1", "--nmax", "2", "--kmax", "2"];

    let cold = kdvtau(&[&args[..], &["--cache", cache.to_str().unwrap()]].concat());
    let warm = kdvtau(&[&args[..], &["--cache", cache.to_str().unwrap()]].concat());
    let single = kdvtau(&[&args[..], &["--deterministic"]].concat());
    assert_eq!(stdout(&cold), stdout(&warm));
    assert_eq!(stdout(&cold), stdout(&single));
}

#[test]
fn report_to_file() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("report.txt");
    let out = kdvtau(&[
        "verify", "kdv", "--gmax", "0", "--nmax", "3", "--kmax", "1",
        "--out", path.to_str().unwrap(),
    ]);
    assert!(out.status.success());
    assert!(stdout(&out).is_empty());
    assert!(std::fs::read_to_string(&path).unwrap().contains("# identity=kdv"));
}

#[test]
fn verify_all_merges_every_suite() {
    let out = kdvtau(&[
        "verify", "all", "--gmax", "1", "--nmax", "3", "--kmax", "2", "--qmax", "1",
    ]);
    assert_eq!(out.status.code(), Some(0), "{}", stderr(&out));
    let text = stdout(&out);
    for suite in ["kdv", "hirota", "theorem18", "cor41", "cor42", "galilean-group"] {
        assert!(text.contains(&format!("all {suite}")), "missing {suite}");
    }
}

#[test]
fn cache_survives_verify_and_speeds_up_nothing_incorrectly() {
    // the saved cache from one suite must load cleanly for another
    let dir = tempfile::tempdir().unwrap();
    let cache = dir.path().join("cache.txt");
    let cache_str = cache.to_str().unwrap();
    let out = kdvtau(&[
        "verify", "cor41", "--gmax", "1", "--nmax", "2", "--kmax", "2", "--cache", cache_str,
    ]);
    assert!(out.status.success());
    let out = kdvtau(&[
        "verify", "theorem18", "--gmax", "1", "--nmax", "2", "--kmax", "2", "--cache", cache_str,
    ]);
    assert!(out.status.success(), "{}", stderr(&out));
    assert!(Path::new(cache_str).exists());
}

#[test]
fn threads_flag_matches_default_output() {
    let a = kdvtau(&["verify", "cor42", "--gmax", "1", "--nmax", "2", "--kmax", "2"]);
    let b = kdvtau(&[
        "verify", "cor42", "--gmax", "1", "--nmax", "2", "--kmax", "2", "--threads", "2",
    ]);
    assert_eq!(stdout(&a), stdout(&b));
}
