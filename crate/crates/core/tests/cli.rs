//! The `charmult` binary end to end.

use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use charmult::catalog;
use serde_json::Value;

fn fixture(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("tests/fixtures").join(name)
}

fn charmult(cache: &Path, args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_charmult")).arg("--cache-dir").arg(cache).args(args).output().expect("binary runs")
}

fn json(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).expect("stdout is JSON")
}

fn degrees(v: &Value) -> Vec<u64> {
    v["degrees"].as_array().unwrap().iter().map(|d| d.as_u64().unwrap()).collect()
}

#[test]
fn chartab_q8() {
    let dir = tempfile::tempdir().unwrap();
    let out = charmult(dir.path(), &["chartab", "--group", "Q8"]);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(degrees(&json(&out)), vec![1, 1, 1, 1, 2]);
}

#[test]
fn chartab_unitary_and_cyclic() {
    let dir = tempfile::tempdir().unwrap();
    let out = charmult(dir.path(), &["chartab", "--group", "U:n=2,q=3"]);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(degrees(&json(&out)).iter().map(|d| d * d).sum::<u64>(), 96);

    let out = charmult(dir.path(), &["chartab", "--group", "cyclic:4", "--format", "tsv"]);
    assert_eq!(out.status.code(), Some(0));
    let text = String::from_utf8(out.stdout).unwrap();
    assert_eq!(text.lines().filter(|l| l.starts_with("chi")).count(), 4);
    assert!(text.lines().all(|l| l.split('\t').count() == 5));
}

#[test]
fn verify_suites_pass() {
    let dir = tempfile::tempdir().unwrap();
    for suite in ["klein", "shadow-mult2", "lattice", "e1", "survey"] {
        let out = charmult(dir.path(), &["verify", "--suite", suite]);
        assert_eq!(out.status.code(), Some(0), "{suite}: {}", String::from_utf8_lossy(&out.stderr));
        let m = json(&out);
        assert_eq!(m["pass"], true, "{suite}");
        assert_eq!(m["subcommand"], "verify");
        assert!(!m["reports"].as_array().unwrap().is_empty());
    }
}

#[test]
fn warm_cache_is_stable() {
    let dir = tempfile::tempdir().unwrap();
    let args = ["verify", "--suite", "regular-identity", "--count", "40"];
    let cold = json(&charmult(dir.path(), &args));
    let warm = json(&charmult(dir.path(), &args));
    assert_eq!(cold["reports"], warm["reports"]);
    assert_eq!(warm["cache"]["misses"], 0);
    assert!(warm["cache"]["hits"].as_u64().unwrap() > 0);

    let out = tempfile::NamedTempFile::new().unwrap();
    let path = out.path().to_str().unwrap();
    let run = charmult(dir.path(), &["verify", "--suite", "e1", "--prec", "2", "--format", "tsv", "--out", path]);
    assert_eq!(run.status.code(), Some(0));
    assert!(run.stdout.is_empty());
    let text = std::fs::read_to_string(path).unwrap();
    assert!(text.starts_with("check\tpass\n"));
    assert!(text.lines().skip(1).all(|l| l.ends_with("\ttrue")));
}

#[test]
fn search_over_fixtures() {
    let dir = tempfile::tempdir().unwrap();
    for (file, nonempty) in [("q8.json", true), ("abelian.json", false), ("order16.json", true)] {
        let path = fixture(file);
        let out = charmult(dir.path(), &["search", "--fixtures", path.to_str().unwrap()]);
        assert_eq!(out.status.code(), Some(0), "{file}");
        let m = json(&out);
        assert_eq!(m["pass"], true);
        let configs = m["reports"][0]["witness"]["configurations"].as_u64().unwrap();
        assert_eq!(configs > 0, nonempty, "{file}");
    }
    let path = fixture("order16.json");
    let out = charmult(dir.path(), &["search", "--fixtures", path.to_str().unwrap(), "--max-order", "8"]);
    assert_eq!(json(&out)["reports"][0]["witness"]["configurations"], 0);
}

#[test]
fn exit_codes() {
    let dir = tempfile::tempdir().unwrap();
    assert_eq!(charmult(dir.path(), &["chartab", "--group", "bogus"]).status.code(), Some(2));
    assert_eq!(charmult(dir.path(), &["verify", "--suite", "nope"]).status.code(), Some(2));
    assert_eq!(charmult(dir.path(), &["verify", "--suite", "shadow-mult2", "--q", "4"]).status.code(), Some(2));
    assert_eq!(charmult(dir.path(), &["search", "--fixtures", "/nonexistent.json"]).status.code(), Some(2));
    assert_eq!(charmult(dir.path(), &["--help"]).status.code(), Some(0));
}

#[test]
fn fixtures_match_catalog() {
    let pairs = [
        ("order16.json", catalog::order16()),
        ("small.json", catalog::small_catalog()),
        ("q8.json", vec![catalog::q8()]),
    ];
    for (file, groups) in pairs {
        let read = catalog::read_fixtures(&fixture(file)).unwrap();
        let a: Vec<String> = read.iter().map(|g| g.content_hash()).collect();
        let b: Vec<String> = groups.iter().map(|g| g.content_hash()).collect();
        assert_eq!(a, b, "{file}");
    }
}
