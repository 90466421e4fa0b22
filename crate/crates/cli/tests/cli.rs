use std::path::Path;
use std::process::{Command, Output};

fn mpslab(dir: &Path, args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_mpslab"))
        .args(args)
        .current_dir(dir)
        .env_remove("MPSLAB_THREADS")
        .output()
        .expect("binary runs")
}

fn json(path: &Path) -> serde_json::Value {
    serde_json::from_str(&std::fs::read_to_string(path).unwrap()).unwrap()
}

#[test]
fn bell_generate_then_decompose() {
    let dir = tempfile::tempdir().unwrap();
    let out = mpslab(dir.path(), &["gen", "--kind", "bell", "--N", "3", "--out", "b.json"]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    assert!(dir.path().join("b.json.manifest.json").exists());

    let out = mpslab(dir.path(), &["tt", "--state", "b.json", "--report", "r.json"]);
    assert_eq!(out.status.code(), Some(0));
    let report = json(&dir.path().join("r.json"));
    assert_eq!(report["bond_dims"], serde_json::json!([2, 4, 8, 4, 2]));
    assert!(report["reconstruction_error"].as_f64().unwrap() < 1e-12);
    assert_eq!(report["cuts"][2]["singular_values"], 8);
    assert_eq!(report["cuts"][0]["singular_values"], 2);
}

#[test]
fn missing_state_is_a_usage_error() {
    let dir = tempfile::tempdir().unwrap();
    assert_eq!(mpslab(dir.path(), &["tt"]).status.code(), Some(2));
    assert_eq!(mpslab(dir.path(), &["tt", "--bogus"]).status.code(), Some(2));
    assert_eq!(mpslab(dir.path(), &["tt", "--state", "nope.json"]).status.code(), Some(2));
    assert_eq!(mpslab(dir.path(), &["verify", "bell", "--N", "6"]).status.code(), Some(2));
    let help = mpslab(dir.path(), &["spectrum", "--help"]);
    assert_eq!(help.status.code(), Some(0));
    assert!(String::from_utf8_lossy(&help.stdout).contains("--order"));
}

#[test]
fn spectrum_accumulates_orderings() {
    let dir = tempfile::tempdir().unwrap();
    mpslab(dir.path(), &["gen", "--kind", "prime", "--L", "8", "--N", "4", "--seed", "5", "--out", "p.json"]);
    let out = mpslab(
        dir.path(),
        &["spectrum", "--state", "p.json", "--cut", "4", "--order", "canonical", "--order", "fiedler", "--out", "s.csv"],
    );
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let text = std::fs::read_to_string(dir.path().join("s.csv")).unwrap();
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("ordering,cut,index,sigma"));
    let mut labels: Vec<&str> = lines.map(|l| l.split(',').next().unwrap()).collect();
    assert_eq!(labels.len(), 32);
    labels.dedup();
    assert_eq!(labels, ["canonical", "fiedler"]);
    let manifest = json(&dir.path().join("s.csv.manifest.json"));
    assert_eq!(manifest["subcommand"], "spectrum");
    assert!(manifest["prng"].as_str().unwrap().contains("ChaCha8"));
}

#[test]
fn outputs_are_reproducible() {
    let dir = tempfile::tempdir().unwrap();
    for name in ["a.json", "b.json"] {
        let out = mpslab(dir.path(), &["gen", "--kind", "random", "--L", "7", "--N", "3", "--seed", "9", "--out", name]);
        assert_eq!(out.status.code(), Some(0));
    }
    let a = std::fs::read(dir.path().join("a.json")).unwrap();
    assert_eq!(a, std::fs::read(dir.path().join("b.json")).unwrap());
    for name in ["a.csv", "b.csv"] {
        mpslab(dir.path(), &["spectrum", "--state", "a.json", "--cut", "3", "--order", "random:2", "--order", "fiedler", "--out", name]);
    }
    assert_eq!(
        std::fs::read(dir.path().join("a.csv")).unwrap(),
        std::fs::read(dir.path().join("b.csv")).unwrap()
    );
}

#[test]
fn search_reorder_round_trip() {
    let dir = tempfile::tempdir().unwrap();
    mpslab(dir.path(), &["gen", "--kind", "bell", "--N", "3", "--out", "b.json"]);
    let out = mpslab(dir.path(), &["search-order", "--state", "b.json", "--objective", "maxrank", "--out", "perm.json"]);
    assert_eq!(out.status.code(), Some(0));
    let perm = json(&dir.path().join("perm.json"));
    assert_eq!(perm["perm"], serde_json::json!([1, 4, 2, 5, 3, 6]));
    let out = mpslab(dir.path(), &["reorder", "--state", "b.json", "--perm", "perm.json", "--out", "r.json"]);
    assert_eq!(out.status.code(), Some(0));
    mpslab(dir.path(), &["tt", "--state", "r.json", "--report", "t.json"]);
    assert_eq!(json(&dir.path().join("t.json"))["max_bond_dim"], 2);
}

#[test]
fn certify_reports_blocks() {
    let dir = tempfile::tempdir().unwrap();
    mpslab(dir.path(), &["gen", "--kind", "prime", "--L", "6", "--N", "3", "--out", "p.json"]);
    let out = mpslab(dir.path(), &["certify", "--state", "p.json", "--cut", "3", "--out", "c.json"]);
    assert_eq!(out.status.code(), Some(0));
    let report = json(&dir.path().join("c.json"));
    assert_eq!(report["cuts"][0]["certified_total"], 8);
    assert_eq!(report["cuts"][0]["blocks"].as_array().unwrap().len(), 4);
    assert!(report["cuts"][0]["blocks"].as_array().unwrap().iter().all(|b| b["status"] == "PASS"));

    // a random state has no √p entries to certify
    mpslab(dir.path(), &["gen", "--kind", "random", "--L", "4", "--N", "2", "--out", "r.json"]);
    assert_eq!(mpslab(dir.path(), &["certify", "--state", "r.json", "--all-cuts"]).status.code(), Some(2));
    assert_eq!(mpslab(dir.path(), &["certify", "--state", "p.json"]).status.code(), Some(2));
}

#[test]
fn verify_subcommands() {
    let dir = tempfile::tempdir().unwrap();
    for n in ["1", "2", "5"] {
        let out = mpslab(dir.path(), &["verify", "bell", "--N", n]);
        assert_eq!(out.status.code(), Some(0));
        assert_eq!(String::from_utf8_lossy(&out.stdout).matches("PASS").count(), 3);
    }
    let out = mpslab(dir.path(), &["verify", "prime", "--L", "4", "--N", "2", "--out", "v.json"]);
    assert_eq!(out.status.code(), Some(0));
    assert!(String::from_utf8_lossy(&out.stdout).contains("24/24"));
    assert_eq!(json(&dir.path().join("v.json"))["passed"], true);
    let out = mpslab(dir.path(), &["verify", "prime", "--L", "7", "--N", "3"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn thread_override_is_accepted() {
    let dir = tempfile::tempdir().unwrap();
    let out = Command::new(env!("CARGO_BIN_EXE_mpslab"))
        .args(["verify", "prime", "--L", "5", "--N", "2"])
        .env("MPSLAB_THREADS", "1")
        .current_dir(dir.path())
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(0));
    let bad = Command::new(env!("CARGO_BIN_EXE_mpslab"))
        .args(["verify", "bell", "--N", "2"])
        .env("MPSLAB_THREADS", "many")
        .output()
        .unwrap();
    assert_eq!(bad.status.code(), Some(2));
}
