use std::path::Path;
use std::process::{Command, Output};

fn propyla(dir: &Path, args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_propyla"))
        .current_dir(dir)
        .args(args)
        .output()
        .expect("binary runs")
}

fn tiny_config(dir: &Path) -> String {
    let p = dir.join("tiny.json");
    std::fs::write(&p, propyla::parties::Config::tiny().to_json()).unwrap();
    p.to_string_lossy().into_owned()
}

#[test]
fn store_read_and_verify_round_trip() {
    let tmp = tempfile::tempdir().unwrap();
    let d = tmp.path();
    let cfg = tiny_config(d);
    let st = ["--config", &cfg, "--state-dir", "s"];
    let run = |extra: &[&str]| propyla(d, &[&st[..], extra].concat());

    assert_eq!(run(&["init"]).status.code(), Some(0));
    assert_eq!(run(&["write", "4", "--data", "hello"]).status.code(), Some(0));
    assert_eq!(run(&["advance", "--years", "3"]).status.code(), Some(0));
    assert_eq!(run(&["renew-com"]).status.code(), Some(0));
    assert_eq!(run(&["reshare"]).status.code(), Some(0));
    assert_eq!(run(&["renew-ts"]).status.code(), Some(0));
    let out = run(&["read", "4", "--data-out", "dat", "--evidence-out", "ev"]);
    assert_eq!(out.status.code(), Some(0));
    let v: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(v["data_hex"], hex::encode("hello"));

    let verify = |data: &str, time: &str| {
        run(&["verify", "--data", data, "--time", time, "--evidence", "ev", "--trust-anchor", "s/trust_anchor.json"])
    };
    assert_eq!(verify("dat", "0").status.code(), Some(0));
    assert_eq!(verify("dat", "1").status.code(), Some(1));
}

#[test]
fn verify_on_tampered_evidence_exits_1() {
    let tmp = tempfile::tempdir().unwrap();
    let d = tmp.path();
    let cfg = tiny_config(d);
    let st = ["--config", &cfg, "--state-dir", "s"];
    let run = |extra: &[&str]| propyla(d, &[&st[..], extra].concat());
    run(&["init"]);
    run(&["write", "1", "--data", "payload"]);
    run(&["read", "1", "--data-out", "dat", "--evidence-out", "ev"]);
    let mut ev = std::fs::read(d.join("ev")).unwrap();
    let mid = ev.len() / 2;
    ev[mid] ^= 0x01;
    std::fs::write(d.join("ev"), ev).unwrap();
    let out = run(&["verify", "--data", "dat", "--time", "0", "--evidence", "ev", "--trust-anchor", "s/trust_anchor.json"]);
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn simulate_emits_one_csv_row_per_year() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = tiny_config(tmp.path());
    let out = propyla(tmp.path(), &["--config", &cfg, "--out", "csv", "simulate"]);
    assert_eq!(out.status.code(), Some(0));
    let text = String::from_utf8(out.stdout).unwrap();
    let horizon = propyla::parties::Config::tiny().horizon_years as usize;
    assert_eq!(text.lines().count(), horizon + 1);
    assert!(text.starts_with("year,"));
}

#[test]
fn usage_errors_exit_2() {
    let tmp = tempfile::tempdir().unwrap();
    let d = tmp.path();
    assert_eq!(propyla(d, &["no-such-command"]).status.code(), Some(2));
    assert_eq!(propyla(d, &["--out", "xml", "fuzz"]).status.code(), Some(2));
    assert_eq!(propyla(d, &["--state-dir", "missing", "read", "1"]).status.code(), Some(2));
    let cfg = tiny_config(d);
    propyla(d, &["--config", &cfg, "--state-dir", "s", "init"]);
    assert_eq!(propyla(d, &["--state-dir", "s", "init"]).status.code(), Some(2));
    assert_eq!(propyla(d, &["--state-dir", "s", "write", "0", "--data", "x"]).status.code(), Some(2));
    assert_eq!(propyla(d, &["--state-dir", "s", "advance", "--years", "99"]).status.code(), Some(2));
    assert_eq!(propyla(d, &["aph-test", "--distinguisher", "psychic"]).status.code(), Some(2));
}

#[test]
fn fuzz_and_aph_commands_report() {
    let tmp = tempfile::tempdir().unwrap();
    let out = propyla(tmp.path(), &["--out", "csv", "fuzz", "--per-class", "10"]);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(String::from_utf8(out.stdout).unwrap().lines().count(), 12);
    let out = propyla(tmp.path(), &["aph-test", "--game", "oram", "--distinguisher", "path-equality", "--trials", "40"]);
    assert_eq!(out.status.code(), Some(0));
    let v: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(v["trials"], 40);
}

#[test]
fn same_seed_same_state_directory() {
    let tmp = tempfile::tempdir().unwrap();
    let d = tmp.path();
    let cfg = tiny_config(d);
    for s in ["a", "b"] {
        for args in [vec!["init"], vec!["write", "2", "--data", "x"], vec!["advance", "--days", "800"], vec!["read", "3"]] {
            let out = propyla(d, &[&["--config", &cfg, "--seed", "9", "--state-dir", s][..], &args[..]].concat());
            assert_eq!(out.status.code(), Some(0), "{args:?}: {}", String::from_utf8_lossy(&out.stderr));
        }
    }
    for f in std::fs::read_dir(d.join("a")).unwrap() {
        let name = f.unwrap().file_name();
        assert_eq!(std::fs::read(d.join("a").join(&name)).unwrap(), std::fs::read(d.join("b").join(&name)).unwrap());
    }
}
