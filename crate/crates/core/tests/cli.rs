use std::io::{BufRead, BufReader};
use std::path::Path;
use std::process::{Command, Output, Stdio};

use pirpsi::analysis::{rate_table, render_rate_table};
use pirpsi::storage::{load_code, load_messages};

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_pirpsi"))
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().unwrap()
}

fn p(dir: &Path, name: &str) -> String {
    dir.join(name).to_str().unwrap().to_string()
}

#[test]
fn build_answer_decode_round_trip() {
    let d = tempfile::tempdir().unwrap();
    let (code, msgs, si) = (p(d.path(), "code.json"), p(d.path(), "m.bin"), p(d.path(), "si.bin"));
    assert!(run(&["build", "--k", "5", "--demand", "4", "--si", "1,5", "--out", &code]).status.success());
    assert!(run(&["messages", "--k", "5", "--seed", "3", "--out", &msgs, "--si", "1,5", "--si-out", &si]).status.success());
    let (a1, a2, out) = (p(d.path(), "a1"), p(d.path(), "a2"), p(d.path(), "demand.bin"));
    assert!(run(&["answer", "--db", "n1", "--code", &code, "--messages", &msgs, "--out", &a1]).status.success());
    assert!(run(&["answer", "--db", "n2", "--code", &code, "--messages", &msgs, "--out", &a2]).status.success());
    let o = run(&["decode", "--code", &code, "--answers", &format!("{a1},{a2}"), "--si-bits", &si, "--out", &out]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let store = load_messages(Path::new(&msgs)).unwrap();
    let got = load_messages(Path::new(&out)).unwrap();
    assert_eq!(got.row(1), store.row(4));
}

#[test]
fn seeded_build_is_reproducible_and_decodable() {
    let d = tempfile::tempdir().unwrap();
    let (c1, c2, c3) = (p(d.path(), "1"), p(d.path(), "2"), p(d.path(), "3"));
    for c in [&c1, &c2] {
        assert!(run(&["build", "--k", "6", "--seed", "42", "--out", c]).status.success());
    }
    assert!(run(&["build", "--k", "6", "--out", &c3]).status.success());
    let (a, b, plain) =
        (load_code(Path::new(&c1)).unwrap(), load_code(Path::new(&c2)).unwrap(), load_code(Path::new(&c3)).unwrap());
    assert_eq!(a, b);
    assert_ne!(a, plain);
    assert!(pirpsi::retrieve::decodability_oracle(&a).decodable);
}

#[test]
fn rates_text_matches_library() {
    let o = run(&["rates", "--k-min", "7", "--k-max", "7"]);
    assert!(o.status.success());
    let text = String::from_utf8(o.stdout).unwrap();
    assert_eq!(text, render_rate_table(&rate_table(7, 7)));
    for r in ["32/63", "64/127", "16/31"] {
        assert!(text.contains(r));
    }
    let j = run(&["--format", "json", "rates", "--k-min", "3", "--k-max", "4"]);
    let v: serde_json::Value = serde_json::from_slice(&j.stdout).unwrap();
    assert_eq!(v[1]["rate_this_scheme"], "4/7");
}

#[test]
fn build_then_audit_k4() {
    let d = tempfile::tempdir().unwrap();
    assert!(run(&["build", "--k", "4", "--out", &p(d.path(), "c")]).status.success());
    let o = run(&["audit", "--k", "4"]);
    assert!(o.status.success());
    assert!(String::from_utf8(o.stdout).unwrap().starts_with("K=4 method=cases passed 12/12"));
    let o = run(&["--format", "json", "audit", "--k", "4", "--oracle"]);
    let v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(v["entries"].as_array().unwrap().len(), 12);
}

#[test]
fn exit_codes() {
    assert_eq!(run(&["build", "--k", "2", "--out", "x"]).status.code(), Some(2));
    assert_eq!(run(&["build", "--k", "4", "--demand", "1", "--si", "1,2", "--out", "x"]).status.code(), Some(2));
    assert_eq!(run(&["audit", "--k", "6", "--oracle"]).status.code(), Some(2));
    assert_eq!(run(&["cost", "--code", "/nonexistent/code.json"]).status.code(), Some(1));
    let d = tempfile::tempdir().unwrap();
    assert_eq!(run(&["build", "--k", "8", "--demand", "8", "--si", "1,2", "--out", &p(d.path(), "c")]).status.code(), Some(1));
}

#[test]
fn serve_and_fetch_over_tcp() {
    let d = tempfile::tempdir().unwrap();
    let (msgs, si) = (p(d.path(), "m.bin"), p(d.path(), "si.bin"));
    assert!(run(&["messages", "--k", "4", "--seed", "9", "--out", &msgs, "--si", "2,4", "--si-out", &si]).status.success());
    let mut servers = Vec::new();
    let mut addrs = Vec::new();
    for _ in 0..2 {
        let mut child =
            bin().args(["serve", "--messages", &msgs, "--endpoint", "127.0.0.1:0"]).stderr(Stdio::piped()).spawn().unwrap();
        let mut line = String::new();
        BufReader::new(child.stderr.take().unwrap()).read_line(&mut line).unwrap();
        addrs.push(line.trim().strip_prefix("serving on ").unwrap().to_string());
        servers.push(child);
    }
    let out = p(d.path(), "demand.bin");
    let o = run(&[
        "fetch",
        "--endpoints",
        &addrs.join(","),
        "--k",
        "4",
        "--demand",
        "3",
        "--si",
        "2,4",
        "--si-bits",
        &si,
        "--out",
        &out,
    ]);
    for mut s in servers {
        s.kill().unwrap();
        s.wait().unwrap();
    }
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    assert!(String::from_utf8(o.stdout).unwrap().contains("from 14 downloaded"));
    let store = load_messages(Path::new(&msgs)).unwrap();
    assert_eq!(load_messages(Path::new(&out)).unwrap().row(1), store.row(3));
}
