use std::path::{Path, PathBuf};
use std::process::Command;

use fwdbuild::format::{BuildSpec, Report, StateFile, TraceLog};
use fwdbuild::scenarios;
use serde_json::Value;

fn specs() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("specs")
}

fn fwdbuild(args: &[&str]) -> (i32, String) {
    let out = Command::new(env!("CARGO_BIN_EXE_fwdbuild"))
        .args(args)
        .env("FWDBUILD_NO_PARALLEL", "1")
        .output()
        .expect("binary runs");
    (
        out.status.code().expect("exit code"),
        String::from_utf8(out.stdout).unwrap(),
    )
}

fn spec(name: &str) -> String {
    specs().join(name).display().to_string()
}

fn report(stdout: &str) -> Report {
    serde_json::from_str(stdout.trim()).expect("one report line")
}

#[test]
fn bundled_files_match_scenarios() {
    let read = |n: &str| std::fs::read_to_string(specs().join(n)).unwrap();
    assert_eq!(
        BuildSpec::from_json(&read("gcc.json")).unwrap(),
        scenarios::gcc()
    );
    assert_eq!(
        BuildSpec::from_json(&read("foo_c.json")).unwrap(),
        scenarios::foo_c()
    );
    assert_eq!(
        BuildSpec::from_json(&read("speculative_bug.json")).unwrap(),
        scenarios::speculative_bug()
    );
    assert_eq!(
        TraceLog::parse(&read("stale_compile.trace.jsonl")).unwrap(),
        scenarios::stale_compile_trace()
    );
    assert_eq!(
        TraceLog::parse(&read("speculative_bug.trace.jsonl")).unwrap(),
        scenarios::speculative_bug_trace()
    );
}

#[test]
fn gcc_runs_clean_then_idempotent() {
    let dir = tempfile::tempdir().unwrap();
    let state = dir.path().join("state.json");
    let st = state.display().to_string();
    let (code, out) = fwdbuild(&[
        "run",
        &spec("gcc.json"),
        "--engine",
        "rattle",
        "--state",
        &st,
    ]);
    assert_eq!(code, 0, "{out}");
    let first = report(&out);
    assert_eq!(first.executed.len(), 4);
    let (code, out) = fwdbuild(&[
        "run",
        &spec("gcc.json"),
        "--engine",
        "rattle",
        "--state",
        &st,
    ]);
    assert_eq!(code, 0);
    let second = report(&out);
    assert!(second.executed.is_empty());
    assert_eq!(second.skipped.len(), 4);
    assert_eq!(second.fs_digest, first.fs_digest);
}

#[test]
fn foo_c_is_a_read_write_hazard_and_state_untouched() {
    let dir = tempfile::tempdir().unwrap();
    let state = dir.path().join("state.json");
    let (code, out) = fwdbuild(&[
        "run",
        &spec("foo_c.json"),
        "--state",
        &state.display().to_string(),
    ]);
    assert_eq!(code, 2);
    let r = report(&out);
    assert_eq!(r.hazard.unwrap().kind, "read-write");
    assert!(!state.exists());
}

#[test]
fn duplicate_script_is_a_violation() {
    let dir = tempfile::tempdir().unwrap();
    let mut v: Value = serde_json::from_str(&scenarios::gcc().to_json().unwrap()).unwrap();
    v["script"] = serde_json::json!(["gcc -c file.c", "gcc -c file.c"]);
    let path = dir.path().join("dup.json");
    std::fs::write(&path, v.to_string()).unwrap();
    let (code, out) = fwdbuild(&["run", &path.display().to_string()]);
    assert_eq!(code, 3);
    assert_eq!(report(&out).violation.unwrap().kind, "duplicate");
}

#[test]
fn malformed_inputs_exit_one() {
    let dir = tempfile::tempdir().unwrap();
    let bad = dir.path().join("bad.json");
    std::fs::write(&bad, "{ not json").unwrap();
    let bad = bad.display().to_string();
    assert_eq!(fwdbuild(&["run", &bad]).0, 1);
    assert_eq!(fwdbuild(&["check-trace", &bad]).0, 1);
    assert_eq!(fwdbuild(&["explore", &bad]).0, 1);
    assert_eq!(fwdbuild(&["run", "/nonexistent/spec.json"]).0, 1);
    assert_eq!(
        fwdbuild(&["run", &spec("gcc.json"), "--engine", "make"]).0,
        1
    );
    assert_eq!(fwdbuild(&["frobnicate"]).0, 1);
}

#[test]
fn state_from_other_engine_rejected() {
    let dir = tempfile::tempdir().unwrap();
    let st = dir.path().join("state.json").display().to_string();
    let gcc = spec("gcc.json");
    assert_eq!(
        fwdbuild(&["run", &gcc, "--engine", "fabricate", "--state", &st]).0,
        0
    );
    let saved = std::fs::read_to_string(&st).unwrap();
    assert_eq!(
        fwdbuild(&["run", &gcc, "--engine", "rattle", "--state", &st]).0,
        1
    );
    assert_eq!(std::fs::read_to_string(&st).unwrap(), saved);
    let (code, out) = fwdbuild(&["run", &gcc, "--engine", "fabricate", "--state", &st]);
    assert_eq!(code, 0);
    assert!(report(&out).executed.is_empty());
    assert!(StateFile::from_json(&saved).is_ok());
}

#[test]
fn script_engine_matches_rattle_digest() {
    let gcc = spec("gcc.json");
    let (_, a) = fwdbuild(&["run", &gcc, "--engine", "script"]);
    let (_, b) = fwdbuild(&["run", &gcc, "--engine", "rattle-unchecked"]);
    assert_eq!(report(&a).fs_digest, report(&b).fs_digest);
}

#[test]
fn bug_regression_via_run() {
    let bug = spec("speculative_bug.json");
    let (code, out) = fwdbuild(&["run", &bug, "--required-mode", "ever"]);
    assert_eq!(code, 2);
    let h = report(&out).hazard.unwrap();
    assert_eq!(h.kind, "speculative");
    assert_eq!(h.commands, vec!["c".into(), "b".into()]);
    assert_eq!(h.file, "f".into());
    let (code, out) = fwdbuild(&["run", &bug, "--required-mode", "prefix"]);
    assert_eq!(code, 0, "{out}");
}

#[test]
fn check_trace_examples() {
    let (code, out) = fwdbuild(&["check-trace", &spec("stale_compile.trace.jsonl")]);
    assert_eq!(code, 2);
    assert_eq!(report(&out).hazard.unwrap().kind, "speculative");

    let bug = spec("speculative_bug.trace.jsonl");
    assert_eq!(
        fwdbuild(&["check-trace", &bug, "--required-mode", "prefix"]).0,
        0
    );
    assert_eq!(
        fwdbuild(&["check-trace", &bug, "--required-mode", "ever"]).0,
        2
    );

    let dir = tempfile::tempdir().unwrap();
    let empty = dir.path().join("empty.jsonl");
    std::fs::write(&empty, "{\"scriptOrder\":[]}\n").unwrap();
    assert_eq!(
        fwdbuild(&["check-trace", &empty.display().to_string()]).0,
        0
    );
}

fn explore_lines(path: &str) -> (i32, Vec<Value>) {
    let (code, out) = fwdbuild(&["explore", path]);
    (
        code,
        out.lines()
            .map(|l| serde_json::from_str(l).unwrap())
            .collect(),
    )
}

#[test]
fn explore_gcc() {
    let (code, lines) = explore_lines(&spec("gcc.json"));
    assert_eq!(code, 0);
    assert_eq!(lines.len(), 25);
    let summary = &lines[24]["summary"];
    assert_eq!(summary["permutations"], 24);
    assert_eq!(summary["trichotomy"], true);
    let link = "gcc -o program file.o string.o print.o";
    let mut digests = std::collections::BTreeSet::new();
    for l in &lines[..24] {
        let run = l["run"].as_array().unwrap();
        let link_last = run.last().unwrap() == link;
        // the link reads every object, so any compile after it rewrites one
        assert_eq!(l["result"] == "ok", link_last, "{l}");
        if link_last {
            digests.insert(l["fsDigest"].as_str().unwrap().to_owned());
        }
    }
    assert_eq!(digests.len(), 1);
}

#[test]
fn explore_small_and_large() {
    let dir = tempfile::tempdir().unwrap();
    let one = dir.path().join("one.json");
    std::fs::write(
        &one,
        scenarios::restrict(&scenarios::gcc(), &["gcc -c file.c"])
            .to_json()
            .unwrap(),
    )
    .unwrap();
    let (code, lines) = explore_lines(&one.display().to_string());
    assert_eq!((code, lines.len()), (0, 2));
    assert_eq!(lines[0]["result"], "ok");

    let (code, lines) = explore_lines(&spec("foo_c.json"));
    assert_eq!(code, 0);
    assert!(lines[..2].iter().all(|l| l["result"] == "hazard"));

    let mut v: Value = serde_json::from_str(&scenarios::gcc().to_json().unwrap()).unwrap();
    let cmds: Vec<Value> = (0..7)
        .map(|i| serde_json::json!({"id": format!("c{i}"), "program": []}))
        .collect();
    v["commands"] = Value::Array(cmds);
    v["script"] = (0..7).map(|i| format!("c{i}")).collect();
    let big = dir.path().join("big.json");
    std::fs::write(&big, v.to_string()).unwrap();
    let (code, lines) = explore_lines(&big.display().to_string());
    assert_eq!(code, 3);
    assert_eq!(lines[0]["violation"]["kind"], "build-too-large");
}

#[test]
fn verify_lines_and_only() {
    let (code, out) = fwdbuild(&["verify", "--cases", "1", "--seed", "7"]);
    assert_eq!(code, 0);
    assert_eq!(out.lines().count(), 8);
    let (_, again) = fwdbuild(&["verify", "--cases", "1", "--seed", "7"]);
    assert_eq!(out, again);
    let (code, out) = fwdbuild(&["verify", "--cases", "5", "--only", "soundness"]);
    assert_eq!(code, 0);
    let v: Value = serde_json::from_str(out.trim()).unwrap();
    assert_eq!(v["theorem"], "soundness");
    assert_eq!(fwdbuild(&["verify", "--only", "no-such-lemma"]).0, 1);
    assert_eq!(fwdbuild(&["verify", "--max-build", "9"]).0, 1);
}

#[test]
fn reports_are_byte_identical() {
    let gcc = spec("gcc.json");
    assert_eq!(fwdbuild(&["explore", &gcc]), fwdbuild(&["explore", &gcc]));
    assert_eq!(fwdbuild(&["run", &gcc]), fwdbuild(&["run", &gcc]));
}
