use std::process::Command;

use otconv_cli::{AllOrdersJson, ReplayJson, RunJson, ScenarioSummary, Tp1Json, Tp2Json};
use serde::de::DeserializeOwned;
use serde::Serialize;

fn otconv(args: &[&str]) -> (i32, String, String) {
    let out = Command::new(env!("CARGO_BIN_EXE_otconv")).args(args).output().unwrap();
    (
        out.status.code().unwrap(),
        String::from_utf8(out.stdout).unwrap(),
        String::from_utf8(out.stderr).unwrap(),
    )
}

fn round_trip<T: Serialize + DeserializeOwned + PartialEq + std::fmt::Debug>(text: &str) -> T {
    let parsed: T = serde_json::from_str(text).unwrap();
    let again: T = serde_json::from_str(&serde_json::to_string(&parsed).unwrap()).unwrap();
    assert_eq!(parsed, again);
    parsed
}

#[test]
fn exit_codes_follow_outcomes() {
    for (name, code) in [("fig1-naive", 1), ("fig2-transformed", 0), ("ressel-tp2", 1), ("scenario-2", 1)] {
        assert_eq!(otconv(&["simulate", name]).0, code, "{name}");
    }
    assert_eq!(otconv(&["check-tp1", "--it", "ressel"]).0, 0);
    assert_eq!(otconv(&["check-tp1", "--it", "sun"]).0, 1);
    assert_eq!(otconv(&["replay-all"]).0, 0);
}

#[test]
fn usage_errors_exit_two() {
    assert_eq!(otconv(&["frobnicate"]).0, 2);
    assert_eq!(otconv(&["check-tp1"]).0, 2);
    assert_eq!(otconv(&["check-tp1", "--it", "nobody"]).0, 2);
    assert_eq!(otconv(&["check-tp1", "--it", "synth:6"]).0, 2);
    assert_eq!(otconv(&["check-tp1", "--it", "sun", "--max-pos", "-1"]).0, 2);
    assert_eq!(otconv(&["check-tp1", "--it", "sun", "--alphabet", "aa"]).0, 2);
    assert_eq!(otconv(&["simulate", "no-such-thing"]).0, 2);
    assert_eq!(otconv(&["simulate"]).0, 2);
    assert_eq!(otconv(&["--help"]).0, 0);
}

#[test]
fn json_reports_round_trip() {
    let (_, out, _) = otconv(&["simulate", "imine-tp2", "--format", "json"]);
    let run: RunJson = round_trip(&out);
    assert_eq!(run.sites.len(), 4);
    assert!(!run.converged);

    let (_, out, _) = otconv(&["simulate", "imine-tp2", "--all-orders", "--format", "json"]);
    let all: AllOrdersJson = round_trip(&out);
    assert!(all.diverging > 0 && all.outcomes.len() > 1);

    let (_, out, _) = otconv(&["check-tp1", "--it", "ellis", "--format", "json"]);
    let tp1: Tp1Json = round_trip(&out);
    assert!(!tp1.holds && tp1.witnesses.len() > 0);

    let (_, out, _) = otconv(&["check-tp2", "--it", "synth:0", "--max-pos", "2", "--format", "json"]);
    let tp2: Tp2Json = round_trip(&out);
    assert_eq!(tp2.function, "synth:0");
    assert!(!tp2.holds);

    let (_, out, _) = otconv(&["scenarios", "--format", "json"]);
    let list: Vec<ScenarioSummary> = round_trip(&out);
    assert_eq!(list.len(), 9);

    let (_, out, _) = otconv(&["replay-all", "--format", "json"]);
    let replay: Vec<ReplayJson> = round_trip(&out);
    assert!(replay.iter().all(|r| r.matches));

    let (_, out, _) = otconv(&["synthesize", "--format", "json"]);
    let v: serde_json::Value = serde_json::from_str(&out).unwrap();
    assert_eq!(v["coherent_strategies"].as_array().unwrap().len(), 6);
}

#[test]
fn exported_scenarios_load_back() {
    let dir = tempfile::tempdir().unwrap();
    for name in ["fig1-naive", "suleiman-tp1", "scenario-1"] {
        let (code, text, _) = otconv(&["scenarios", "--export", name]);
        assert_eq!(code, 0);
        let path = dir.path().join(format!("{name}.json"));
        std::fs::write(&path, &text).unwrap();
        let (by_name, ..) = otconv(&["simulate", name, "--format", "json"]);
        let (by_file, ..) = otconv(&["simulate", "--scenario", path.to_str().unwrap(), "--format", "json"]);
        assert_eq!(by_name, by_file);
        assert_eq!(
            otconv(&["simulate", name, "--format", "json"]).1,
            otconv(&["simulate", path.to_str().unwrap(), "--format", "json"]).1
        );
    }
}

#[test]
fn malformed_file_reports_line() {
    let dir = tempfile::tempdir().unwrap();
    let (_, text, _) = otconv(&["scenarios", "--export", "fig1-naive"]);
    let bad = text.replace("\"ref\": 1", "\"ref\": 7");
    let path = dir.path().join("bad.json");
    std::fs::write(&path, bad).unwrap();
    let (code, _, err) = otconv(&["simulate", path.to_str().unwrap()]);
    assert_eq!(code, 2);
    assert!(err.contains("line"), "{err}");
}
