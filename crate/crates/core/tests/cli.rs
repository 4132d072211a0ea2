mod common;

use std::path::Path;
use std::process::{Command, Output};

use common::*;

fn ara(dir: &Path, args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_ara"))
        .args(args)
        .current_dir(dir)
        .env_remove("ARA_LLM_ENDPOINT")
        .env_remove("ARA_LLM_API_KEY")
        .env_remove("ARA_LLM_MODEL")
        .output()
        .unwrap()
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

#[test]
fn translate_desk_drops_filler() {
    let dir = tempfile::tempdir().unwrap();
    let o = ara(dir.path(), &["translate", "--desk", "--principles", "all", "Go ahead, em, to that girl"]);
    assert_eq!(o.status.code(), Some(0));
    let out = stdout(&o);
    let translation = out.split("TRANSLATION:\n").nth(1).unwrap();
    assert!(!translation.contains("em,"), "{out}");
    assert!(out.starts_with("REASONING:\n"));
}

#[test]
fn translate_none_is_identity() {
    let dir = tempfile::tempdir().unwrap();
    let o = ara(dir.path(), &["translate", "--principles", "none", "--json", "x"]);
    assert_eq!(o.status.code(), Some(0));
    let doc: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(doc["translation"], "x");
    assert_eq!(doc["reasoning"], "");
}

#[test]
fn translate_from_replay_record() {
    let dir = tempfile::tempdir().unwrap();
    let rec = fixture("fig1_replay.jsonl");
    let o = ara(dir.path(), &["translate", "--backend", "replay", "--record", rec.to_str().unwrap(), FIG1]);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    assert!(stdout(&o).contains("she occupies all your camera view"));

    // Unrecorded input: replay miss exit code with a diff on stderr.
    let o = ara(dir.path(), &["translate", "--backend", "replay", "--record", rec.to_str().unwrap(), "walk on"]);
    assert_eq!(o.status.code(), Some(4));
    assert!(String::from_utf8_lossy(&o.stderr).contains("user_text: differs at byte 0"));
}

#[test]
fn translate_unparseable_reply_exits_2_and_http_errors_exit_3() {
    let dir = tempfile::tempdir().unwrap();
    // A record whose only answer for this request is prose.
    let rec = dir.path().join("prose.jsonl");
    {
        use ara_nav::backend::{RecordingBackend, ScriptedBackend};
        use ara_nav::translator::{translate, PrincipleSet, PromptAssets, PromptTemplate, TranslateOptions};
        let inner = ScriptedBackend::from_fn("s", |_| Ok("I am not sure.".into()));
        let b = RecordingBackend::new(inner, &rec).unwrap();
        let t = PromptTemplate::from_assets(&PromptAssets::defaults(), &PrincipleSet::all());
        let _ = translate(&ara_nav::Instruction::original("go").unwrap(), &t, &b, &TranslateOptions::default());
    }
    let o = ara(dir.path(), &["translate", "--backend", "replay", "--record", rec.to_str().unwrap(), "go"]);
    assert_eq!(o.status.code(), Some(2), "{}", String::from_utf8_lossy(&o.stderr));

    let o = ara(
        dir.path(),
        &["translate", "--backend", "http", "--set", "backend.endpoint=http://127.0.0.1:9/x", "go"],
    );
    assert_eq!(o.status.code(), Some(3), "{}", String::from_utf8_lossy(&o.stderr));
}

#[test]
fn generate_is_seeded() {
    let dir = tempfile::tempdir().unwrap();
    let a = ara(dir.path(), &["generate", "--n", "20", "--seed", "1"]);
    let b = ara(dir.path(), &["generate", "--n", "20", "--seed", "1"]);
    assert_eq!(a.status.code(), Some(0));
    assert_eq!(a.stdout, b.stdout);
    assert_eq!(a.stdout, std::fs::read(fixture("synthetic20.json")).unwrap());
}

#[test]
fn run_then_report_matches() {
    let dir = tempfile::tempdir().unwrap();
    let eps = fixture("synthetic20.json");
    let o = ara(
        dir.path(),
        &["run", "--episodes", eps.to_str().unwrap(), "--set", "policy.epsilon=0.2", "--set", "seed=7"],
    );
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    let out = stdout(&o);
    let run_dir = out.lines().last().unwrap().strip_prefix("run directory: ").unwrap();
    let run_dir = dir.path().join(run_dir);
    let before = std::fs::read(run_dir.join("report.csv")).unwrap();
    std::fs::remove_file(run_dir.join("report.csv")).unwrap();
    let o = ara(dir.path(), &["report", run_dir.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(std::fs::read(run_dir.join("report.csv")).unwrap(), before);
    assert!(stdout(&o).starts_with("Method"));
}

#[test]
fn ablate_prints_seven_rows() {
    let dir = tempfile::tempdir().unwrap();
    let eps = fixture("synthetic20.json");
    let o = ara(dir.path(), &["ablate", "--episodes", eps.to_str().unwrap(), "--subsets", "singletons,full"]);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    let out = stdout(&o);
    let rows: Vec<&str> = out.lines().skip(1).take_while(|l| !l.starts_with("ablation directory")).collect();
    assert_eq!(rows.len(), 7, "{out}");
    assert!(rows[0].contains("Baseline"));
    assert!(rows[5].contains("+ Representational Movement"));
    assert!(rows[6].contains("All principles"));
}

#[test]
fn show_config_reflects_precedence() {
    let dir = tempfile::tempdir().unwrap();
    std::fs::write(dir.path().join("c.json"), r#"{"seed": 3, "parallelism": 2}"#).unwrap();
    let o = ara(
        dir.path(),
        &["run", "--episodes", "none.json", "--config", "c.json", "--set", "seed=11", "--show-config"],
    );
    assert_eq!(o.status.code(), Some(0));
    let c: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(c["seed"], 11);
    assert_eq!(c["parallelism"], 2);
    assert_eq!(c["kinematics"]["success_radius"], 3.0);
}

#[test]
fn config_and_io_errors_exit_1() {
    let dir = tempfile::tempdir().unwrap();
    let o = ara(dir.path(), &["run", "--episodes", "missing.json"]);
    assert_eq!(o.status.code(), Some(1));
    let o = ara(dir.path(), &["run", "--episodes", "x.json", "--set", "kinematics.nope=1"]);
    assert_eq!(o.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&o.stderr).contains("kinematics"));
    std::fs::write(dir.path().join("bad.json"), r#"{"episodes":[{"id":"a"}]}"#).unwrap();
    let o = ara(dir.path(), &["run", "--episodes", "bad.json"]);
    assert_eq!(o.status.code(), Some(1));
}

#[test]
fn run_with_replay_miss_exits_4() {
    let dir = tempfile::tempdir().unwrap();
    let eps = fixture("synthetic20.json");
    let rec = fixture("fig1_replay.jsonl");
    let o = ara(
        dir.path(),
        &[
            "run",
            "--episodes",
            eps.to_str().unwrap(),
            "--set",
            r#"translator={"kind":"llm","principles":"all"}"#,
            "--set",
            &format!(r#"backend={{"kind":"replay","path":{:?}}}"#, rec.to_str().unwrap()),
        ],
    );
    assert_eq!(o.status.code(), Some(4), "{}", String::from_utf8_lossy(&o.stderr));
}
