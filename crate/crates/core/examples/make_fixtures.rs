//! Regenerates the files under `fixtures/`:
//!
//! * `synthetic20.json`: `ara generate --n 20 --seed 1`.
//! * `fig1_replay.jsonl`: one translate exchange for the camera-view example.
//! * `benchmark_replay.jsonl`: every exchange of a model-backed benchmark run
//!   (prompted translator plus model policy) over `synthetic20.json`.
//!
//! It also refreshes the prompt golden files under `tests/golden/`.
//!
//! The service is a deterministic local stub: translation replies come from
//! the desk translator, decision replies from a hash of the request.
//!
//! Run with `cargo run -p ara-nav --example make_fixtures`.

use std::path::Path;
use std::sync::Arc;

use ara_nav::backend::{sha256_hex, CompletionRequest, RecordingBackend, ScriptedBackend};
use ara_nav::config::{RunConfig, TranslatorSpec};
use ara_nav::generate::{generate_episodes, GenerateOptions};
use ara_nav::policy::{FrameMode, PolicySpec};
use ara_nav::runner::{run_benchmark, RunContext};
use ara_nav::translator::{desk_translate, translate, PrincipleSet, PromptAssets, PromptTemplate, TranslateOptions};
use ara_nav::types::write_episode_file;
use ara_nav::Instruction;

pub const FIG1_INSTRUCTION: &str =
    "Go ahead\u{2026} em, to that girl in blue shirt. Turn right when you are close enough to her.";

fn stub(request: &CompletionRequest) -> String {
    if request.system_text.starts_with("### DESCRIPTION") {
        let original = Instruction::original(&request.user_text).expect("non-empty instruction");
        let t = desk_translate(&original, &PrincipleSet::all());
        return format!("REASONING: {}\nTRANSLATION: {}", t.reasoning.replace('\n', "; "), t.translated.text());
    }
    let step: usize = request
        .user_text
        .lines()
        .find_map(|l| l.strip_prefix("STEP: "))
        .and_then(|s| s.trim().parse().ok())
        .unwrap_or(1);
    let h = u8::from_str_radix(&sha256_hex(request.user_text.as_bytes())[..2], 16).unwrap();
    let budget = 8 + usize::from(h % 10);
    match (step >= budget, h) {
        (true, _) => "STOP".into(),
        (false, 0..=159) => "FORWARD".into(),
        (false, 160..=189) => "Turning: LEFT_ROTATE".into(),
        (false, 190..=219) => "RIGHT_ROTATE".into(),
        (false, _) => "I would keep going forward.".into(),
    }
}

fn fresh(path: &Path) {
    if path.exists() {
        std::fs::remove_file(path).unwrap();
    }
}

fn main() {
    let dir = Path::new(env!("CARGO_MANIFEST_DIR")).join("fixtures");
    std::fs::create_dir_all(&dir).unwrap();
    let service = || ScriptedBackend::from_fn("stub", |r| Ok(stub(r)));

    let episodes = generate_episodes(&GenerateOptions {
        n: 20,
        seed: 1,
        kinematics: Default::default(),
    });
    std::fs::write(dir.join("synthetic20.json"), write_episode_file(&episodes)).unwrap();

    let golden = Path::new(env!("CARGO_MANIFEST_DIR")).join("tests/golden");
    std::fs::create_dir_all(&golden).unwrap();
    let assets = PromptAssets::defaults();
    for (name, set) in [("full", "all"), ("errors_movement", "ERRORS_REVISION,REPRESENTATIONAL_MOVEMENT"), ("empty", "none")] {
        let text = PromptTemplate::from_assets(&assets, &PrincipleSet::parse(set).unwrap()).render();
        std::fs::write(golden.join(format!("prompt_{name}.txt")), text).unwrap();
    }

    let fig1 = dir.join("fig1_replay.jsonl");
    fresh(&fig1);
    let rec = RecordingBackend::new(service(), &fig1).unwrap();
    let template = PromptTemplate::from_assets(&PromptAssets::defaults(), &PrincipleSet::all());
    let t = translate(
        &Instruction::original(FIG1_INSTRUCTION).unwrap(),
        &template,
        &rec,
        &TranslateOptions::default(),
    )
    .unwrap();
    println!("fig1: {}", t.translated.text());

    let bench = dir.join("benchmark_replay.jsonl");
    fresh(&bench);
    let rec = Arc::new(RecordingBackend::new(service(), &bench).unwrap());
    let config = RunConfig {
        translator: TranslatorSpec::Llm {
            principles: PrincipleSet::all(),
            reasks: 1,
            max_tokens: 1024,
        },
        policy: PolicySpec::Llm {
            frame_mode: FrameMode::Reference,
        },
        parallelism: 1,
        ..RunConfig::default()
    };
    let out = run_benchmark(&episodes, &config, &RunContext::with_backend(rec)).unwrap();
    assert!(out.aborted.is_empty(), "{:?}", out.aborted);
    println!("benchmark: {} results, SR {:.2}, NE {:.2}", out.results.len(), out.reports[2].sr, out.reports[2].ne_mean);
}
