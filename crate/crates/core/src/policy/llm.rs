use std::path::Path;
use std::sync::{Arc, OnceLock};

use regex::Regex;
use serde::{Deserialize, Serialize};

use super::{Decision, Observation, Policy, PolicyError};
use crate::backend::{CompletionBackend, CompletionRequest, Decoding};
use crate::types::{Action, Instruction};

/// How frames reach a text-only backend.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FrameMode {
    /// The opaque frame reference itself.
    #[default]
    Reference,
    /// Contents of a `<frame>.txt` caption sidecar, when present.
    Caption,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DecisionPrompt {
    pub system: String,
    pub user: String,
}

#[derive(Deserialize)]
struct RawDecisionPrompt {
    system: String,
    user: String,
}

const DEFAULT_DECISION_PROMPT: &str = include_str!("../../assets/decision_prompt.toml");

impl DecisionPrompt {
    pub fn defaults() -> Self {
        Self::from_toml(DEFAULT_DECISION_PROMPT).expect("bundled decision prompt is valid")
    }

    pub fn from_toml(text: &str) -> Result<Self, String> {
        let raw: RawDecisionPrompt = toml::from_str(text).map_err(|e| e.to_string())?;
        Ok(DecisionPrompt {
            system: raw.system,
            user: raw.user,
        })
    }

    pub fn render(&self, instruction: &str, step: usize, history: &[Action], observation: &str) -> String {
        let history = if history.is_empty() {
            "none".to_string()
        } else {
            history.iter().map(|a| a.as_str()).collect::<Vec<_>>().join(", ")
        };
        self.user
            .replace("{instruction}", instruction)
            .replace("{step}", &step.to_string())
            .replace("{history}", &history)
            .replace("{observation}", observation)
    }
}

#[derive(Clone)]
pub struct LlmPolicyConfig {
    pub model_id: String,
    pub decoding: Decoding,
    pub prompt: DecisionPrompt,
    pub frame_mode: FrameMode,
}

impl Default for LlmPolicyConfig {
    fn default() -> Self {
        LlmPolicyConfig {
            model_id: "default".into(),
            decoding: Decoding {
                temperature: 0.0,
                max_tokens: 64,
            },
            prompt: DecisionPrompt::defaults(),
            frame_mode: FrameMode::Reference,
        }
    }
}

const REASK_NOTE: &str = "\n\nReply with exactly one of: FORWARD, LEFT_ROTATE, RIGHT_ROTATE, STOP.";

/// Single-prompt stand-in for the base navigation model: one completion per
/// step, one re-ask on an unparseable reply, then STOP with a fallback flag.
pub struct LlmPolicy {
    backend: Arc<dyn CompletionBackend>,
    config: LlmPolicyConfig,
}

impl LlmPolicy {
    pub fn new(backend: Arc<dyn CompletionBackend>, config: LlmPolicyConfig) -> Self {
        LlmPolicy { backend, config }
    }

    fn observation_text(&self, frame: &str) -> String {
        match self.config.frame_mode {
            FrameMode::Reference => format!("frame {frame}"),
            FrameMode::Caption => {
                let sidecar = format!("{frame}.txt");
                match std::fs::read_to_string(Path::new(&sidecar)) {
                    Ok(c) => c.trim().to_string(),
                    Err(_) => format!("frame {frame} (no caption)"),
                }
            }
        }
    }

    pub fn request(
        &self,
        instruction: &Instruction,
        observation: &Observation,
        history: &[Action],
        reask: bool,
    ) -> CompletionRequest {
        let mut user_text = self.config.prompt.render(
            instruction.text(),
            observation.t,
            history,
            &self.observation_text(&observation.frame),
        );
        if reask {
            user_text.push_str(REASK_NOTE);
        }
        CompletionRequest {
            system_text: self.config.prompt.system.clone(),
            user_text,
            model_id: self.config.model_id.clone(),
            decoding: self.config.decoding,
        }
    }
}

impl Policy for LlmPolicy {
    fn id(&self) -> &str {
        "llm"
    }

    fn decide(
        &mut self,
        instruction: &Instruction,
        observation: &Observation,
        history: &[Action],
    ) -> Result<Decision, PolicyError> {
        for reask in [false, true] {
            let reply = self
                .backend
                .complete(&self.request(instruction, observation, history, reask))?;
            if let Some(action) = parse_action(&reply) {
                return Ok(action.into());
            }
        }
        log::warn!("step {}: no action token in two replies, stopping", observation.t);
        Ok(Decision {
            action: Action::Stop,
            parse_fallback: true,
        })
    }
}

/// First canonical action token in `reply`, case-insensitive. The
/// space-separated forms `LEFT ROTATE` / `RIGHT ROTATE` are accepted too.
pub fn parse_action(reply: &str) -> Option<Action> {
    static RE: OnceLock<Regex> = OnceLock::new();
    let re = RE.get_or_init(|| {
        Regex::new(r"(?i)\b(FORWARD|LEFT[_ ]ROTATE|RIGHT[_ ]ROTATE|STOP)\b").expect("valid regex")
    });
    let m = re.find(reply)?;
    let token = m.as_str().to_ascii_uppercase().replace(' ', "_");
    token.parse().ok()
}
