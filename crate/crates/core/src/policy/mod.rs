//! Decision policies: the per-step form of the base navigation model.

mod baselines;
mod llm;
mod scripted;

pub use baselines::{FixedPolicy, RandomPolicy};
pub use llm::{parse_action, DecisionPrompt, FrameMode, LlmPolicy, LlmPolicyConfig};
pub use scripted::ScriptedPolicy;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::backend::{sha256_hex, BackendError};
use crate::types::{Action, Instruction, Pose};

/// What the policy sees at decision step `t` (1-based).
#[derive(Debug, Clone, PartialEq)]
pub struct Observation {
    pub t: usize,
    pub frame: String,
    /// Ground-truth pose, only populated when hints are enabled for tests.
    pub pose_hint: Option<Pose>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Decision {
    pub action: Action,
    /// The reply could not be parsed and STOP was substituted.
    pub parse_fallback: bool,
}

impl From<Action> for Decision {
    fn from(action: Action) -> Self {
        Decision {
            action,
            parse_fallback: false,
        }
    }
}

#[derive(Debug, Error)]
pub enum PolicyError {
    #[error(transparent)]
    Backend(#[from] BackendError),
    #[error("policy failed: {0}")]
    Other(String),
}

/// A navigation policy. Instances are per episode and may carry state
/// (RNG, step counters).
pub trait Policy: Send {
    fn id(&self) -> &str;
    fn decide(
        &mut self,
        instruction: &Instruction,
        observation: &Observation,
        history: &[Action],
    ) -> Result<Decision, PolicyError>;
}

/// Serializable policy choice for run configurations.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum PolicySpec {
    Scripted { epsilon: f64 },
    Random,
    Fixed,
    Llm {
        #[serde(default)]
        frame_mode: FrameMode,
    },
}

impl PolicySpec {
    pub fn label(&self) -> String {
        match self {
            PolicySpec::Scripted { epsilon } => format!("Scripted(eps={epsilon})"),
            PolicySpec::Random => "Random".into(),
            PolicySpec::Fixed => "Fixed".into(),
            PolicySpec::Llm { .. } => "LLM".into(),
        }
    }

    pub fn validate(&self) -> Result<(), String> {
        match self {
            PolicySpec::Scripted { epsilon } if !(0.0..=1.0).contains(epsilon) => {
                Err(format!("policy epsilon {epsilon} must lie in [0, 1]"))
            }
            _ => Ok(()),
        }
    }
}

/// Per-episode seed: first eight bytes of SHA-256 over run seed and episode id.
pub fn episode_seed(run_seed: u64, episode_id: &str) -> u64 {
    let hex = sha256_hex(format!("{run_seed}:{episode_id}").as_bytes());
    u64::from_str_radix(&hex[..16], 16).expect("hex digest")
}
