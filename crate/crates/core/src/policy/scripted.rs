use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::{Decision, Observation, Policy, PolicyError};
use crate::types::{Action, Instruction};

/// Plays back the label actions, replacing each with a uniformly chosen
/// different action with probability ε.
///
/// Per step it draws one `f64` in `[0, 1)`; if that is below ε it draws an
/// index in `0..3` into the other actions (in [`Action::ALL`] order).
pub struct ScriptedPolicy {
    label: Vec<Action>,
    epsilon: f64,
    rng: ChaCha8Rng,
}

impl ScriptedPolicy {
    pub fn new(label: Vec<Action>, epsilon: f64, seed: u64) -> Self {
        assert!(!label.is_empty(), "label actions are non-empty");
        ScriptedPolicy {
            label,
            epsilon,
            rng: ChaCha8Rng::seed_from_u64(seed),
        }
    }

    pub fn action_at(&mut self, t: usize) -> Action {
        let label = self.label[t.saturating_sub(1).min(self.label.len() - 1)];
        let u: f64 = self.rng.random();
        if u < self.epsilon {
            let others: Vec<Action> = Action::ALL.into_iter().filter(|a| *a != label).collect();
            others[self.rng.random_range(0..others.len())]
        } else {
            label
        }
    }
}

impl Policy for ScriptedPolicy {
    fn id(&self) -> &str {
        "scripted"
    }

    fn decide(&mut self, _: &Instruction, obs: &Observation, _: &[Action]) -> Result<Decision, PolicyError> {
        Ok(self.action_at(obs.t).into())
    }
}
