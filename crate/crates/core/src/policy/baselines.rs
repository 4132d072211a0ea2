use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::{Decision, Observation, Policy, PolicyError};
use crate::types::{Action, Instruction};

/// Uniform over the four actions, reproducible per seed.
pub struct RandomPolicy {
    rng: ChaCha8Rng,
}

impl RandomPolicy {
    pub fn new(seed: u64) -> Self {
        RandomPolicy {
            rng: ChaCha8Rng::seed_from_u64(seed),
        }
    }

    pub fn next_action(&mut self) -> Action {
        Action::ALL[self.rng.random_range(0..Action::ALL.len())]
    }
}

impl Policy for RandomPolicy {
    fn id(&self) -> &str {
        "random"
    }

    fn decide(&mut self, _: &Instruction, _: &Observation, _: &[Action]) -> Result<Decision, PolicyError> {
        Ok(self.next_action().into())
    }
}

/// Always FORWARD; never stops on its own.
#[derive(Debug, Default, Clone, Copy)]
pub struct FixedPolicy;

impl Policy for FixedPolicy {
    fn id(&self) -> &str {
        "fixed"
    }

    fn decide(&mut self, _: &Instruction, _: &Observation, _: &[Action]) -> Result<Decision, PolicyError> {
        Ok(Action::Forward.into())
    }
}
