use std::time::{Duration, Instant};

use thiserror::Error;

use super::{deviation_check, rollout, KinematicsConfig, Trajectory};
use crate::backend::BackendError;
use crate::metrics::{navigation_error, success};
use crate::policy::{Observation, Policy, PolicyError};
use crate::translator::TranslatorError;
use crate::types::{Action, Episode, EpisodeResult, Instruction, Termination};

#[derive(Debug, Error)]
pub enum AbortCause {
    #[error(transparent)]
    Policy(#[from] PolicyError),
    #[error(transparent)]
    Translator(#[from] TranslatorError),
    #[error("episode exceeded its {0:?} wall-clock limit")]
    Timeout(Duration),
    #[error("{0}")]
    Precondition(String),
}

/// An episode that could not finish; carries the partial trajectory.
#[derive(Debug, Error)]
#[error("episode `{episode_id}` aborted after {} decision(s): {cause}", .trajectory.actions().len())]
pub struct EpisodeAborted {
    pub episode_id: String,
    pub cause: AbortCause,
    pub trajectory: Trajectory,
}

impl EpisodeAborted {
    pub fn backend_error(&self) -> Option<&BackendError> {
        match &self.cause {
            AbortCause::Policy(PolicyError::Backend(e)) => Some(e),
            AbortCause::Translator(TranslatorError::Backend(e)) => Some(e),
            _ => None,
        }
    }

    pub fn is_replay_miss(&self) -> bool {
        matches!(self.backend_error(), Some(BackendError::ReplayMiss { .. }))
    }
}

#[derive(Debug, Clone, Copy, Default)]
pub struct LoopOptions {
    pub deadline: Option<(Instant, Duration)>,
    pub pose_hints: bool,
}

/// Runs one episode to termination.
///
/// After each decision the conditions are checked in priority order: STOP,
/// then deviation (only once t ≥ τ+1), then the step cap.
pub fn run_episode_loop(
    episode: &Episode,
    policy: &mut dyn Policy,
    translated: &Instruction,
    config: &KinematicsConfig,
    opts: LoopOptions,
) -> Result<EpisodeResult, EpisodeAborted> {
    let mut trajectory = Trajectory::start(episode.start());
    let abort = |cause: AbortCause, trajectory: Trajectory| EpisodeAborted {
        episode_id: episode.id().to_string(),
        cause,
        trajectory,
    };
    if !translated.is_translated() {
        return Err(abort(
            AbortCause::Precondition("episode loop needs a TRANSLATED instruction".into()),
            trajectory,
        ));
    }
    let label = rollout(episode.start(), episode.label_actions(), config);
    let cap = config.step_cap_for(episode.label_actions().len());
    let window = config.deviation_window as usize + 1;
    let mut parse_fallback = false;

    let termination = 'outer: {
        for t in 1..=cap {
            if let Some((deadline, limit)) = opts.deadline {
                if Instant::now() > deadline {
                    return Err(abort(AbortCause::Timeout(limit), trajectory));
                }
            }
            let observation = Observation {
                t,
                frame: episode.frame_at(t).to_string(),
                pose_hint: opts.pose_hints.then(|| trajectory.last()),
            };
            let decision = match policy.decide(translated, &observation, trajectory.actions()) {
                Ok(d) => d,
                Err(e) => return Err(abort(e.into(), trajectory)),
            };
            parse_fallback |= decision.parse_fallback;
            trajectory.push(decision.action, config);

            if decision.action == Action::Stop {
                break 'outer Termination::Stopped;
            }
            if t >= window
                && deviation_check(&trajectory, &label, config).expect("window length checked")
            {
                break 'outer Termination::Deviated;
            }
        }
        Termination::StepCap
    };

    let final_pose = trajectory.last();
    let mut result = EpisodeResult {
        episode_id: episode.id().to_string(),
        subtask_count: episode.subtask_count(),
        predicted_actions: trajectory.actions().to_vec(),
        final_pose,
        navigation_error: navigation_error(&final_pose, &episode.goal()),
        success: false,
        termination,
        similarity: None,
        translated: None,
        parse_fallback,
    };
    result.success = success(&result, config);
    Ok(result)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::policy::{Decision, FixedPolicy, ScriptedPolicy};
    use crate::types::{Goal, Pose};

    fn episode(label: Vec<Action>) -> Episode {
        let cfg = KinematicsConfig::default();
        let end = rollout(Pose::origin(), &label, &cfg).last();
        Episode::new(
            "ep",
            Instruction::original("go").unwrap(),
            Pose::origin(),
            Goal { x: end.x, y: end.y },
            label,
            2,
            vec!["f0".into()],
        )
        .unwrap()
    }

    fn translated() -> Instruction {
        Instruction::translated("go", "").unwrap()
    }

    struct Closure<F>(F);

    impl<F: FnMut(&Observation, &[Action]) -> Action + Send> Policy for Closure<F> {
        fn id(&self) -> &str {
            "closure"
        }
        fn decide(&mut self, _: &Instruction, o: &Observation, h: &[Action]) -> Result<Decision, PolicyError> {
            Ok((self.0)(o, h).into())
        }
    }

    fn label() -> Vec<Action> {
        let mut l = vec![Action::Forward; 6];
        l.extend([Action::RightRotate, Action::RightRotate, Action::RightRotate]);
        l.extend(vec![Action::Forward; 4]);
        l.push(Action::Stop);
        l
    }

    #[test]
    fn perfect_playback() {
        let ep = episode(label());
        let mut p = ScriptedPolicy::new(label(), 0.0, 1);
        let r = run_episode_loop(&ep, &mut p, &translated(), &KinematicsConfig::default(), LoopOptions::default()).unwrap();
        assert_eq!(r.termination, Termination::Stopped);
        assert_eq!(r.navigation_error, 0.0);
        assert!(r.success);
        assert_eq!(r.predicted_actions, label());
    }

    #[test]
    fn stop_suppressed_hits_step_cap() {
        let ep = episode(label());
        let l = label();
        let mut p = Closure(move |o: &Observation, _: &[Action]| match l.get(o.t - 1) {
            Some(Action::Stop) | None => Action::LeftRotate,
            Some(a) => *a,
        });
        let cfg = KinematicsConfig::default();
        let r = run_episode_loop(&ep, &mut p, &translated(), &cfg, LoopOptions::default()).unwrap();
        assert_eq!(r.termination, Termination::StepCap);
        assert_eq!(r.predicted_actions.len(), 4 * label().len());
        assert!(!r.success, "no STOP means no success by default");
        let lenient = KinematicsConfig { require_stop_for_success: false, ..cfg };
        let r = run_episode_loop(&ep, &mut p, &translated(), &lenient, LoopOptions::default()).unwrap();
        assert!(r.success);
    }

    #[test]
    fn rotating_in_place_deviates_at_predicted_step() {
        let walk: Vec<Action> = vec![Action::Forward; 20].into_iter().chain([Action::Stop]).collect();
        let ep = episode(walk);
        let cfg = KinematicsConfig::default();
        let mut p = Closure(|_: &Observation, _: &[Action]| Action::LeftRotate);
        let r = run_episode_loop(&ep, &mut p, &translated(), &cfg, LoopOptions::default()).unwrap();
        // Oracle: the gap at step t is 0.5 t, above 1.5 from t = 4; the
        // window t-5..=t first lies entirely above at t = 9.
        let far_from = (1..).find(|&t| 0.5 * t as f64 > cfg.deviation_distance).unwrap();
        let expected = far_from + cfg.deviation_window as usize;
        assert_eq!(expected, 9);
        assert_eq!(r.termination, Termination::Deviated);
        assert_eq!(r.predicted_actions.len(), expected);
    }

    #[test]
    fn stop_has_priority_over_deviation() {
        let walk: Vec<Action> = vec![Action::Forward; 20].into_iter().chain([Action::Stop]).collect();
        let ep = episode(walk);
        let mut p = Closure(|o: &Observation, _: &[Action]| if o.t == 9 { Action::Stop } else { Action::LeftRotate });
        let r = run_episode_loop(&ep, &mut p, &translated(), &KinematicsConfig::default(), LoopOptions::default()).unwrap();
        assert_eq!(r.termination, Termination::Stopped);
        assert_eq!(r.predicted_actions.len(), 9);
    }

    #[test]
    fn fixed_policy_overshoot() {
        let n = 6;
        let walk: Vec<Action> = vec![Action::Forward; n].into_iter().chain([Action::Stop]).collect();
        let ep = episode(walk);
        let cfg = KinematicsConfig::default();
        let r = run_episode_loop(&ep, &mut FixedPolicy, &translated(), &cfg, LoopOptions::default()).unwrap();
        assert_ne!(r.termination, Termination::Stopped);
        // Oracle: the label pose is held at y = 3.0; the agent is k steps past
        // it at t = n + k, so the gap exceeds 1.5 from k = 4 and the window
        // closes at k = 4 + τ = 9.
        let extra = 4 + cfg.deviation_window as usize;
        assert_eq!(r.termination, Termination::Deviated);
        assert_eq!(r.predicted_actions.len(), n + extra);
        assert!((r.navigation_error - extra as f64 * cfg.forward_step).abs() < 1e-12);
    }

    #[test]
    fn expired_deadline_aborts() {
        let ep = episode(label());
        let mut p = FixedPolicy;
        let past = Instant::now() - Duration::from_secs(1);
        let opts = LoopOptions {
            deadline: Some((past, Duration::from_secs(120))),
            pose_hints: false,
        };
        let err = run_episode_loop(&ep, &mut p, &translated(), &KinematicsConfig::default(), opts).unwrap_err();
        assert!(matches!(err.cause, AbortCause::Timeout(_)));
    }

    #[test]
    fn policy_error_aborts_with_partial_trajectory() {
        struct Failing(usize);
        impl Policy for Failing {
            fn id(&self) -> &str {
                "failing"
            }
            fn decide(&mut self, _: &Instruction, o: &Observation, _: &[Action]) -> Result<Decision, PolicyError> {
                self.0 += 1;
                if o.t == 3 {
                    Err(PolicyError::Backend(BackendError::Transport("down".into())))
                } else {
                    Ok(Action::Forward.into())
                }
            }
        }
        let ep = episode(label());
        let err = run_episode_loop(&ep, &mut Failing(0), &translated(), &KinematicsConfig::default(), LoopOptions::default())
            .unwrap_err();
        assert_eq!(err.trajectory.actions().len(), 2);
        assert!(err.backend_error().is_some());
        let err = run_episode_loop(&ep, &mut FixedPolicy, &Instruction::original("go").unwrap(), &KinematicsConfig::default(), LoopOptions::default())
            .unwrap_err();
        assert!(matches!(err.cause, AbortCause::Precondition(_)));
    }
}
