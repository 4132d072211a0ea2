//! Evaluation: navigation error, success, BERTScore F1 and report tables.

mod bertscore;
mod report;

pub use bertscore::{bertscore_f1, instruction_similarity, Embedder, HashEmbedder, MetricError, Prf};
pub use report::{AblationRow, MetricsReport, Split, TableRow, render_ablation_csv, render_ablation_text, render_table_csv, render_table_text};

use crate::env::KinematicsConfig;
use crate::types::{EpisodeResult, Goal, Pose, Termination};

/// Planar Euclidean distance from the final position to the goal.
pub fn navigation_error(final_pose: &Pose, goal: &Goal) -> f64 {
    (final_pose.x - goal.x).hypot(final_pose.y - goal.y)
}

/// Within the success radius and, when required, ended by STOP.
pub fn success(result: &EpisodeResult, config: &KinematicsConfig) -> bool {
    result.navigation_error <= config.success_radius
        && (!config.require_stop_for_success || result.termination == Termination::Stopped)
}

/// Fraction of results that succeed under `config`, recomputing success.
pub fn success_rate(results: &[EpisodeResult], config: &KinematicsConfig) -> f64 {
    if results.is_empty() {
        return 0.0;
    }
    results.iter().filter(|r| success(r, config)).count() as f64 / results.len() as f64
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::types::Action;
    use proptest::prelude::*;

    fn result(ne: f64, termination: Termination) -> EpisodeResult {
        EpisodeResult {
            episode_id: "e".into(),
            subtask_count: 2,
            predicted_actions: vec![Action::Stop],
            final_pose: Pose::origin(),
            navigation_error: ne,
            success: false,
            termination,
            similarity: None,
            translated: None,
            parse_fallback: false,
        }
    }

    #[test]
    fn ne_examples() {
        assert_eq!(navigation_error(&Pose::origin(), &Goal { x: 0.0, y: 0.0 }), 0.0);
        assert_eq!(navigation_error(&Pose::origin(), &Goal { x: 3.0, y: 4.0 }), 5.0);
    }

    #[test]
    fn success_examples() {
        let cfg = KinematicsConfig::default();
        assert!(success(&result(2.28, Termination::Stopped), &cfg));
        assert!(!success(&result(0.0, Termination::StepCap), &cfg));
        assert!(!success(&result(3.01, Termination::Stopped), &cfg));
        assert!(success(&result(3.0, Termination::Stopped), &cfg));
    }

    proptest! {
        #[test]
        fn ne_symmetric_nonnegative(ax in -1e3f64..1e3, ay in -1e3f64..1e3, bx in -1e3f64..1e3, by in -1e3f64..1e3) {
            let d1 = navigation_error(&Pose::new(ax, ay, 0.0), &Goal { x: bx, y: by });
            let d2 = navigation_error(&Pose::new(bx, by, 0.0), &Goal { x: ax, y: ay });
            prop_assert_eq!(d1, d2);
            prop_assert!(d1 >= 0.0);
            prop_assert_eq!(d1 == 0.0, ax == bx && ay == by);
        }
    }
}
