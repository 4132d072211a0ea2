use super::{KinematicsConfig, Trajectory};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("deviation check needs at least {needed} predicted poses, got {got}")]
pub struct DeviationError {
    pub needed: usize,
    pub got: usize,
}

/// True iff the agent has been farther than `deviation_distance` from the
/// time-aligned label pose at each of the last τ+1 time steps. Label poses
/// are held at their final value past the end of the label.
pub fn deviation_check(
    predicted: &Trajectory,
    label: &Trajectory,
    config: &KinematicsConfig,
) -> Result<bool, DeviationError> {
    let window = config.deviation_window as usize + 1;
    let poses = predicted.poses();
    if poses.len() < window {
        return Err(DeviationError {
            needed: window,
            got: poses.len(),
        });
    }
    let first = poses.len() - window;
    Ok((first..poses.len())
        .all(|t| poses[t].distance_to(&label.pose_at_clamped(t)) > config.deviation_distance))
}
