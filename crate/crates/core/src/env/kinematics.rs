use serde::{Deserialize, Serialize};

use crate::types::{Action, Pose};

/// Motion, success and termination constants. Every default here is this
/// harness's own choice and is logged with each run.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct KinematicsConfig {
    /// Meters per FORWARD.
    pub forward_step: f64,
    /// Degrees per rotation, in (0, 180].
    pub rotate_angle: f64,
    pub success_radius: f64,
    pub deviation_distance: f64,
    /// Deviation window τ; deviation needs τ+1 consecutive far steps.
    pub deviation_window: u32,
    /// Decision cap. `None` means four times the label length.
    pub step_cap: Option<u32>,
    pub require_stop_for_success: bool,
}

impl Default for KinematicsConfig {
    fn default() -> Self {
        KinematicsConfig {
            forward_step: 0.5,
            rotate_angle: 30.0,
            success_radius: 3.0,
            deviation_distance: 1.5,
            deviation_window: 5,
            step_cap: None,
            require_stop_for_success: true,
        }
    }
}

impl KinematicsConfig {
    pub fn validate(&self) -> Result<(), String> {
        let pos = |v: f64| v.is_finite() && v > 0.0;
        if !pos(self.forward_step) {
            return Err("kinematics.forward_step must be > 0".into());
        }
        if !(pos(self.rotate_angle) && self.rotate_angle <= 180.0) {
            return Err("kinematics.rotate_angle must lie in (0, 180]".into());
        }
        if !pos(self.success_radius) {
            return Err("kinematics.success_radius must be > 0".into());
        }
        if !pos(self.deviation_distance) {
            return Err("kinematics.deviation_distance must be > 0".into());
        }
        if self.deviation_window < 1 {
            return Err("kinematics.deviation_window must be >= 1".into());
        }
        if self.step_cap == Some(0) {
            return Err("kinematics.step_cap must be >= 1".into());
        }
        Ok(())
    }

    pub fn step_cap_for(&self, label_len: usize) -> usize {
        match self.step_cap {
            Some(n) => n as usize,
            None => (4 * label_len).max(1),
        }
    }
}

/// Unit displacement for a heading (0° = +y, clockwise). Axis-aligned
/// headings are exact.
fn heading_unit(heading: f64) -> (f64, f64) {
    match heading {
        0.0 => (0.0, 1.0),
        90.0 => (1.0, 0.0),
        180.0 => (0.0, -1.0),
        270.0 => (-1.0, 0.0),
        h => {
            let (s, c) = h.to_radians().sin_cos();
            (s, c)
        }
    }
}

pub fn step(pose: Pose, action: Action, config: &KinematicsConfig) -> Pose {
    match action {
        Action::Forward => {
            let (dx, dy) = heading_unit(pose.heading());
            Pose::new(
                pose.x + config.forward_step * dx,
                pose.y + config.forward_step * dy,
                pose.heading(),
            )
        }
        Action::LeftRotate => pose.with_heading(pose.heading() - config.rotate_angle),
        Action::RightRotate => pose.with_heading(pose.heading() + config.rotate_angle),
        Action::Stop => pose,
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Trajectory {
    poses: Vec<Pose>,
    actions: Vec<Action>,
}

impl Trajectory {
    pub fn start(pose: Pose) -> Self {
        Trajectory {
            poses: vec![pose],
            actions: Vec::new(),
        }
    }

    #[cfg(test)]
    pub(crate) fn from_parts(poses: Vec<Pose>, actions: Vec<Action>) -> Self {
        assert_eq!(poses.len(), actions.len() + 1);
        Trajectory { poses, actions }
    }

    pub fn push(&mut self, action: Action, config: &KinematicsConfig) -> Pose {
        let next = step(self.last(), action, config);
        self.actions.push(action);
        self.poses.push(next);
        next
    }

    pub fn poses(&self) -> &[Pose] {
        &self.poses
    }

    pub fn actions(&self) -> &[Action] {
        &self.actions
    }

    pub fn last(&self) -> Pose {
        *self.poses.last().expect("trajectory has a start pose")
    }

    /// Label pose aligned with time step `t`, holding the final pose once the
    /// trajectory runs out.
    pub fn pose_at_clamped(&self, t: usize) -> Pose {
        self.poses[t.min(self.poses.len() - 1)]
    }
}

pub fn rollout(start: Pose, actions: &[Action], config: &KinematicsConfig) -> Trajectory {
    let mut t = Trajectory::start(start);
    for a in actions {
        t.push(*a, config);
    }
    t
}
