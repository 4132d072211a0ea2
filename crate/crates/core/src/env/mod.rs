//! Episode environment: pose kinematics for the four actions, trajectory
//! rollout, deviation judgement and the episode decision loop.

mod deviation;
mod episode_loop;
mod kinematics;

pub use deviation::{deviation_check, DeviationError};
pub use episode_loop::{run_episode_loop, AbortCause, EpisodeAborted, LoopOptions};
pub use kinematics::{rollout, step, KinematicsConfig, Trajectory};
