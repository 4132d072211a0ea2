use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

/// A low-level navigation action.
///
/// Step size and rotation angle are not part of the action; they come from
/// [`crate::env::KinematicsConfig`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum Action {
    Forward,
    LeftRotate,
    RightRotate,
    Stop,
}

impl Action {
    pub const ALL: [Action; 4] = [
        Action::Forward,
        Action::LeftRotate,
        Action::RightRotate,
        Action::Stop,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            Action::Forward => "FORWARD",
            Action::LeftRotate => "LEFT_ROTATE",
            Action::RightRotate => "RIGHT_ROTATE",
            Action::Stop => "STOP",
        }
    }

    pub fn index(self) -> usize {
        match self {
            Action::Forward => 0,
            Action::LeftRotate => 1,
            Action::RightRotate => 2,
            Action::Stop => 3,
        }
    }
}

impl fmt::Display for Action {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("unknown action `{0}` (expected FORWARD, LEFT_ROTATE, RIGHT_ROTATE or STOP)")]
pub struct ParseActionError(pub String);

impl FromStr for Action {
    type Err = ParseActionError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Action::ALL
            .into_iter()
            .find(|a| a.as_str() == s)
            .ok_or_else(|| ParseActionError(s.to_string()))
    }
}
