use std::collections::HashSet;

use serde::{Deserialize, Serialize};

use super::{Action, FormatError, Instruction, Pose};

/// Goal position. A point, not a region; success is radius based.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Goal {
    pub x: f64,
    pub y: f64,
}

impl Goal {
    pub fn as_pose(&self) -> Pose {
        Pose::new(self.x, self.y, 0.0)
    }
}

/// Episode complexity split. Subtask count 2 is LOW and 3 or more is HIGH;
/// single-subtask episodes are grouped with LOW so the partition is total.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum Complexity {
    Low,
    High,
}

impl Complexity {
    pub fn of(subtask_count: u32) -> Self {
        if subtask_count >= 3 {
            Complexity::High
        } else {
            Complexity::Low
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Episode {
    id: String,
    instruction: Instruction,
    start: Pose,
    goal: Goal,
    label_actions: Vec<Action>,
    subtask_count: u32,
    frames: Vec<String>,
}

impl Episode {
    pub fn new(
        id: impl Into<String>,
        instruction: Instruction,
        start: Pose,
        goal: Goal,
        label_actions: Vec<Action>,
        subtask_count: u32,
        frames: Vec<String>,
    ) -> Result<Self, FormatError> {
        let id = id.into();
        let fail = |what: &str| Err(FormatError::invariant(Some(format!("episode `{id}`")), what));
        if id.is_empty() {
            return fail("id must be non-empty");
        }
        if instruction.is_translated() {
            return fail("episode instruction must be ORIGINAL");
        }
        let stops = label_actions.iter().filter(|a| **a == Action::Stop).count();
        if stops != 1 || label_actions.last() != Some(&Action::Stop) {
            return fail("label_actions must contain exactly one STOP, in final position");
        }
        if subtask_count < 1 {
            return fail("subtask_count must be >= 1");
        }
        if frames.is_empty() {
            return fail("frames must hold at least the initial observation");
        }
        if ![start.x, start.y, goal.x, goal.y].iter().all(|v| v.is_finite()) {
            return fail("start and goal coordinates must be finite");
        }
        Ok(Episode {
            id,
            instruction,
            start,
            goal,
            label_actions,
            subtask_count,
            frames,
        })
    }

    pub fn id(&self) -> &str {
        &self.id
    }

    pub fn instruction(&self) -> &Instruction {
        &self.instruction
    }

    pub fn start(&self) -> Pose {
        self.start
    }

    pub fn goal(&self) -> Goal {
        self.goal
    }

    pub fn label_actions(&self) -> &[Action] {
        &self.label_actions
    }

    pub fn subtask_count(&self) -> u32 {
        self.subtask_count
    }

    pub fn complexity(&self) -> Complexity {
        Complexity::of(self.subtask_count)
    }

    pub fn frames(&self) -> &[String] {
        &self.frames
    }

    /// Frame observed at decision step `t` (1-based); the last frame is held
    /// once the reference list runs out.
    pub fn frame_at(&self, t: usize) -> &str {
        let i = t.saturating_sub(1).min(self.frames.len() - 1);
        &self.frames[i]
    }
}

#[derive(Debug, Serialize, Deserialize)]
struct RawEpisode {
    id: String,
    instruction: String,
    start: Pose,
    goal: Goal,
    label_actions: Vec<Action>,
    subtask_count: u32,
    frames: Vec<String>,
}

/// Top-level episode document, `{"episodes": [...]}`.
#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawEpisodeFile {
    episodes: Vec<RawEpisode>,
}

pub fn parse_episode_file(bytes: &[u8]) -> Result<Vec<Episode>, FormatError> {
    let de = &mut serde_json::Deserializer::from_slice(bytes);
    let raw: RawEpisodeFile =
        serde_path_to_error::deserialize(de).map_err(FormatError::from_path_error)?;
    let mut seen = HashSet::new();
    let mut out = Vec::with_capacity(raw.episodes.len());
    for (i, r) in raw.episodes.into_iter().enumerate() {
        let instruction = Instruction::original(r.instruction).map_err(|e| FormatError::Invariant {
            context: Some(format!("episodes[{i}].instruction")),
            invariant: e.to_string(),
        })?;
        if !seen.insert(r.id.clone()) {
            return Err(FormatError::invariant(
                Some(format!("episodes[{i}].id")),
                format!("duplicate episode id `{}`", r.id),
            ));
        }
        out.push(Episode::new(
            r.id,
            instruction,
            r.start,
            r.goal,
            r.label_actions,
            r.subtask_count,
            r.frames,
        )?);
    }
    Ok(out)
}

pub fn write_episode_file(episodes: &[Episode]) -> Vec<u8> {
    let raw = RawEpisodeFile {
        episodes: episodes
            .iter()
            .map(|e| RawEpisode {
                id: e.id.clone(),
                instruction: e.instruction.text().to_string(),
                start: e.start,
                goal: e.goal,
                label_actions: e.label_actions.clone(),
                subtask_count: e.subtask_count,
                frames: e.frames.clone(),
            })
            .collect(),
    };
    let mut bytes = serde_json::to_vec_pretty(&raw).expect("episode serialization is infallible");
    bytes.push(b'\n');
    bytes
}

#[cfg(test)]
mod tests {
    use super::*;

    const ONE: &str = r#"{"episodes":[{"id":"ep-1","instruction":"go ahead","start":{"x":0,"y":0,"heading":0},
        "goal":{"x":0,"y":1},"label_actions":["FORWARD","FORWARD","STOP"],"subtask_count":2,"frames":["f/0.jpg"]}]}"#;

    #[test]
    fn parses_one_episode() {
        let eps = parse_episode_file(ONE.as_bytes()).unwrap();
        assert_eq!(eps.len(), 1);
        assert_eq!(eps[0].id(), "ep-1");
        assert_eq!(eps[0].complexity(), Complexity::Low);
        let again = parse_episode_file(&write_episode_file(&eps)).unwrap();
        assert_eq!(again, eps);
    }

    #[test]
    fn missing_stop_is_invariant_error() {
        let doc = ONE.replace(r#""FORWARD","FORWARD","STOP""#, r#""FORWARD","FORWARD""#);
        match parse_episode_file(doc.as_bytes()) {
            Err(FormatError::Invariant { invariant, .. }) => assert!(invariant.contains("STOP")),
            other => panic!("expected invariant error, got {other:?}"),
        }
        let doc = ONE.replace(r#""FORWARD","FORWARD","STOP""#, r#""STOP","FORWARD","STOP""#);
        assert!(matches!(
            parse_episode_file(doc.as_bytes()),
            Err(FormatError::Invariant { .. })
        ));
    }

    #[test]
    fn schema_error_carries_path() {
        let doc = ONE.replace(r#""FORWARD","FORWARD""#, r#""FORWARD","JUMP""#);
        match parse_episode_file(doc.as_bytes()) {
            Err(FormatError::Schema { path, .. }) => assert_eq!(path, "episodes[0].label_actions[1]"),
            other => panic!("expected schema error, got {other:?}"),
        }
        let doc = ONE.replace(r#""subtask_count":2"#, r#""subtask_count":"two""#);
        match parse_episode_file(doc.as_bytes()) {
            Err(FormatError::Schema { path, .. }) => assert_eq!(path, "episodes[0].subtask_count"),
            other => panic!("expected schema error, got {other:?}"),
        }
    }

    #[test]
    fn other_invariants() {
        let doc = ONE.replace(r#""frames":["f/0.jpg"]"#, r#""frames":[]"#);
        assert!(matches!(parse_episode_file(doc.as_bytes()), Err(FormatError::Invariant { .. })));
        let doc = ONE.replace(r#""subtask_count":2"#, r#""subtask_count":0"#);
        assert!(matches!(parse_episode_file(doc.as_bytes()), Err(FormatError::Invariant { .. })));
        let doc = ONE.replace(r#""go ahead""#, r#""   ""#);
        assert!(matches!(parse_episode_file(doc.as_bytes()), Err(FormatError::Invariant { .. })));
    }

    #[test]
    fn single_subtask_is_low() {
        assert_eq!(Complexity::of(1), Complexity::Low);
        assert_eq!(Complexity::of(2), Complexity::Low);
        assert_eq!(Complexity::of(3), Complexity::High);
        assert_eq!(Complexity::of(7), Complexity::High);
    }
}
