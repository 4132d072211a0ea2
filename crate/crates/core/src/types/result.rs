use serde::{Deserialize, Serialize};

use super::{Action, FormatError, Instruction, Pose, INVARIANT_TAG};

/// Why an episode loop ended.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum Termination {
    Stopped,
    Deviated,
    StepCap,
}

/// Outcome of one episode. Serialized as one JSONL line with this field order.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawResult")]
pub struct EpisodeResult {
    pub episode_id: String,
    pub subtask_count: u32,
    pub predicted_actions: Vec<Action>,
    pub final_pose: Pose,
    pub navigation_error: f64,
    pub success: bool,
    pub termination: Termination,
    pub similarity: Option<f64>,
    pub translated: Option<Instruction>,
    /// Set when the decision policy could not parse a reply and fell back to STOP.
    pub parse_fallback: bool,
}

#[derive(Deserialize)]
struct RawResult {
    episode_id: String,
    subtask_count: u32,
    predicted_actions: Vec<Action>,
    final_pose: Pose,
    navigation_error: f64,
    success: bool,
    termination: Termination,
    similarity: Option<f64>,
    translated: Option<Instruction>,
    parse_fallback: bool,
}

impl TryFrom<RawResult> for EpisodeResult {
    type Error = String;

    fn try_from(r: RawResult) -> Result<Self, Self::Error> {
        let v = EpisodeResult {
            episode_id: r.episode_id,
            subtask_count: r.subtask_count,
            predicted_actions: r.predicted_actions,
            final_pose: r.final_pose,
            navigation_error: r.navigation_error,
            success: r.success,
            termination: r.termination,
            similarity: r.similarity,
            translated: r.translated,
            parse_fallback: r.parse_fallback,
        };
        v.check().map_err(|e| format!("{INVARIANT_TAG}{e}"))?;
        Ok(v)
    }
}

impl EpisodeResult {
    /// Checks the invariants that do not depend on run configuration.
    pub fn check(&self) -> Result<(), String> {
        if self.termination == Termination::Stopped
            && self.predicted_actions.last() != Some(&Action::Stop)
        {
            return Err("termination STOPPED requires a final STOP action".into());
        }
        if self.navigation_error.is_nan() || self.navigation_error < 0.0 {
            return Err("navigation_error must be >= 0".into());
        }
        if let Some(s) = self.similarity {
            if !(0.0..=1.0).contains(&s) {
                return Err("similarity must lie in [0, 1]".into());
            }
        }
        if let Some(t) = &self.translated {
            if !t.is_translated() {
                return Err("translated instruction must have origin TRANSLATED".into());
            }
        }
        Ok(())
    }
}

/// Serializes results as JSONL, one object per line.
pub fn write_results(results: &[EpisodeResult]) -> Vec<u8> {
    let mut out = Vec::new();
    for r in results {
        serde_json::to_writer(&mut out, r).expect("result serialization is infallible");
        out.push(b'\n');
    }
    out
}

/// Parses a JSONL results body. Blank lines and header lines (objects with a
/// top-level `header` key) are skipped.
pub fn parse_results(bytes: &[u8]) -> Result<Vec<EpisodeResult>, FormatError> {
    let text = std::str::from_utf8(bytes).map_err(|e| FormatError::Schema {
        path: ".".into(),
        message: e.to_string(),
    })?;
    let mut out = Vec::new();
    for (n, line) in text.lines().enumerate() {
        if line.trim().is_empty() || is_header_line(line) {
            continue;
        }
        let de = &mut serde_json::Deserializer::from_str(line);
        let r: EpisodeResult = serde_path_to_error::deserialize(de).map_err(|e| {
            match FormatError::from_path_error(e) {
                FormatError::Schema { path, message } => FormatError::Schema {
                    path: format!("line {}: {path}", n + 1),
                    message,
                },
                FormatError::Invariant { invariant, .. } => FormatError::Invariant {
                    context: Some(format!("line {}", n + 1)),
                    invariant,
                },
            }
        })?;
        out.push(r);
    }
    Ok(out)
}

pub(crate) fn is_header_line(line: &str) -> bool {
    line.trim_start().starts_with("{\"header\"")
}
