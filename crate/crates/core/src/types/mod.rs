//! Domain types shared across the harness and the episode/result interchange
//! formats.

mod action;
mod episode;
mod instruction;
mod pose;
mod result;

pub use action::{Action, ParseActionError};
pub use episode::{parse_episode_file, write_episode_file, Complexity, Episode, Goal};
pub use instruction::{Instruction, InstructionOrigin};
pub use pose::Pose;
pub use result::{parse_results, write_results, EpisodeResult, Termination};

use thiserror::Error;

#[derive(Debug, Error)]
pub enum FormatError {
    /// The document does not match the schema; `path` points at the field.
    #[error("schema error at `{path}`: {message}")]
    Schema { path: String, message: String },
    /// The document parsed but a domain invariant does not hold.
    #[error("invariant violated{}: {invariant}", .context.as_deref().map(|c| format!(" ({c})")).unwrap_or_default())]
    Invariant {
        context: Option<String>,
        invariant: String,
    },
}

impl FormatError {
    pub(crate) fn invariant(context: impl Into<Option<String>>, invariant: impl Into<String>) -> Self {
        FormatError::Invariant {
            context: context.into(),
            invariant: invariant.into(),
        }
    }

    pub(crate) fn from_path_error(err: serde_path_to_error::Error<serde_json::Error>) -> Self {
        let path = err.path().to_string();
        let inner = err.into_inner();
        // Invariant failures raised inside `TryFrom` conversions surface as
        // custom serde errors tagged with this prefix.
        let message = inner.to_string();
        if let Some(rest) = message.strip_prefix(INVARIANT_TAG) {
            let invariant = rest.split(" at line ").next().unwrap_or(rest).to_string();
            return FormatError::Invariant {
                context: Some(path),
                invariant,
            };
        }
        FormatError::Schema { path, message }
    }
}

pub(crate) const INVARIANT_TAG: &str = "invariant: ";
