use serde::{Deserialize, Serialize};

use super::INVARIANT_TAG;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum InstructionOrigin {
    Original,
    Translated,
}

/// Natural-language navigation instruction.
///
/// Text is never blank, `word_count` is the number of whitespace-delimited
/// tokens, and `reasoning` is present exactly when the instruction is a
/// translation.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "RawInstruction")]
pub struct Instruction {
    text: String,
    word_count: usize,
    origin: InstructionOrigin,
    #[serde(skip_serializing_if = "Option::is_none")]
    reasoning: Option<String>,
}

#[derive(Deserialize)]
struct RawInstruction {
    text: String,
    word_count: usize,
    origin: InstructionOrigin,
    #[serde(default)]
    reasoning: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum InstructionError {
    #[error("instruction text is empty after trimming")]
    Empty,
    #[error("word_count {stated} does not match the {actual} tokens in text")]
    WordCount { stated: usize, actual: usize },
    #[error("reasoning must be present iff the instruction is TRANSLATED")]
    Reasoning,
}

impl TryFrom<RawInstruction> for Instruction {
    type Error = String;

    fn try_from(raw: RawInstruction) -> Result<Self, Self::Error> {
        let check = || -> Result<Instruction, InstructionError> {
            let instr = Instruction::build(raw.text, raw.origin, raw.reasoning)?;
            if instr.word_count != raw.word_count {
                return Err(InstructionError::WordCount {
                    stated: raw.word_count,
                    actual: instr.word_count,
                });
            }
            Ok(instr)
        };
        check().map_err(|e| format!("{INVARIANT_TAG}{e}"))
    }
}

impl Instruction {
    fn build(
        text: String,
        origin: InstructionOrigin,
        reasoning: Option<String>,
    ) -> Result<Self, InstructionError> {
        if text.trim().is_empty() {
            return Err(InstructionError::Empty);
        }
        if (origin == InstructionOrigin::Translated) != reasoning.is_some() {
            return Err(InstructionError::Reasoning);
        }
        let word_count = text.split_whitespace().count();
        Ok(Instruction {
            text,
            word_count,
            origin,
            reasoning,
        })
    }

    pub fn original(text: impl Into<String>) -> Result<Self, InstructionError> {
        Self::build(text.into(), InstructionOrigin::Original, None)
    }

    pub fn translated(
        text: impl Into<String>,
        reasoning: impl Into<String>,
    ) -> Result<Self, InstructionError> {
        Self::build(
            text.into(),
            InstructionOrigin::Translated,
            Some(reasoning.into()),
        )
    }

    pub fn text(&self) -> &str {
        &self.text
    }

    pub fn word_count(&self) -> usize {
        self.word_count
    }

    pub fn origin(&self) -> InstructionOrigin {
        self.origin
    }

    pub fn reasoning(&self) -> Option<&str> {
        self.reasoning.as_deref()
    }

    pub fn is_translated(&self) -> bool {
        self.origin == InstructionOrigin::Translated
    }
}
