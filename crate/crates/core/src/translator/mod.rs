//! Instruction translator: prompt composition from the translation
//! principles, the model-backed translate call with its structured-output
//! parser, the offline desk translator and the translation cache.

mod cache;
mod desk;
mod principle;
mod prompt;

pub use cache::{CacheKey, TranslationCache};
pub use desk::{desk_rewrite, desk_translate, DeskRewrite, FiredRule};
pub use principle::{OneShotExample, Principle, PrincipleId, PrincipleSet, PromptAssets};
pub use prompt::{block_names, render_prompt, PromptTemplate, DESCRIPTION_BLOCK, FORMAT_BLOCK};

use thiserror::Error;

use crate::backend::{BackendError, CompletionBackend, CompletionRequest, Decoding};
use crate::types::Instruction;

#[derive(Debug, Error)]
pub enum TranslatorError {
    #[error("translator configuration: {0}")]
    Config(String),
    #[error(transparent)]
    Backend(#[from] BackendError),
    /// The reply never matched the REASONING/TRANSLATION format.
    #[error("translator output did not follow the format after {attempts} attempt(s); raw output: {raw:?}")]
    Parse { raw: String, attempts: u32 },
    #[error("translate expects an ORIGINAL instruction")]
    NotOriginal,
}

/// The pair returned by a translator: explicit reasoning and the rewritten
/// instruction (whose own `reasoning` field carries the same text).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Translation {
    pub reasoning: String,
    pub translated: Instruction,
}

#[derive(Debug, Clone, PartialEq)]
pub struct TranslateOptions {
    pub model_id: String,
    pub decoding: Decoding,
    /// Extra attempts after a reply that fails to parse.
    pub reasks: u32,
}

impl Default for TranslateOptions {
    fn default() -> Self {
        TranslateOptions {
            model_id: "default".into(),
            decoding: Decoding::default(),
            reasks: 1,
        }
    }
}

const REASK_NOTE: &str = "\n\nYour previous reply did not contain the required REASONING: and TRANSLATION: sections. Reply again using exactly that format.";

/// Builds the request for attempt `attempt` (0-based). The first attempt is
/// the rendered prompt followed by the instruction text.
pub fn translation_request(
    instruction: &Instruction,
    template: &PromptTemplate,
    opts: &TranslateOptions,
    attempt: u32,
) -> CompletionRequest {
    let mut user_text = instruction.text().to_string();
    if attempt > 0 {
        user_text.push_str(REASK_NOTE);
    }
    CompletionRequest {
        system_text: template.render(),
        user_text,
        model_id: opts.model_id.clone(),
        decoding: opts.decoding,
    }
}

/// Model-backed translation. The backend is called once per attempt; a reply
/// that does not parse triggers up to `opts.reasks` re-asks before failing.
pub fn translate(
    instruction: &Instruction,
    template: &PromptTemplate,
    backend: &dyn CompletionBackend,
    opts: &TranslateOptions,
) -> Result<Translation, TranslatorError> {
    if instruction.is_translated() {
        return Err(TranslatorError::NotOriginal);
    }
    let mut last_raw = String::new();
    for attempt in 0..=opts.reasks {
        let request = translation_request(instruction, template, opts, attempt);
        let raw = backend.complete(&request)?;
        if let Some((reasoning, text)) = parse_translation_output(&raw) {
            let translated = Instruction::translated(text, reasoning.clone())
                .expect("parser only returns non-empty translations");
            return Ok(Translation {
                reasoning,
                translated,
            });
        }
        log::warn!("translator reply {} did not parse", attempt + 1);
        last_raw = raw;
    }
    Err(TranslatorError::Parse {
        raw: last_raw,
        attempts: opts.reasks + 1,
    })
}

/// Baseline arm: the instruction unchanged, marked as translated with empty
/// reasoning.
pub fn bypass(instruction: &Instruction) -> Instruction {
    Instruction::translated(instruction.text(), "").expect("source instruction is non-empty")
}

fn marker_at(line: &str, marker: &str) -> Option<usize> {
    let trimmed = line.trim_start_matches(|c: char| c.is_whitespace() || c == '*' || c == '#');
    let offset = line.len() - trimmed.len();
    let head = trimmed.get(..marker.len())?;
    if head.eq_ignore_ascii_case(marker) {
        let rest = &trimmed[marker.len()..];
        let skip = rest.len() - rest.trim_start_matches('*').len();
        Some(offset + marker.len() + skip)
    } else {
        None
    }
}

/// Extracts `(reasoning, translation)` from a reply with a line starting
/// `REASONING:` followed later by a line starting `TRANSLATION:`. The last
/// TRANSLATION marker wins, paired with the last REASONING marker before it.
pub fn parse_translation_output(raw: &str) -> Option<(String, String)> {
    let lines: Vec<&str> = raw.lines().collect();
    let t_line = (0..lines.len())
        .rev()
        .find(|&i| marker_at(lines[i], "TRANSLATION:").is_some())?;
    let r_line = (0..t_line)
        .rev()
        .find(|&i| marker_at(lines[i], "REASONING:").is_some())?;

    let r_start = marker_at(lines[r_line], "REASONING:")?;
    let mut reasoning = vec![&lines[r_line][r_start..]];
    reasoning.extend(&lines[r_line + 1..t_line]);
    let t_start = marker_at(lines[t_line], "TRANSLATION:")?;
    let mut translation = vec![&lines[t_line][t_start..]];
    translation.extend(&lines[t_line + 1..]);

    let reasoning = reasoning.join("\n").trim().to_string();
    let translation = translation.join("\n").trim().to_string();
    if translation.is_empty() {
        return None;
    }
    Some((reasoning, translation))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::backend::ScriptedBackend;

    fn template() -> PromptTemplate {
        PromptTemplate::from_assets(&PromptAssets::defaults(), &PrincipleSet::all())
    }

    #[test]
    fn parser_identity_on_well_formed_output() {
        assert_eq!(
            parse_translation_output("REASONING: r\nTRANSLATION: t"),
            Some(("r".into(), "t".into()))
        );
        assert_eq!(
            parse_translation_output("<think>hm</think>\n**Reasoning:** a\nb\n\n**TRANSLATION:** Go.\nStop."),
            Some(("a\nb".into(), "Go.\nStop.".into()))
        );
        assert_eq!(parse_translation_output("TRANSLATION: t"), None);
        assert_eq!(parse_translation_output("REASONING: r\nTRANSLATION:   "), None);
        assert_eq!(parse_translation_output("just prose"), None);
    }

    #[test]
    fn translate_returns_parsed_pair() {
        let backend = ScriptedBackend::new("scripted", ["REASONING: r\nTRANSLATION: t"]);
        let instr = Instruction::original("go ahead").unwrap();
        let t = translate(&instr, &template(), &backend, &TranslateOptions::default()).unwrap();
        assert_eq!(t.reasoning, "r");
        assert_eq!(t.translated.text(), "t");
        assert_eq!(t.translated.reasoning(), Some("r"));
        let calls = backend.calls();
        assert_eq!(calls.len(), 1);
        assert_eq!(calls[0].system_text, template().render());
        assert_eq!(calls[0].user_text, "go ahead");
    }

    #[test]
    fn missing_marker_fails_after_reask() {
        let backend = ScriptedBackend::new("scripted", ["no markers", "still none"]);
        let instr = Instruction::original("go ahead").unwrap();
        match translate(&instr, &template(), &backend, &TranslateOptions::default()) {
            Err(TranslatorError::Parse { raw, attempts }) => {
                assert_eq!(raw, "still none");
                assert_eq!(attempts, 2);
            }
            other => panic!("expected parse error, got {other:?}"),
        }
        let calls = backend.calls();
        assert_eq!(calls.len(), 2);
        assert!(calls[1].user_text.ends_with(REASK_NOTE));
    }

    #[test]
    fn reask_can_recover() {
        let backend = ScriptedBackend::new("scripted", ["oops", "REASONING: x\nTRANSLATION: y"]);
        let instr = Instruction::original("go").unwrap();
        let t = translate(&instr, &template(), &backend, &TranslateOptions::default()).unwrap();
        assert_eq!(t.translated.text(), "y");
    }

    #[test]
    fn empty_template_still_calls_backend() {
        let backend = ScriptedBackend::new("scripted", ["REASONING: none\nTRANSLATION: go"]);
        let t = PromptTemplate::from_assets(&PromptAssets::defaults(), &PrincipleSet::empty());
        let instr = Instruction::original("go").unwrap();
        translate(&instr, &t, &backend, &TranslateOptions::default()).unwrap();
        assert_eq!(backend.calls().len(), 1);
    }

    #[test]
    fn rejects_translated_input() {
        let backend = ScriptedBackend::new("scripted", Vec::<String>::new());
        let instr = Instruction::translated("go", "").unwrap();
        assert!(matches!(
            translate(&instr, &template(), &backend, &TranslateOptions::default()),
            Err(TranslatorError::NotOriginal)
        ));
    }

    #[test]
    fn bypass_is_identity() {
        let out = bypass(&Instruction::original("turn left").unwrap());
        assert_eq!(out.text(), "turn left");
        assert!(out.is_translated());
        assert_eq!(out.reasoning(), Some(""));
    }
}
