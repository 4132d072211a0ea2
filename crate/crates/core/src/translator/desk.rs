//! Deterministic rule-based translator used when no model service is
//! available. Each principle maps to a fixed family of token rewrites; the
//! families touch disjoint token classes so they compose without undoing
//! each other.

use crate::tokenize::{detokenize, tokenize, Token, TokenKind};
use crate::types::Instruction;

use super::{PrincipleId, PrincipleSet, Translation};

/// A single rewrite that fired, for the reasoning trace.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FiredRule {
    pub principle: PrincipleId,
    pub detail: String,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DeskRewrite {
    pub text: String,
    pub fired: Vec<FiredRule>,
}

impl DeskRewrite {
    pub fn reasoning(&self) -> String {
        if self.fired.is_empty() {
            return "no rewrite rule fired".into();
        }
        self.fired
            .iter()
            .map(|f| format!("{}: {}", f.principle, f.detail))
            .collect::<Vec<_>>()
            .join("\n")
    }
}

const FILLERS: &[&str] = &[
    "em", "emm", "emmm", "uh", "uhh", "um", "umm", "er", "erm", "ah", "ahh", "hmm", "hm", "eh",
];
const COMMA_FILLERS: &[&str] = &["well", "so", "okay", "ok", "like", "alright", "right"];
const PHRASE_FILLERS: &[&str] = &["you know", "i mean", "kind of", "sort of", "i think", "i guess"];

const SPELLING: &[(&str, &str)] = &[
    ("rigth", "right"),
    ("rihgt", "right"),
    ("rght", "right"),
    ("lef", "left"),
    ("letf", "left"),
    ("lfet", "left"),
    ("foward", "forward"),
    ("forwad", "forward"),
    ("fowrard", "forward"),
    ("stright", "straight"),
    ("straigt", "straight"),
    ("strait", "straight"),
    ("trun", "turn"),
    ("tunr", "turn"),
    ("ahaed", "ahead"),
    ("ahed", "ahead"),
    ("untill", "until"),
    ("unitl", "until"),
    ("wich", "which"),
    ("wiht", "with"),
    ("teh", "the"),
    ("hte", "the"),
    ("adn", "and"),
    ("clsoe", "close"),
    ("tomatos", "tomatoes"),
    ("tomatoe", "tomato"),
    ("strawbery", "strawberry"),
    ("strawberrys", "strawberries"),
    ("greenhose", "greenhouse"),
    ("grenhouse", "greenhouse"),
    ("vegatable", "vegetable"),
    ("vegetabel", "vegetable"),
    ("lettuse", "lettuce"),
    ("cabage", "cabbage"),
    ("pepers", "peppers"),
    ("plnats", "plants"),
    ("palnts", "plants"),
    ("wokrer", "worker"),
    ("stpo", "stop"),
    ("sotp", "stop"),
    ("arround", "around"),
    ("aroud", "around"),
];

const SENTENCE_END: &[&str] = &[".", "!", "?", ";"];
const PRONOUN_SUBJECTS: &[(&str, &str)] = &[("her", "she"), ("him", "he"), ("it", "it"), ("them", "they")];
const DETERMINERS: &[&str] = &["the", "that", "this", "those", "these", "a", "an", "your"];
const PHRASE_BOUNDARY: &[&str] = &[
    "and", "then", "when", "until", "once", "before", "after", "turn", "stop", "rotate", "go",
];

/// Rewrites `text` with the rule families of `principles`, applied in
/// canonical principle order. With no rule firing the input is returned
/// verbatim.
pub fn desk_rewrite(text: &str, principles: &PrincipleSet) -> DeskRewrite {
    let mut fired = Vec::new();
    let mut segments = vec![tokenize(text)];
    let mut separated = false;
    for id in principles.canonical() {
        let mut notes = Vec::new();
        match id {
            PrincipleId::InessentialRemoval => {
                segments.iter_mut().for_each(|s| remove_inessential(s, &mut notes))
            }
            PrincipleId::ErrorsRevision => {
                segments.iter_mut().for_each(|s| revise_errors(s, &mut notes))
            }
            PrincipleId::HighLowSeparation => {
                let joined: Vec<Token> = segments.concat();
                let pieces = separate(&joined);
                if pieces.len() > 1 {
                    notes.push(format!("goal line plus {} step line(s)", pieces.len()));
                    segments = pieces;
                    separated = true;
                }
            }
            PrincipleId::RepresentationalRotation => {
                segments.iter_mut().for_each(|s| rewrite_rotation(s, &mut notes))
            }
            PrincipleId::RepresentationalMovement => {
                segments.iter_mut().for_each(|s| rewrite_movement(s, &mut notes))
            }
        }
        fired.extend(notes.into_iter().map(|detail| FiredRule {
            principle: id,
            detail,
        }));
    }
    if fired.is_empty() {
        return DeskRewrite {
            text: text.to_string(),
            fired,
        };
    }
    let text = if separated {
        render_separated(&segments)
    } else {
        detokenize(&segments.concat())
    };
    DeskRewrite { text, fired }
}

/// Deterministic offline translation: `(reasoning, translated instruction)`.
pub fn desk_translate(instruction: &Instruction, principles: &PrincipleSet) -> Translation {
    let rewrite = desk_rewrite(instruction.text(), principles);
    let reasoning = rewrite.reasoning();
    let text = if rewrite.text.trim().is_empty() {
        // Every token was filler; keep the original rather than emit nothing.
        instruction.text().to_string()
    } else {
        rewrite.text
    };
    let translated = Instruction::translated(text, reasoning.clone())
        .expect("non-empty text and reasoning present");
    Translation {
        reasoning,
        translated,
    }
}

fn words_match(tokens: &[Token], i: usize, phrase: &str) -> Option<usize> {
    let mut j = i;
    for w in phrase.split(' ') {
        let t = tokens.get(j)?;
        if !t.is_word() || !t.is(w) {
            return None;
        }
        j += 1;
    }
    Some(j)
}

fn match_any(tokens: &[Token], i: usize, phrases: &[&str]) -> Option<(usize, usize)> {
    phrases
        .iter()
        .enumerate()
        .find_map(|(k, p)| words_match(tokens, i, p).map(|end| (k, end)))
}

fn is_upper_start(s: &str) -> bool {
    s.chars().next().is_some_and(char::is_uppercase)
}

fn capitalize(s: &str) -> String {
    let mut c = s.chars();
    match c.next() {
        Some(f) => f.to_uppercase().chain(c).collect(),
        None => String::new(),
    }
}

fn capitalize_first(tokens: &mut [Token]) {
    if let Some(t) = tokens.iter_mut().find(|t| t.is_word()) {
        t.text = capitalize(&t.text);
    }
}

fn phrase_tokens(phrase: &str, capital: bool) -> Vec<Token> {
    let phrase = if capital { capitalize(phrase) } else { phrase.to_string() };
    tokenize(&phrase)
}

fn at_sentence_start(tokens: &[Token], i: usize) -> bool {
    tokens[..i]
        .iter()
        .rev()
        .find(|t| !(t.kind == TokenKind::Punct && t.text == ","))
        .is_none_or(|t| t.kind == TokenKind::Punct && SENTENCE_END.contains(&t.text.as_str()))
}

fn is_ellipsis(t: &Token) -> bool {
    t.kind == TokenKind::Punct && (t.text == "\u{2026}" || (t.text.len() > 1 && t.text.chars().all(|c| c == '.')))
}

fn is_comma(t: Option<&Token>) -> bool {
    t.is_some_and(|t| t.kind == TokenKind::Punct && t.text == ",")
}

fn remove_inessential(tokens: &mut Vec<Token>, notes: &mut Vec<String>) {
    let mut out: Vec<Token> = Vec::with_capacity(tokens.len());
    let mut recapitalize = false;
    let mut i = 0;
    while i < tokens.len() {
        let t = &tokens[i];
        let span = if is_ellipsis(t) {
            Some(i + 1)
        } else if let Some((_, end)) = match_any(tokens, i, PHRASE_FILLERS) {
            Some(end)
        } else if t.is_word()
            && (FILLERS.contains(&t.lower().as_str())
                || (COMMA_FILLERS.contains(&t.lower().as_str())
                    && is_comma(tokens.get(i + 1))
                    && at_sentence_start(tokens, i)))
        {
            Some(i + 1)
        } else {
            None
        };
        match span {
            Some(mut end) => {
                let removed = detokenize(&tokens[i..end]);
                if is_upper_start(&tokens[i].text) && at_sentence_start(tokens, i) {
                    recapitalize = true;
                }
                if is_comma(tokens.get(end)) {
                    end += 1;
                    // ", em," in mid-sentence: both commas go with the filler.
                    if is_comma(out.last()) {
                        out.pop();
                    }
                }
                notes.push(format!("removed filler \"{removed}\""));
                i = end;
            }
            None => {
                let mut t = t.clone();
                if recapitalize && t.is_word() {
                    t.text = capitalize(&t.text);
                    recapitalize = false;
                }
                out.push(t);
                i += 1;
            }
        }
    }
    tidy_punctuation(&mut out);
    *tokens = out;
}

/// Drops commas left dangling at the start, doubled, or before a sentence end.
fn tidy_punctuation(tokens: &mut Vec<Token>) {
    let mut out: Vec<Token> = Vec::with_capacity(tokens.len());
    for t in tokens.drain(..) {
        let comma = t.kind == TokenKind::Punct && t.text == ",";
        let ender = t.kind == TokenKind::Punct && SENTENCE_END.contains(&t.text.as_str());
        if comma && (out.is_empty() || out.last().is_some_and(|p| p.kind == TokenKind::Punct)) {
            continue;
        }
        if ender && is_comma(out.last()) {
            out.pop();
        }
        out.push(t);
    }
    *tokens = out;
}

fn match_case(original: &str, replacement: &str) -> String {
    if original.chars().count() > 1 && original.chars().all(|c| !c.is_lowercase()) {
        replacement.to_uppercase()
    } else if is_upper_start(original) {
        capitalize(replacement)
    } else {
        replacement.to_string()
    }
}

fn revise_errors(tokens: &mut Vec<Token>, notes: &mut Vec<String>) {
    let mut out: Vec<Token> = Vec::with_capacity(tokens.len());
    for t in tokens.drain(..) {
        if !t.is_word() {
            out.push(t);
            continue;
        }
        let lower = t.lower();
        if let Some((_, fix)) = SPELLING.iter().find(|(bad, _)| *bad == lower) {
            notes.push(format!("corrected \"{}\" to \"{fix}\"", t.text));
            out.push(Token::word(match_case(&t.text, fix)));
            continue;
        }
        if out.last().is_some_and(|p| p.is_word() && p.lower() == lower) {
            notes.push(format!("dropped repeated word \"{}\"", t.text));
            continue;
        }
        out.push(t);
    }
    *tokens = out;
}

fn separate(tokens: &[Token]) -> Vec<Vec<Token>> {
    let mut pieces: Vec<Vec<Token>> = Vec::new();
    let mut cur: Vec<Token> = Vec::new();
    let flush = |cur: &mut Vec<Token>, pieces: &mut Vec<Vec<Token>>| {
        while cur.last().is_some_and(|t| t.kind == TokenKind::Punct && t.text == ",")
            || cur.last().is_some_and(|t| t.is_word() && t.is("and"))
        {
            cur.pop();
        }
        while cur.first().is_some_and(|t| t.kind == TokenKind::Punct) {
            cur.remove(0);
        }
        if cur.iter().any(Token::is_word) {
            pieces.push(std::mem::take(cur));
        } else {
            cur.clear();
        }
    };
    let mut i = 0;
    while i < tokens.len() {
        let t = &tokens[i];
        if t.kind == TokenKind::Punct && SENTENCE_END.contains(&t.text.as_str()) {
            flush(&mut cur, &mut pieces);
            i += 1;
        } else if let Some(end) = words_match(tokens, i, "after that").or_else(|| words_match(tokens, i, "then")) {
            flush(&mut cur, &mut pieces);
            i = end;
        } else {
            cur.push(t.clone());
            i += 1;
        }
    }
    flush(&mut cur, &mut pieces);
    pieces
}

fn render_separated(segments: &[Vec<Token>]) -> String {
    let line = |seg: &[Token]| {
        let mut seg = seg.to_vec();
        capitalize_first(&mut seg);
        detokenize(&seg)
    };
    let mut lines = Vec::with_capacity(segments.len() + 1);
    if let Some(last) = segments.last() {
        lines.push(format!("Goal: {}.", line(last)));
    }
    for (i, seg) in segments.iter().enumerate() {
        lines.push(format!("Step {}: {}.", i + 1, line(seg)));
    }
    lines.join("\n")
}

fn replace_span(
    tokens: &mut Vec<Token>,
    start: usize,
    end: usize,
    replacement: &str,
    notes: &mut Vec<String>,
) -> usize {
    let capital = is_upper_start(&tokens[start].text);
    let new = phrase_tokens(replacement, capital);
    let n = new.len();
    notes.push(format!(
        "\"{}\" -> \"{}\"",
        detokenize(&tokens[start..end]).to_lowercase(),
        replacement
    ));
    tokens.splice(start..end, new);
    start + n
}

const DIRECTIONS: &[&str] = &["left", "right"];
const SLIGHT: &[&str] = &["a little", "a bit", "slightly"];

fn rewrite_rotation(tokens: &mut Vec<Token>, notes: &mut Vec<String>) {
    let mut i = 0;
    while i < tokens.len() {
        if let Some((_, end)) = match_any(tokens, i, &["turn around", "turn back", "make a u-turn", "u-turn"]) {
            i = replace_span(tokens, i, end, "rotate 180 degrees in place", notes);
            continue;
        }
        if let Some(after_turn) = words_match(tokens, i, "turn") {
            // turn [slightly] [to the] <dir> [slightly]
            let (slight_before, j) = match match_any(tokens, after_turn, SLIGHT) {
                Some((_, e)) => (true, e),
                None => (false, after_turn),
            };
            let j = words_match(tokens, j, "to the").unwrap_or(j);
            if let Some((d, k)) = match_any(tokens, j, DIRECTIONS) {
                let (slight_after, k) = match match_any(tokens, k, SLIGHT) {
                    Some((_, e)) => (true, e),
                    None => (false, k),
                };
                let angle = if slight_before || slight_after { 30 } else { 90 };
                let replacement = format!("rotate {} by about {angle} degrees", DIRECTIONS[d]);
                i = replace_span(tokens, i, k, &replacement, notes);
                continue;
            }
        }
        i += 1;
    }
}

/// Object phrase starting at `i`: a single object pronoun, or a determiner
/// followed by words up to punctuation or a clause boundary. Returns the
/// phrase as a subject and its end index.
fn object_phrase(tokens: &[Token], i: usize) -> Option<(String, bool, usize)> {
    let first = tokens.get(i).filter(|t| t.is_word())?;
    let lower = first.lower();
    if let Some((_, subject)) = PRONOUN_SUBJECTS.iter().find(|(obj, _)| *obj == lower) {
        return Some((subject.to_string(), *subject == "they", i + 1));
    }
    if !DETERMINERS.contains(&lower.as_str()) {
        return None;
    }
    let mut end = i + 1;
    while let Some(t) = tokens.get(end) {
        if !t.is_word() || PHRASE_BOUNDARY.contains(&t.lower().as_str()) {
            break;
        }
        end += 1;
    }
    if end == i + 1 {
        return None;
    }
    let phrase = detokenize(&tokens[i..end]);
    let last = tokens[end - 1].lower();
    let plural = matches!(lower.as_str(), "those" | "these")
        || (end - i > 1
            && last.ends_with('s')
            && !["ss", "us", "is"].iter().any(|e| last.ends_with(e)));
    Some((phrase, plural, end))
}

fn camera_view(subject: &str, plural: bool) -> String {
    let verb = if plural { "occupy" } else { "occupies" };
    format!("{subject} {verb} all your camera view")
}

fn rewrite_movement(tokens: &mut Vec<Token>, notes: &mut Vec<String>) {
    const BEING: &[&str] = &["you are", "you're", "you get", "you come"];
    const DEGREE: &[&str] = &["pretty", "very", "quite", "really"];
    const NEAR: &[&str] = &["close enough", "near enough", "close", "near", "nearby"];
    const APPROACH: &[&str] = &["get", "go", "come", "move", "walk"];
    let mut i = 0;
    while i < tokens.len() {
        if let Some((_, j)) = match_any(tokens, i, BEING) {
            let j = match_any(tokens, j, DEGREE).map_or(j, |(_, e)| e);
            if let Some((_, k)) = match_any(tokens, j, NEAR) {
                let after = words_match(tokens, k, "to").unwrap_or(k);
                let (subject, plural, end) = object_phrase(tokens, after)
                    .unwrap_or(("the target".to_string(), false, k));
                let replacement = camera_view(&subject, plural);
                i = replace_span(tokens, i, end, &replacement, notes);
                continue;
            }
        }
        if let Some((_, j)) = match_any(tokens, i, APPROACH) {
            if let Some((_, k)) = match_any(tokens, j, &["closer", "close", "near"]) {
                let k = words_match(tokens, k, "to").unwrap_or(k);
                if let Some((subject, plural, end)) = object_phrase(tokens, k) {
                    let replacement = format!("move forward until {}", camera_view(&subject, plural));
                    i = replace_span(tokens, i, end, &replacement, notes);
                    continue;
                }
            }
        }
        if let Some((_, end)) = match_any(tokens, i, &["a few steps", "few steps"]) {
            i = replace_span(tokens, i, end, "about 1.5 meters", notes);
            continue;
        }
        if let Some((_, j)) = match_any(tokens, i, &["a little", "a bit"]) {
            if let Some((_, end)) = match_any(tokens, j, &["further", "farther", "more"]) {
                i = replace_span(tokens, i, end, "about 1 meter further", notes);
                continue;
            }
        }
        i += 1;
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn rw(text: &str, ids: &[PrincipleId]) -> String {
        desk_rewrite(text, &PrincipleSet::new(ids.iter().copied()).unwrap()).text
    }

    const FIG1: &str = "Go ahead\u{2026} em, to that girl in blue shirt. Turn right when you are close enough to her.";

    #[test]
    fn removal_drops_fillers() {
        let out = rw(FIG1, &[PrincipleId::InessentialRemoval]);
        assert_eq!(out, "Go ahead to that girl in blue shirt. Turn right when you are close enough to her.");
        assert_eq!(rw("Em, go to the shed.", &[PrincipleId::InessentialRemoval]), "Go to the shed.");
        assert_eq!(
            rw("Well, go, you know, ahead um.", &[PrincipleId::InessentialRemoval]),
            "Go ahead."
        );
    }

    #[test]
    fn empty_set_is_identity() {
        let weird = "Go   ahead\u{2026} em ,to  x";
        assert_eq!(rw(weird, &[]), weird);
    }

    #[test]
    fn no_fire_is_identity() {
        let text = "walk  to the shed";
        let r = desk_rewrite(text, &PrincipleSet::all());
        assert!(r.fired.is_empty(), "{:?}", r.fired);
        assert_eq!(r.text, text);
    }

    #[test]
    fn revision_fixes_spelling_and_repeats() {
        assert_eq!(
            rw("Go stright and Trun RIGTH at the the greenhose.", &[PrincipleId::ErrorsRevision]),
            "Go straight and Turn RIGHT at the greenhouse."
        );
    }

    #[test]
    fn separation_goal_and_steps() {
        assert_eq!(
            rw("walk to the shed, then turn left and stop at the tank.", &[PrincipleId::HighLowSeparation]),
            "Goal: Turn left and stop at the tank.\nStep 1: Walk to the shed.\nStep 2: Turn left and stop at the tank."
        );
    }

    #[test]
    fn rotation_patterns() {
        let r = &[PrincipleId::RepresentationalRotation];
        assert_eq!(rw("Turn a little left.", r), "Rotate left by about 30 degrees.");
        assert_eq!(rw("turn to the right slightly", r), "rotate right by about 30 degrees");
        assert_eq!(rw("then turn left", r), "then rotate left by about 90 degrees");
        assert_eq!(rw("turn around", r), "rotate 180 degrees in place");
    }

    #[test]
    fn movement_close_becomes_camera_view() {
        let m = &[PrincipleId::RepresentationalMovement];
        let out = rw("turn right when you are close to her", m);
        assert!(out.contains("occupies all your camera view"), "{out}");
        assert_eq!(out, "turn right when she occupies all your camera view");
        let out = rw(FIG1, m);
        assert!(out.contains("she occupies all your camera view"), "{out}");
        assert_eq!(
            rw("get close to the pepper plants and stop", m),
            "move forward until the pepper plants occupy all your camera view and stop"
        );
        assert_eq!(rw("stop when you are near those trees.", m), "stop when those trees occupy all your camera view.");
        assert_eq!(rw("walk a few steps", m), "walk about 1.5 meters");
    }

    #[test]
    fn full_set_on_fig1() {
        let r = desk_rewrite(FIG1, &PrincipleSet::all());
        assert_eq!(
            r.text,
            "Goal: Turn right when she occupies all your camera view.\n\
             Step 1: Go ahead to that girl in blue shirt.\n\
             Step 2: Turn right when she occupies all your camera view."
                .replace("Turn right when", "Rotate right by about 90 degrees when")
        );
        assert!(r.reasoning().contains("INESSENTIAL_REMOVAL: removed filler \"em\""));
    }

    #[test]
    fn all_filler_input_keeps_original() {
        let i = Instruction::original("em, uh").unwrap();
        let t = desk_translate(&i, &PrincipleSet::all());
        assert_eq!(t.translated.text(), "em, uh");
        assert!(t.translated.is_translated());
    }
}
