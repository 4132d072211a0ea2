//! Whitespace + punctuation tokenizer shared by the desk translator rules and
//! similarity scoring.

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TokenKind {
    Word,
    Punct,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Token {
    pub text: String,
    pub kind: TokenKind,
}

impl Token {
    pub fn word(text: impl Into<String>) -> Self {
        Token {
            text: text.into(),
            kind: TokenKind::Word,
        }
    }

    pub fn punct(text: impl Into<String>) -> Self {
        Token {
            text: text.into(),
            kind: TokenKind::Punct,
        }
    }

    pub fn is_word(&self) -> bool {
        self.kind == TokenKind::Word
    }

    /// Case-insensitive comparison against a lowercase pattern word.
    pub fn is(&self, lower: &str) -> bool {
        self.text.to_lowercase() == lower
    }

    pub fn lower(&self) -> String {
        self.text.to_lowercase()
    }
}

fn is_word_char(c: char) -> bool {
    c.is_alphanumeric()
}

fn is_joiner(c: char) -> bool {
    matches!(c, '\'' | '\u{2019}' | '-')
}

/// Splits text into word and punctuation tokens. Apostrophes and hyphens
/// between word characters stay inside the word, as do decimal points
/// between digits; `...` and `…` are single tokens.
pub fn tokenize(text: &str) -> Vec<Token> {
    let chars: Vec<char> = text.chars().collect();
    let mut out = Vec::new();
    let mut i = 0;
    while i < chars.len() {
        let c = chars[i];
        if c.is_whitespace() {
            i += 1;
        } else if is_word_char(c) {
            let start = i;
            while i < chars.len()
                && (is_word_char(chars[i])
                    || (is_joiner(chars[i])
                        && i + 1 < chars.len()
                        && is_word_char(chars[i + 1])
                        && i > start)
                    || (matches!(chars[i], '.' | ',')
                        && chars[i - 1].is_ascii_digit()
                        && chars.get(i + 1).is_some_and(char::is_ascii_digit)))
            {
                i += 1;
            }
            out.push(Token::word(chars[start..i].iter().collect::<String>()));
        } else if c == '.' && chars.get(i + 1) == Some(&'.') {
            let start = i;
            while i < chars.len() && chars[i] == '.' {
                i += 1;
            }
            out.push(Token::punct(chars[start..i].iter().collect::<String>()));
        } else {
            out.push(Token::punct(c.to_string()));
            i += 1;
        }
    }
    out
}

fn attaches_left(p: &str) -> bool {
    matches!(
        p,
        "." | "," | ";" | ":" | "!" | "?" | ")" | "]" | "}" | "\u{2026}" | "%"
    ) || p.chars().all(|c| c == '.')
}

fn attaches_right(p: &str) -> bool {
    matches!(p, "(" | "[" | "{")
}

/// Joins tokens back into text: words separated by single spaces, closing
/// punctuation attached to the preceding token.
pub fn detokenize(tokens: &[Token]) -> String {
    let mut out = String::new();
    let mut glue_next = true;
    for t in tokens {
        let glue = glue_next || (t.kind == TokenKind::Punct && attaches_left(&t.text));
        if !glue {
            out.push(' ');
        }
        out.push_str(&t.text);
        glue_next = t.kind == TokenKind::Punct && attaches_right(&t.text);
    }
    out
}

/// Lowercased word tokens, the unit of similarity scoring.
pub fn scoring_tokens(text: &str) -> Vec<String> {
    tokenize(text)
        .into_iter()
        .filter(Token::is_word)
        .map(|t| t.lower())
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn texts(s: &str) -> Vec<String> {
        tokenize(s).into_iter().map(|t| t.text).collect()
    }

    #[test]
    fn splits_words_and_punctuation() {
        assert_eq!(
            texts("Go ahead\u{2026} em, to that girl in blue shirt."),
            ["Go", "ahead", "\u{2026}", "em", ",", "to", "that", "girl", "in", "blue", "shirt", "."]
        );
        assert_eq!(texts("you're well-known... ok"), ["you're", "well-known", "...", "ok"]);
        assert_eq!(texts("-x- 'a'"), ["-", "x", "-", "'", "a", "'"]);
    }

    #[test]
    fn detokenize_normalizes_spacing() {
        let s = "Go ahead\u{2026} em, to that girl (in blue).";
        assert_eq!(detokenize(&tokenize(s)), s);
        assert_eq!(detokenize(&tokenize("a ,b  ;c")), "a, b; c");
    }

    #[test]
    fn scoring_tokens_lowercase_words() {
        assert_eq!(scoring_tokens("Turn RIGHT, now."), ["turn", "right", "now"]);
    }
}
