use std::fmt;

use thiserror::Error;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TokenKind {
    Keyword,
    Punct,
    Ident,
    Int,
    Str,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Token {
    pub kind: TokenKind,
    /// Source text of the token; string literals keep their quotes.
    pub text: String,
    pub pos: Position,
}

/// 1-based line and column (in characters).
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub struct Position {
    pub line: usize,
    pub col: usize,
}

impl fmt::Display for Position {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}", self.line, self.col)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum LexError {
    #[error("{0}: unterminated string literal")]
    UnterminatedString(Position),
    #[error("{pos}: illegal character {ch:?}")]
    IllegalChar { pos: Position, ch: char },
}

impl LexError {
    pub fn position(&self) -> Position {
        match self {
            LexError::UnterminatedString(p) => *p,
            LexError::IllegalChar { pos, .. } => *pos,
        }
    }
}

pub const KEYWORDS: &[&str] = &[
    "if", "else", "while", "for", "try", "catch", "throw", "return", "new", "int", "boolean", "true", "false", "null",
    "this",
];

const PUNCT2: &[&str] = &["++", "--", "<=", ">=", "==", "!=", "&&", "||"];
const PUNCT1: &str = "(){};,.=<>+-*/%!";

pub fn tokenize(source: &str) -> Result<Vec<Token>, LexError> {
    let chars: Vec<char> = source.chars().collect();
    let mut tokens = Vec::new();
    let (mut i, mut line, mut col) = (0usize, 1usize, 1usize);
    while i < chars.len() {
        let c = chars[i];
        let pos = Position { line, col };
        if c == '\n' {
            i += 1;
            line += 1;
            col = 1;
            continue;
        }
        if c.is_whitespace() {
            i += 1;
            col += 1;
            continue;
        }
        let start = i;
        let kind = if c.is_ascii_alphabetic() || c == '_' {
            while i < chars.len() && (chars[i].is_ascii_alphanumeric() || chars[i] == '_') {
                i += 1;
            }
            let word: String = chars[start..i].iter().collect();
            if KEYWORDS.contains(&word.as_str()) {
                TokenKind::Keyword
            } else {
                TokenKind::Ident
            }
        } else if c.is_ascii_digit() {
            while i < chars.len() && chars[i].is_ascii_digit() {
                i += 1;
            }
            TokenKind::Int
        } else if c == '"' {
            i += 1;
            loop {
                match chars.get(i) {
                    None | Some('\n') => return Err(LexError::UnterminatedString(pos)),
                    Some('\\') => i += 2,
                    Some('"') => {
                        i += 1;
                        break;
                    }
                    Some(_) => i += 1,
                }
            }
            TokenKind::Str
        } else {
            let two: String = chars[i..chars.len().min(i + 2)].iter().collect();
            if PUNCT2.contains(&two.as_str()) {
                i += 2;
            } else if PUNCT1.contains(c) {
                i += 1;
            } else {
                return Err(LexError::IllegalChar { pos, ch: c });
            }
            TokenKind::Punct
        };
        col += i - start;
        tokens.push(Token { kind, text: chars[start..i].iter().collect(), pos });
    }
    Ok(tokens)
}
