//! A small Java-like statement language: lexer, recursive-descent parser and
//! a seeded demo-corpus generator.
//!
//! The language has blocks, `if`/`else`, `while`, counting `for` loops,
//! `try`/`catch`, `throw`, `return`, assignments, local declarations, calls
//! on dotted names, `new` expressions and integer/string literals. The
//! grammar is deliberately tall: a bare identifier used as an expression
//! takes eleven rule applications, which gives idiom mining depth to remove.

mod corpus;
mod grammar;
mod lexer;
mod parser;

pub use corpus::generate_demo_corpus;
pub use grammar::{LexClass, MiniGrammar, Prod, IDENTIFIERS, INT_LITERALS, STRING_LITERALS};
pub use lexer::{tokenize, LexError, Position, Token, TokenKind, KEYWORDS};
pub use parser::{parse_program, ParseError};

/// Source text of one program and where it came from.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SourceProgram {
    pub text: String,
    /// File path or generator description.
    pub origin: String,
    /// Line of `origin` on which `text` starts (1-based).
    pub first_line: usize,
}

impl SourceProgram {
    pub fn new(text: impl Into<String>, origin: impl Into<String>) -> Self {
        SourceProgram { text: text.into(), origin: origin.into(), first_line: 1 }
    }
}

/// Splits a corpus file into programs at lines consisting only of `%%`.
/// Empty segments are dropped.
pub fn split_corpus(text: &str, origin: &str) -> Vec<SourceProgram> {
    let mut out = Vec::new();
    let mut current = String::new();
    let mut start = 1;
    let mut flush = |current: &mut String, start: usize| {
        if !current.trim().is_empty() {
            out.push(SourceProgram { text: std::mem::take(current), origin: origin.to_string(), first_line: start });
        }
        current.clear();
    };
    for (i, line) in text.lines().enumerate() {
        if line.trim_end() == "%%" {
            flush(&mut current, start);
            start = i + 2;
        } else {
            current.push_str(line);
            current.push('\n');
        }
    }
    flush(&mut current, start);
    out
}

/// Joins programs with `%%` separator lines.
pub fn join_corpus(programs: &[SourceProgram]) -> String {
    let mut out = String::new();
    for (i, p) in programs.iter().enumerate() {
        if i > 0 {
            out.push_str("%%\n");
        }
        out.push_str(p.text.trim_end());
        out.push('\n');
    }
    out
}
