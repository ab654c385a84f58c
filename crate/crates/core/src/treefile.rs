//! The one-tree-per-line text format.
//!
//! ```text
//! (Statement@3 "if" (ParExpr@20 "(" Expr ")") Statement IfOrElse)
//! ```
//!
//! Internal nodes are `(LHS@ruleId child ...)`, terminal leaves are
//! double-quoted lexemes with `\"` and `\\` escapes, and a bare name is an
//! unexpanded nonterminal slot (only meaningful in templates).

use std::fmt::Write as _;

use crate::error::TreeSyntaxError;
use crate::grammar::{Grammar, RuleId};
use crate::tree::ParseTree;

pub fn serialize_tree(tree: &ParseTree) -> String {
    let mut out = String::new();
    write_node(tree, &mut out);
    out
}

fn write_node(t: &ParseTree, out: &mut String) {
    match t.rule {
        Some(id) => {
            let _ = write!(out, "({}@{}", t.symbol.name(), id);
            for c in &t.children {
                out.push(' ');
                write_node(c, out);
            }
            out.push(')');
        }
        None if t.symbol.is_terminal() => write_quoted(t.symbol.name(), out),
        None => out.push_str(t.symbol.name()),
    }
}

fn write_quoted(s: &str, out: &mut String) {
    out.push('"');
    for c in s.chars() {
        if c == '"' || c == '\\' {
            out.push('\\');
        }
        out.push(c);
    }
    out.push('"');
}

pub fn deserialize_tree(text: &str, grammar: &Grammar) -> Result<ParseTree, TreeSyntaxError> {
    let mut reader = Reader { text, pos: 0, grammar };
    reader.skip_ws();
    let tree = reader.node()?;
    reader.skip_ws();
    if reader.pos != text.len() {
        return Err(reader.error("trailing input after tree"));
    }
    Ok(tree)
}

struct Reader<'a> {
    text: &'a str,
    pos: usize,
    grammar: &'a Grammar,
}

impl<'a> Reader<'a> {
    fn error(&self, message: &str) -> TreeSyntaxError {
        TreeSyntaxError { offset: self.pos, message: message.to_string() }
    }

    fn peek(&self) -> Option<u8> {
        self.text.as_bytes().get(self.pos).copied()
    }

    fn skip_ws(&mut self) {
        while self.peek().is_some_and(|b| b.is_ascii_whitespace()) {
            self.pos += 1;
        }
    }

    fn node(&mut self) -> Result<ParseTree, TreeSyntaxError> {
        match self.peek() {
            None => Err(self.error("unexpected end of input")),
            Some(b'(') => self.internal(),
            Some(b'"') => {
                let start = self.pos;
                let lexeme = self.quoted()?;
                match self.grammar.terminal(&lexeme) {
                    Some(sym) => Ok(ParseTree::leaf(sym.clone())),
                    None => Err(TreeSyntaxError { offset: start, message: format!("unknown terminal {lexeme:?}") }),
                }
            }
            Some(b')') => Err(self.error("unbalanced parenthesis")),
            Some(_) => {
                let start = self.pos;
                let word = self.word();
                match self.grammar.nonterminal(word) {
                    Some(sym) => Ok(ParseTree::leaf(sym.clone())),
                    None => Err(TreeSyntaxError { offset: start, message: format!("unknown nonterminal `{word}`") }),
                }
            }
        }
    }

    fn internal(&mut self) -> Result<ParseTree, TreeSyntaxError> {
        let open = self.pos;
        self.pos += 1;
        let head_start = self.pos;
        let head = self.word();
        let (name, id) = head
            .rsplit_once('@')
            .ok_or_else(|| TreeSyntaxError { offset: head_start, message: "expected `LHS@ruleId`".into() })?;
        let symbol = self
            .grammar
            .nonterminal(name)
            .cloned()
            .ok_or_else(|| TreeSyntaxError { offset: head_start, message: format!("unknown nonterminal `{name}`") })?;
        let id: u32 = id.parse().map_err(|_| TreeSyntaxError {
            offset: head_start + name.len() + 1,
            message: format!("bad rule id `{id}`"),
        })?;
        let mut children = Vec::new();
        loop {
            let before = self.pos;
            self.skip_ws();
            match self.peek() {
                None => return Err(TreeSyntaxError { offset: open, message: "unbalanced parenthesis".into() }),
                Some(b')') => {
                    self.pos += 1;
                    break;
                }
                Some(_) if before == self.pos => return Err(self.error("expected whitespace between children")),
                Some(_) => children.push(self.node()?),
            }
        }
        Ok(ParseTree::node(symbol, RuleId(id), children))
    }

    fn word(&mut self) -> &'a str {
        let start = self.pos;
        while self.peek().is_some_and(|b| !b.is_ascii_whitespace() && !matches!(b, b'(' | b')' | b'"')) {
            self.pos += 1;
        }
        &self.text[start..self.pos]
    }

    fn quoted(&mut self) -> Result<String, TreeSyntaxError> {
        let open = self.pos;
        self.pos += 1;
        let mut out = String::new();
        let mut chars = self.text[self.pos..].char_indices();
        while let Some((i, c)) = chars.next() {
            match c {
                '"' => {
                    self.pos += i + 1;
                    return Ok(out);
                }
                '\\' => match chars.next() {
                    Some((_, e @ ('"' | '\\'))) => out.push(e),
                    Some((j, _)) => {
                        return Err(TreeSyntaxError { offset: self.pos + j, message: "invalid escape".into() })
                    }
                    None => break,
                },
                c => out.push(c),
            }
        }
        Err(TreeSyntaxError { offset: open, message: "unterminated string".into() })
    }
}

/// A tree-file line that failed to load.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LineError {
    /// 1-based line number.
    pub line: usize,
    pub error: TreeSyntaxError,
}

/// Reads one tree per non-blank line.
pub fn read_trees(text: &str, grammar: &Grammar) -> Result<Vec<ParseTree>, LineError> {
    text.lines()
        .enumerate()
        .filter(|(_, l)| !l.trim().is_empty())
        .map(|(i, l)| deserialize_tree(l, grammar).map_err(|error| LineError { line: i + 1, error }))
        .collect()
}

pub fn write_trees<'a>(trees: impl IntoIterator<Item = &'a ParseTree>) -> String {
    let mut out = String::new();
    for t in trees {
        write_node(t, &mut out);
        out.push('\n');
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grammar::Symbol;

    fn g() -> Grammar {
        Grammar::new(
            &["S", "A"],
            &["a", "say \"hi\"", "back\\slash", "(", ")"],
            "S",
            &[("S", vec!["a"]), ("S", vec!["A", "say \"hi\""]), ("A", vec!["back\\slash", "(", ")"])],
        )
        .unwrap()
    }

    #[test]
    fn single_terminal_child() {
        let g = g();
        let t = ParseTree::depth_one(&g, RuleId(0));
        assert_eq!(serialize_tree(&t), "(S@0 \"a\")");
        assert_eq!(deserialize_tree("(S@0 \"a\")", &g).unwrap(), t);
    }

    #[test]
    fn escapes_and_slots() {
        let g = g();
        let inner = ParseTree::depth_one(&g, RuleId(2));
        let t = ParseTree::apply(&g, RuleId(1), vec![inner, ParseTree::leaf(Symbol::terminal("say \"hi\""))]);
        let text = serialize_tree(&t);
        assert_eq!(text, r#"(S@1 (A@2 "back\\slash" "(" ")") "say \"hi\"")"#);
        assert_eq!(deserialize_tree(&text, &g).unwrap(), t);

        let template = ParseTree::depth_one(&g, RuleId(1));
        assert_eq!(serialize_tree(&template), r#"(S@1 A "say \"hi\"")"#);
        assert_eq!(deserialize_tree(&serialize_tree(&template), &g).unwrap(), template);
    }

    #[test]
    fn unbalanced_reports_offset() {
        let g = g();
        let err = deserialize_tree("(S@0 \"a\"", &g).unwrap_err();
        assert_eq!(err.offset, 0);
        assert!(err.message.contains("unbalanced"));
        let err = deserialize_tree("(S@0 \"a\"))", &g).unwrap_err();
        assert_eq!(err.offset, 9);
    }

    #[test]
    fn malformed_inputs() {
        let g = g();
        assert!(deserialize_tree("(Q@0 \"a\")", &g).unwrap_err().message.contains("unknown nonterminal"));
        assert!(deserialize_tree("(S@0 \"zz\")", &g).unwrap_err().message.contains("unknown terminal"));
        assert!(deserialize_tree("(S@x \"a\")", &g).unwrap_err().message.contains("bad rule id"));
        assert!(deserialize_tree("(S \"a\")", &g).unwrap_err().message.contains("LHS@ruleId"));
        assert!(deserialize_tree("(S@0 \"a)", &g).unwrap_err().message.contains("unterminated"));
        assert!(deserialize_tree("", &g).unwrap_err().message.contains("end of input"));
        assert!(deserialize_tree("(S@0 \"a\"\"a\")", &g).unwrap_err().message.contains("whitespace"));
    }

    #[test]
    fn files_skip_blank_lines_and_report_line_numbers() {
        let g = g();
        let trees = read_trees("(S@0 \"a\")\n\n(S@0 \"a\")\n", &g).unwrap();
        assert_eq!(trees.len(), 2);
        assert_eq!(write_trees(&trees), "(S@0 \"a\")\n(S@0 \"a\")\n");
        let err = read_trees("(S@0 \"a\")\n(S@0\n", &g).unwrap_err();
        assert_eq!(err.line, 2);
    }
}
