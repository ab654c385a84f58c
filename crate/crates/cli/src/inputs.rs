use std::path::Path;

use tree_idioms::minilang::MiniGrammar;
use tree_idioms::{deserialize_tree, validate_tree, Grammar, GrammarError, IdiomFileError, IdiomSet, ParseTree};

use crate::fail::{read, CmdResult, Failure, DOMAIN, USAGE};

pub const BUILTIN_MINI: &str = "builtin:mini";

pub fn load_grammar(spec: &str) -> CmdResult<Grammar> {
    if spec == BUILTIN_MINI {
        return Ok(MiniGrammar::new().into_grammar());
    }
    if let Some(name) = spec.strip_prefix("builtin:") {
        return Err(Failure::msg(USAGE, format!("unknown built-in grammar `{name}` (available: mini)")));
    }
    let text = read(Path::new(spec))?;
    Grammar::from_json(&text).map_err(|e| Failure::msg(USAGE, format!("{spec}: {e}")))
}

/// The grammar to parse with: the built-in one, or a saved extension of it.
pub fn load_mini(spec: &str) -> CmdResult<MiniGrammar> {
    if spec == BUILTIN_MINI {
        return Ok(MiniGrammar::new());
    }
    MiniGrammar::from_grammar(load_grammar(spec)?)
        .map_err(|e: GrammarError| Failure::msg(USAGE, format!("{spec}: {e}")))
}

pub fn load_idioms(path: &Path, grammar: &Grammar) -> CmdResult<IdiomSet> {
    let text = read(path)?;
    IdiomSet::from_json(&text, grammar).map_err(|e| {
        let code = match e {
            IdiomFileError::FormatVersion(_) | IdiomFileError::FingerprintMismatch { .. } => USAGE,
            _ => DOMAIN,
        };
        Failure::msg(code, format!("{}: {e}", path.display()))
    })
}

/// Reads one tree per non-blank line and checks each against `grammar`.
/// Every bad line is reported, not just the first.
pub fn load_trees(path: &Path, grammar: &Grammar) -> CmdResult<Vec<ParseTree>> {
    let text = read(path)?;
    let mut trees = Vec::new();
    let mut problems = Vec::new();
    for (i, line) in text.lines().enumerate() {
        if line.trim().is_empty() {
            continue;
        }
        let at = format!("{}:{}", path.display(), i + 1);
        match deserialize_tree(line, grammar) {
            Ok(t) => match validate_tree(&t, grammar) {
                Ok(()) => trees.push(t),
                Err(violations) => {
                    for v in violations {
                        problems.push(format!("{at}: {v}"));
                    }
                }
            },
            Err(e) => problems.push(format!("{at}: {e}")),
        }
    }
    if problems.is_empty() {
        Ok(trees)
    } else {
        Err(Failure::msg(DOMAIN, problems.join("\n")))
    }
}
