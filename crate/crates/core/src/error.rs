use thiserror::Error;

use crate::grammar::RuleId;

#[derive(Debug, Error)]
pub enum GrammarError {
    #[error("symbol `{0}` is declared twice")]
    DuplicateSymbol(String),
    #[error("name `{0}` is used for both a terminal and a nonterminal")]
    AmbiguousName(String),
    #[error("unknown symbol `{0}`")]
    UnknownSymbol(String),
    #[error("start symbol `{0}` is not a nonterminal")]
    StartNotNonterminal(String),
    #[error("rule left-hand side `{0}` is a terminal")]
    TerminalLhs(String),
    #[error("rule for `{0}` has an empty right-hand side")]
    EmptyRhs(String),
    #[error("nonterminal name `{0}` contains whitespace, parentheses, quotes, `@` or `\\`")]
    BadNonterminalName(String),
    #[error("base rules cannot be added after idiom rules")]
    BaseAfterIdioms,
    #[error("grammar is not builtin:mini or an extension of it")]
    NotMini,
    #[error("unsupported grammar format_version {0}")]
    FormatVersion(u32),
    #[error("malformed grammar file: {0}")]
    Json(#[from] serde_json::Error),
}

/// Failure to read the parenthesized tree format.
#[derive(Debug, Clone, Error, PartialEq, Eq)]
#[error("{message} at byte {offset}")]
pub struct TreeSyntaxError {
    pub offset: usize,
    pub message: String,
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum ReplayError {
    #[error("empty rule sequence")]
    Empty,
    #[error("rule {0} does not exist")]
    UnknownRule(RuleId),
    #[error("rule {rule} expands `{found}` but the leftmost open nonterminal is `{expected}`")]
    Inapplicable { rule: RuleId, expected: String, found: String },
    #[error("{0} rules left over after the tree was complete")]
    Leftover(usize),
    #[error("premature exhaustion: rule sequence ended with `{0}` unexpanded")]
    PrematureExhaustion(String),
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum MineError {
    #[error("rule {0} does not exist")]
    UnknownRule(RuleId),
    #[error("child position {pos} is out of range for rule {rule}")]
    PositionOutOfRange { rule: RuleId, pos: u32 },
    #[error("rule {parent} has `{expected}` at position {pos}, but rule {child} expands `{found}`")]
    LhsMismatch { parent: RuleId, pos: u32, child: RuleId, expected: String, found: String },
    #[error("idiom rank {rank} refers to rule {rule}, which is not a base rule or an earlier idiom")]
    DanglingProvenance { rank: u32, rule: RuleId },
    #[error("idiom rank {0} is not part of this idiom set")]
    UnknownIdiom(u32),
}

#[derive(Debug, Error)]
pub enum IdiomFileError {
    #[error("unsupported idiom file format_version {0}")]
    FormatVersion(u32),
    #[error("grammar fingerprint mismatch: idiom file has {file}, grammar has {grammar}")]
    FingerprintMismatch { file: String, grammar: String },
    #[error("idiom ranks must be 1..={expected}, found {found} at position {index}")]
    Rank { index: usize, expected: usize, found: u32 },
    #[error("idiom {rank}: recorded rule `{recorded}` does not match its provenance `{derived}`")]
    RuleMismatch { rank: u32, recorded: String, derived: String },
    #[error("unknown tie-break policy `{0}`")]
    TieBreak(String),
    #[error("idiom {rank}: {source}")]
    Provenance {
        rank: u32,
        #[source]
        source: MineError,
    },
    #[error("malformed idiom file: {0}")]
    Json(#[from] serde_json::Error),
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum CompressError {
    #[error("grammar fingerprint mismatch: idiom set has {idioms}, grammar has {grammar}")]
    FingerprintMismatch { idioms: String, grammar: String },
    #[error("rule {0} is neither a base rule nor a known idiom")]
    UnknownRule(RuleId),
    #[error("K={k} exceeds the {available} available idioms")]
    KOutOfRange { k: usize, available: usize },
    #[error("sweep sizes must be sorted ascending")]
    UnsortedSweep,
    #[error("node applying rule {rule} has {found} children, idiom expects {expected}")]
    Arity { rule: RuleId, expected: usize, found: usize },
    #[error("idiom set is inconsistent with the grammar: {0}")]
    Template(#[from] MineError),
}
