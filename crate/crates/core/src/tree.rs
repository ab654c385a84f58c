//! Derivation trees and their linearization into rule sequences.

use std::fmt;

use crate::error::ReplayError;
use crate::grammar::{Grammar, RuleId, Symbol};

/// An ordered, rule-annotated derivation tree.
///
/// Internal nodes record the id of the rule applied at them. Leaves are
/// terminals, or nonterminal slots when the tree is a template (for example
/// the expansion of an idiom).
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct ParseTree {
    pub symbol: Symbol,
    pub rule: Option<RuleId>,
    pub children: Vec<ParseTree>,
}

impl ParseTree {
    pub fn leaf(symbol: Symbol) -> Self {
        ParseTree { symbol, rule: None, children: Vec::new() }
    }

    pub fn node(symbol: Symbol, rule: RuleId, children: Vec<ParseTree>) -> Self {
        ParseTree { symbol, rule: Some(rule), children }
    }

    /// Builds the node for `rule` with the given children, taking the node
    /// symbol from the rule's left-hand side.
    pub fn apply(grammar: &Grammar, rule: RuleId, children: Vec<ParseTree>) -> Self {
        let lhs = grammar.rule(rule).expect("rule exists").lhs.clone();
        ParseTree::node(lhs, rule, children)
    }

    /// Depth-1 tree for `rule`: every right-hand side symbol becomes a leaf.
    pub fn depth_one(grammar: &Grammar, rule: RuleId) -> Self {
        let r = grammar.rule(rule).expect("rule exists");
        ParseTree::node(r.lhs.clone(), rule, r.rhs.iter().cloned().map(ParseTree::leaf).collect())
    }

    pub fn is_internal(&self) -> bool {
        self.rule.is_some()
    }

    pub fn internal_count(&self) -> usize {
        let mut n = 0;
        self.walk(&mut |t| {
            if t.is_internal() {
                n += 1;
            }
        });
        n
    }

    /// Left-to-right leaf symbols. For a complete tree this is its yield.
    pub fn frontier(&self) -> Vec<Symbol> {
        let mut out = Vec::new();
        self.walk(&mut |t| {
            if t.children.is_empty() && !t.is_internal() {
                out.push(t.symbol.clone());
            }
        });
        out
    }

    /// Terminal leaves, left to right.
    pub fn yield_terminals(&self) -> Vec<&str> {
        fn go<'a>(t: &'a ParseTree, out: &mut Vec<&'a str>) {
            if t.children.is_empty() && t.symbol.is_terminal() {
                out.push(t.symbol.name());
            }
            for c in &t.children {
                go(c, out);
            }
        }
        let mut out = Vec::new();
        go(self, &mut out);
        out
    }

    /// Pre-order visit of every node.
    pub fn walk<'a>(&'a self, f: &mut impl FnMut(&'a ParseTree)) {
        let mut stack = vec![self];
        while let Some(t) = stack.pop() {
            f(t);
            stack.extend(t.children.iter().rev());
        }
    }

    pub fn node_at(&self, path: &[usize]) -> Option<&ParseTree> {
        path.iter().try_fold(self, |t, &i| t.children.get(i))
    }

    pub fn rule_sequence(&self) -> RuleSequence {
        rule_sequence(self)
    }
}

impl fmt::Debug for ParseTree {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&crate::treefile::serialize_tree(self))
    }
}

/// Pre-order list of applied rules; its length is the number of decoding
/// steps needed to produce the tree.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Default)]
pub struct RuleSequence(pub Vec<RuleId>);

impl RuleSequence {
    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }
}

pub fn rule_sequence(tree: &ParseTree) -> RuleSequence {
    let mut out = Vec::new();
    tree.walk(&mut |t| out.extend(t.rule));
    RuleSequence(out)
}

/// Rebuilds a tree from its rule sequence rooted at the grammar's start
/// symbol, always expanding the leftmost open nonterminal.
pub fn replay(sequence: &RuleSequence, grammar: &Grammar) -> Result<ParseTree, ReplayError> {
    replay_from(sequence, grammar, grammar.start())
}

pub fn replay_from(sequence: &RuleSequence, grammar: &Grammar, root: &Symbol) -> Result<ParseTree, ReplayError> {
    if sequence.is_empty() {
        return Err(ReplayError::Empty);
    }
    let mut rules = sequence.0.iter().copied();
    let tree = expand(root, &mut rules, grammar)?;
    let rest = rules.count();
    if rest > 0 {
        return Err(ReplayError::Leftover(rest));
    }
    Ok(tree)
}

fn expand(
    symbol: &Symbol,
    rules: &mut impl Iterator<Item = RuleId>,
    grammar: &Grammar,
) -> Result<ParseTree, ReplayError> {
    let id = rules.next().ok_or_else(|| ReplayError::PrematureExhaustion(symbol.name().to_string()))?;
    let rule = grammar.rule(id).ok_or(ReplayError::UnknownRule(id))?;
    if rule.lhs != *symbol {
        return Err(ReplayError::Inapplicable {
            rule: id,
            expected: symbol.name().to_string(),
            found: rule.lhs.name().to_string(),
        });
    }
    let mut children = Vec::with_capacity(rule.rhs.len());
    for sym in &rule.rhs {
        if sym.is_terminal() {
            children.push(ParseTree::leaf(sym.clone()));
        } else {
            children.push(expand(sym, rules, grammar)?);
        }
    }
    Ok(ParseTree::node(symbol.clone(), id, children))
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ViolationKind {
    UnknownRule(RuleId),
    /// The node's symbol is not the applied rule's left-hand side.
    LhsMismatch,
    /// The children's symbols differ from the applied rule's right-hand side.
    RhsMismatch,
    TerminalWithChildren,
    /// A nonterminal leaf in a tree that should be complete.
    UnexpandedNonterminal,
    /// A leaf without a rule that nonetheless has children.
    ChildrenWithoutRule,
    UnknownSymbol,
}

impl fmt::Display for ViolationKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ViolationKind::UnknownRule(id) => write!(f, "unknown rule id {id}"),
            ViolationKind::LhsMismatch => f.write_str("lhs mismatch"),
            ViolationKind::RhsMismatch => f.write_str("rhs mismatch"),
            ViolationKind::TerminalWithChildren => f.write_str("terminal with children"),
            ViolationKind::UnexpandedNonterminal => f.write_str("unexpanded nonterminal"),
            ViolationKind::ChildrenWithoutRule => f.write_str("children without applied rule"),
            ViolationKind::UnknownSymbol => f.write_str("unknown symbol"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Violation {
    /// Child indices from the root to the offending node.
    pub path: Vec<usize>,
    pub kind: ViolationKind,
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:?}: {}", self.path, self.kind)
    }
}

/// Checks a complete tree: every leaf is a terminal and every internal node
/// matches its applied rule.
pub fn validate_tree(tree: &ParseTree, grammar: &Grammar) -> Result<(), Vec<Violation>> {
    validate(tree, grammar, false)
}

/// Like [`validate_tree`] but accepts nonterminal leaves as open slots.
pub fn validate_template(tree: &ParseTree, grammar: &Grammar) -> Result<(), Vec<Violation>> {
    validate(tree, grammar, true)
}

fn validate(tree: &ParseTree, grammar: &Grammar, slots: bool) -> Result<(), Vec<Violation>> {
    let mut out = Vec::new();
    let mut path = Vec::new();
    check(tree, grammar, slots, &mut path, &mut out);
    if out.is_empty() {
        Ok(())
    } else {
        Err(out)
    }
}

fn check(t: &ParseTree, grammar: &Grammar, slots: bool, path: &mut Vec<usize>, out: &mut Vec<Violation>) {
    let mut report = |kind| out.push(Violation { path: path.clone(), kind });
    if !grammar.contains(&t.symbol) {
        report(ViolationKind::UnknownSymbol);
    }
    match t.rule {
        None if t.symbol.is_terminal() => {
            if !t.children.is_empty() {
                report(ViolationKind::TerminalWithChildren);
            }
        }
        None => {
            if !t.children.is_empty() {
                report(ViolationKind::ChildrenWithoutRule);
            } else if !slots {
                report(ViolationKind::UnexpandedNonterminal);
            }
        }
        Some(id) => {
            if t.symbol.is_terminal() {
                report(ViolationKind::TerminalWithChildren);
            }
            match grammar.rule(id) {
                None => report(ViolationKind::UnknownRule(id)),
                Some(rule) => {
                    if rule.lhs != t.symbol {
                        report(ViolationKind::LhsMismatch);
                    }
                    let same = rule.rhs.len() == t.children.len()
                        && rule.rhs.iter().zip(&t.children).all(|(s, c)| *s == c.symbol);
                    if !same {
                        report(ViolationKind::RhsMismatch);
                    }
                }
            }
        }
    }
    for (i, c) in t.children.iter().enumerate() {
        path.push(i);
        check(c, grammar, slots, path, out);
        path.pop();
    }
}
