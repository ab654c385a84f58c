//! Iterative idiom extraction.
//!
//! Each round counts every depth-2 pattern in the corpus, picks the most
//! frequent one, turns it into a new rule by splicing the child rule's
//! right-hand side into the parent's, and rewrites every occurrence in the
//! corpus to use the new rule. Later rounds may pick patterns whose parent or
//! child is an earlier idiom, which is how idioms deeper than two levels form.

use std::collections::HashMap;
use std::fmt;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::MineError;
use crate::grammar::{Grammar, RuleId, Symbol};
use crate::idioms::{Idiom, IdiomSet};
use crate::tree::ParseTree;

/// A parent rule application with one nonterminal child expanded by a
/// specific rule. All other children of the parent are left as they are, and
/// the child keeps its complete right-hand side.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Depth2Pattern {
    #[serde(rename = "parent_rule")]
    pub parent: RuleId,
    pub child_pos: u32,
    #[serde(rename = "child_rule")]
    pub child: RuleId,
}

impl Depth2Pattern {
    pub fn new(parent: u32, child_pos: u32, child: u32) -> Self {
        Depth2Pattern { parent: RuleId(parent), child_pos, child: RuleId(child) }
    }
}

impl fmt::Display for Depth2Pattern {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}, {}, {})", self.parent, self.child_pos, self.child)
    }
}

/// Occurrence counts of depth-2 patterns over a corpus.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct PatternCounts(pub HashMap<Depth2Pattern, u64>);

impl PatternCounts {
    pub fn get(&self, pattern: &Depth2Pattern) -> u64 {
        self.0.get(pattern).copied().unwrap_or(0)
    }

    pub fn total(&self) -> u64 {
        self.0.values().sum()
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    /// Entries ordered by pattern.
    pub fn sorted(&self) -> Vec<(Depth2Pattern, u64)> {
        let mut v: Vec<_> = self.0.iter().map(|(p, c)| (*p, *c)).collect();
        v.sort_unstable();
        v
    }

    fn merge(mut self, other: PatternCounts) -> PatternCounts {
        if self.0.len() < other.0.len() {
            return other.merge(self);
        }
        for (p, c) in other.0 {
            *self.0.entry(p).or_insert(0) += c;
        }
        self
    }
}

/// Order among equally frequent patterns.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
pub enum TieBreak {
    /// Smallest `(parent, child_pos, child)` triple wins.
    #[default]
    #[serde(rename = "lex-min")]
    LexMin,
    /// Largest triple wins.
    #[serde(rename = "lex-max")]
    LexMax,
}

impl TieBreak {
    pub fn name(self) -> &'static str {
        match self {
            TieBreak::LexMin => "lex-min",
            TieBreak::LexMax => "lex-max",
        }
    }

    pub fn parse(name: &str) -> Option<TieBreak> {
        match name {
            "lex-min" => Some(TieBreak::LexMin),
            "lex-max" => Some(TieBreak::LexMax),
            _ => None,
        }
    }

    /// True when `a` should be preferred over `b` at equal count.
    pub fn prefers(self, a: &Depth2Pattern, b: &Depth2Pattern) -> bool {
        match self {
            TieBreak::LexMin => a < b,
            TieBreak::LexMax => a > b,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct MinerConfig {
    /// Maximum number of idioms to extract.
    pub n: usize,
    /// Patterns seen fewer times than this are never extracted.
    pub min_count: u64,
    pub tie_break: TieBreak,
    /// Whether patterns whose child is a lexical rule (identifier or literal
    /// spelling) may become idioms.
    pub identifier_idioms: bool,
}

impl Default for MinerConfig {
    fn default() -> Self {
        MinerConfig { n: 200, min_count: 2, tie_break: TieBreak::LexMin, identifier_idioms: true }
    }
}

/// Counts every (internal node, internal child) incidence. Overlapping
/// occurrences all count. Runs on the ambient rayon pool.
pub fn count_patterns(corpus: &[ParseTree]) -> PatternCounts {
    corpus
        .par_iter()
        .fold(PatternCounts::default, |mut acc, tree| {
            count_into(tree, &mut acc.0);
            acc
        })
        .reduce(PatternCounts::default, PatternCounts::merge)
}

fn count_into(tree: &ParseTree, counts: &mut HashMap<Depth2Pattern, u64>) {
    tree.walk(&mut |node| {
        let Some(parent) = node.rule else { return };
        for (pos, child) in node.children.iter().enumerate() {
            if let Some(child) = child.rule {
                let key = Depth2Pattern { parent, child_pos: pos as u32, child };
                *counts.entry(key).or_insert(0) += 1;
            }
        }
    });
}

/// The most frequent pattern with at least `min_count` occurrences.
pub fn most_frequent(counts: &PatternCounts, min_count: u64, policy: TieBreak) -> Option<Depth2Pattern> {
    select(counts.0.iter().map(|(p, c)| (p, *c)), min_count, policy)
}

fn select<'a>(
    candidates: impl Iterator<Item = (&'a Depth2Pattern, u64)>,
    min_count: u64,
    policy: TieBreak,
) -> Option<Depth2Pattern> {
    let mut best: Option<(&Depth2Pattern, u64)> = None;
    for (p, c) in candidates {
        if c < min_count.max(1) {
            continue;
        }
        best = match best {
            Some((bp, bc)) if bc > c || (bc == c && !policy.prefers(p, bp)) => Some((bp, bc)),
            _ => Some((p, c)),
        };
    }
    best.map(|(p, _)| *p)
}

/// Left-hand side and right-hand side of the rule obtained by collapsing
/// `pattern`: the child nonterminal is replaced in place by the child rule's
/// right-hand side.
pub fn collapsed_rule(pattern: &Depth2Pattern, grammar: &Grammar) -> Result<(Symbol, Vec<Symbol>), MineError> {
    let parent = grammar.rule(pattern.parent).ok_or(MineError::UnknownRule(pattern.parent))?;
    let child = grammar.rule(pattern.child).ok_or(MineError::UnknownRule(pattern.child))?;
    let pos = pattern.child_pos as usize;
    let slot =
        parent.rhs.get(pos).ok_or(MineError::PositionOutOfRange { rule: pattern.parent, pos: pattern.child_pos })?;
    if !slot.is_nonterminal() || *slot != child.lhs {
        return Err(MineError::LhsMismatch {
            parent: pattern.parent,
            pos: pattern.child_pos,
            child: pattern.child,
            expected: slot.name().to_string(),
            found: child.lhs.name().to_string(),
        });
    }
    let mut rhs = Vec::with_capacity(parent.rhs.len() + child.rhs.len() - 1);
    rhs.extend_from_slice(&parent.rhs[..pos]);
    rhs.extend_from_slice(&child.rhs);
    rhs.extend_from_slice(&parent.rhs[pos + 1..]);
    Ok((parent.lhs.clone(), rhs))
}

/// Registers the collapse of `pattern` in `grammar` as idiom `rank`.
pub fn collapse_pattern(pattern: &Depth2Pattern, grammar: &mut Grammar, rank: u32) -> Result<RuleId, MineError> {
    let (lhs, rhs) = collapsed_rule(pattern, grammar)?;
    Ok(grammar.push_idiom_rule(lhs, rhs, rank))
}

/// Replaces every occurrence of `pattern` in `tree` by a single node applying
/// `new_rule`, scanning in pre-order. Returns the number of replacements, each
/// of which removes exactly one internal node.
pub fn rewrite_tree(tree: &mut ParseTree, pattern: &Depth2Pattern, new_rule: RuleId) -> usize {
    let pos = pattern.child_pos as usize;
    let mut n = 0;
    // A node is re-examined after each replacement before its children are
    // visited.
    while tree.rule == Some(pattern.parent) && tree.children.get(pos).is_some_and(|c| c.rule == Some(pattern.child)) {
        let child = tree.children.remove(pos);
        tree.children.splice(pos..pos, child.children);
        tree.rule = Some(new_rule);
        n += 1;
    }
    for c in &mut tree.children {
        if c.rule.is_some() {
            n += rewrite_tree(c, pattern, new_rule);
        }
    }
    n
}

/// Rewrites each tree independently; runs on the ambient rayon pool.
pub fn rewrite_corpus(corpus: &mut [ParseTree], pattern: &Depth2Pattern, new_rule: RuleId) -> usize {
    corpus.par_iter_mut().map(|t| rewrite_tree(t, pattern, new_rule)).sum()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum HaltReason {
    /// `n` idioms were extracted.
    Budget,
    /// No remaining pattern reached `min_count`.
    Exhausted,
}

impl fmt::Display for HaltReason {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            HaltReason::Budget => "idiom budget reached",
            HaltReason::Exhausted => "no pattern meets min_count",
        })
    }
}

/// Stepwise extraction over an owned, progressively rewritten corpus.
pub struct Miner {
    corpus: Vec<ParseTree>,
    grammar: Grammar,
    config: MinerConfig,
    idioms: Vec<Idiom>,
}

impl Miner {
    pub fn new(corpus: Vec<ParseTree>, grammar: &Grammar, config: MinerConfig) -> Self {
        Miner { corpus, grammar: grammar.base(), config, idioms: Vec::new() }
    }

    pub fn corpus(&self) -> &[ParseTree] {
        &self.corpus
    }

    /// Base grammar plus every idiom extracted so far.
    pub fn grammar(&self) -> &Grammar {
        &self.grammar
    }

    pub fn idioms(&self) -> &[Idiom] {
        &self.idioms
    }

    fn eligible(&self, pattern: &Depth2Pattern) -> bool {
        self.config.identifier_idioms || !self.grammar.rule(pattern.child).is_some_and(|r| r.is_lexical())
    }

    /// Picks the next pattern from fresh counts, without changing state.
    pub fn next_pattern(&self) -> Option<(Depth2Pattern, u64)> {
        let counts = count_patterns(&self.corpus);
        let pick = select(
            counts.0.iter().filter(|(p, _)| self.eligible(p)).map(|(p, c)| (p, *c)),
            self.config.min_count,
            self.config.tie_break,
        )?;
        Some((pick, counts.get(&pick)))
    }

    /// Runs one extraction round. Returns `None` once the budget is spent or
    /// no pattern qualifies.
    pub fn step(&mut self) -> Result<Option<&Idiom>, MineError> {
        if self.idioms.len() >= self.config.n {
            return Ok(None);
        }
        let Some((pattern, support)) = self.next_pattern() else { return Ok(None) };
        let rank = self.idioms.len() as u32 + 1;
        let id = collapse_pattern(&pattern, &mut self.grammar, rank)?;
        let applied = rewrite_corpus(&mut self.corpus, &pattern, id);
        debug_assert!(applied > 0);
        let rule = self.grammar.rule(id).expect("just registered").clone();
        self.idioms.push(Idiom { rank, rule, provenance: pattern, support });
        Ok(self.idioms.last())
    }

    pub fn finish(self) -> Extraction {
        let halt = if self.idioms.len() >= self.config.n { HaltReason::Budget } else { HaltReason::Exhausted };
        Extraction {
            idioms: IdiomSet::from_parts(self.idioms, &self.grammar, self.config),
            corpus: self.corpus,
            grammar: self.grammar,
            halt,
        }
    }
}

pub struct Extraction {
    pub idioms: IdiomSet,
    /// The input corpus after every extracted idiom was applied.
    pub corpus: Vec<ParseTree>,
    /// Base grammar plus idiom rules.
    pub grammar: Grammar,
    pub halt: HaltReason,
}

/// Extracts up to `config.n` idioms from `corpus`.
pub fn extract_idioms(corpus: Vec<ParseTree>, grammar: &Grammar, config: MinerConfig) -> Result<Extraction, MineError> {
    let mut miner = Miner::new(corpus, grammar, config);
    while miner.step()?.is_some() {}
    Ok(miner.finish())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grammar::Grammar;

    fn g() -> Grammar {
        Grammar::new(
            &["S", "A", "B", "E"],
            &["a", "b", "+", "y", "x"],
            "S",
            &[
                ("S", vec!["A", "B"]),
                ("A", vec!["a"]),
                ("B", vec!["b"]),
                ("E", vec!["E", "+", "y"]),
                ("E", vec!["x"]),
                ("S", vec!["A"]),
            ],
        )
        .unwrap()
    }

    fn ab(g: &Grammar) -> ParseTree {
        ParseTree::apply(g, RuleId(0), vec![ParseTree::depth_one(g, RuleId(1)), ParseTree::depth_one(g, RuleId(2))])
    }

    /// E -> E + y applied `k` times over E -> x.
    fn chain(g: &Grammar, k: usize) -> ParseTree {
        let mut t = ParseTree::depth_one(g, RuleId(4));
        for _ in 0..k {
            t = ParseTree::apply(
                g,
                RuleId(3),
                vec![t, ParseTree::leaf(Symbol::terminal("+")), ParseTree::leaf(Symbol::terminal("y"))],
            );
        }
        t
    }

    #[test]
    fn counts_three_copies() {
        let g = g();
        let corpus = vec![ab(&g), ab(&g), ab(&g)];
        let counts = count_patterns(&corpus);
        assert_eq!(counts.sorted(), vec![(Depth2Pattern::new(0, 0, 1), 3), (Depth2Pattern::new(0, 1, 2), 3)]);
    }

    #[test]
    fn single_rule_trees_have_no_patterns() {
        let g = g();
        let counts = count_patterns(&[ParseTree::depth_one(&g, RuleId(1)), ParseTree::depth_one(&g, RuleId(4))]);
        assert!(counts.is_empty());
    }

    #[test]
    fn chain_spine_counts() {
        let g = g();
        for k in 1..6 {
            let counts = count_patterns(&[chain(&g, k)]);
            assert_eq!(counts.get(&Depth2Pattern::new(3, 0, 3)), k as u64 - 1);
            assert_eq!(counts.get(&Depth2Pattern::new(3, 0, 4)), 1);
        }
    }

    #[test]
    fn most_frequent_and_ties() {
        let p1 = Depth2Pattern::new(0, 0, 1);
        let p2 = Depth2Pattern::new(0, 1, 2);
        let c = PatternCounts([(p1, 5), (p2, 3)].into_iter().collect());
        assert_eq!(most_frequent(&c, 2, TieBreak::LexMin), Some(p1));
        let c = PatternCounts([(p2, 5), (p1, 5)].into_iter().collect());
        assert_eq!(most_frequent(&c, 2, TieBreak::LexMin), Some(p1));
        assert_eq!(most_frequent(&c, 2, TieBreak::LexMax), Some(p2));
        let c = PatternCounts([(p2, 1), (p1, 1)].into_iter().collect());
        assert_eq!(most_frequent(&c, 2, TieBreak::LexMin), None);
        assert_eq!(most_frequent(&PatternCounts::default(), 1, TieBreak::LexMin), None);
    }

    #[test]
    fn collapse_unary_chain() {
        let mut g = g();
        let id = collapse_pattern(&Depth2Pattern::new(5, 0, 1), &mut g, 1).unwrap();
        assert_eq!(g.rule(id).unwrap().to_string(), "S -> a");
    }

    #[test]
    fn collapse_errors() {
        let g = g();
        assert!(matches!(collapsed_rule(&Depth2Pattern::new(0, 2, 1), &g), Err(MineError::PositionOutOfRange { .. })));
        assert!(matches!(collapsed_rule(&Depth2Pattern::new(0, 0, 2), &g), Err(MineError::LhsMismatch { .. })));
        assert!(matches!(collapsed_rule(&Depth2Pattern::new(3, 1, 4), &g), Err(MineError::LhsMismatch { .. })));
        assert!(matches!(collapsed_rule(&Depth2Pattern::new(0, 0, 77), &g), Err(MineError::UnknownRule(_))));
    }

    #[test]
    fn rewrite_one_occurrence_removes_one_node() {
        let mut g = g();
        let p = Depth2Pattern::new(0, 0, 1);
        let id = collapse_pattern(&p, &mut g, 1).unwrap();
        let mut t = ab(&g);
        let before = t.internal_count();
        assert_eq!(rewrite_tree(&mut t, &p, id), 1);
        assert_eq!(t.internal_count(), before - 1);
        assert_eq!(t.yield_terminals(), vec!["a", "b"]);
        assert_eq!(crate::tree::validate_tree(&t, &g), Ok(()));
    }

    #[test]
    fn rewrite_exhausts_self_overlapping_chains() {
        let mut g = g();
        let p = Depth2Pattern::new(3, 0, 3);
        let id = collapse_pattern(&p, &mut g, 1).unwrap();
        for k in 2..8 {
            let mut t = chain(&g, k);
            let y = t.yield_terminals().join(" ");
            let n = rewrite_tree(&mut t, &p, id);
            assert_eq!(n, k / 2);
            assert_eq!(count_patterns(std::slice::from_ref(&t)).get(&p), 0);
            assert_eq!(t.yield_terminals().join(" "), y);
        }
    }

    #[test]
    fn rewrite_without_match_is_identity() {
        let mut g = g();
        let p = Depth2Pattern::new(3, 0, 3);
        let id = collapse_pattern(&p, &mut g, 1).unwrap();
        let t = ab(&g);
        let mut u = t.clone();
        assert_eq!(rewrite_tree(&mut u, &p, id), 0);
        assert_eq!(u, t);
    }

    #[test]
    fn zero_budget_leaves_corpus_alone() {
        let g = g();
        let corpus = vec![ab(&g), ab(&g)];
        let ex = extract_idioms(corpus.clone(), &g, MinerConfig { n: 0, ..Default::default() }).unwrap();
        assert!(ex.idioms.is_empty());
        assert_eq!(ex.corpus, corpus);
        assert_eq!(ex.halt, HaltReason::Budget);
    }

    #[test]
    fn halts_when_nothing_repeats() {
        let g = g();
        let ex = extract_idioms(vec![ab(&g)], &g, MinerConfig::default()).unwrap();
        assert!(ex.idioms.is_empty());
        assert_eq!(ex.halt, HaltReason::Exhausted);
    }

    #[test]
    fn lexical_children_can_be_excluded() {
        let g = g();
        let corpus = vec![ab(&g), ab(&g), ab(&g)];
        let cfg = MinerConfig { identifier_idioms: false, ..Default::default() };
        let ex = extract_idioms(corpus.clone(), &g, cfg).unwrap();
        assert!(ex.idioms.is_empty());
        let ex = extract_idioms(corpus, &g, MinerConfig::default()).unwrap();
        assert_eq!(ex.idioms.len(), 2);
        assert_eq!(ex.idioms.get(1).unwrap().rule.to_string(), "S -> a B");
        assert_eq!(ex.idioms.get(2).unwrap().rule.to_string(), "S -> a b");
        assert_eq!(
            ex.idioms.get(2).unwrap().provenance,
            Depth2Pattern { parent: RuleId(6), child_pos: 1, child: RuleId(2) }
        );
        assert!(ex.corpus.iter().all(|t| t.internal_count() == 1));
    }
}
