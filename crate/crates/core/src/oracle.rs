//! Naive reference implementations for cross-checking the miner.
//!
//! Nothing here shares counting or rewriting code with [`crate::miner`].
//! Inputs are expected to be small; the algorithms favour obviousness.

use std::collections::{BTreeMap, HashMap};

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::grammar::{Grammar, RuleId, Symbol};
use crate::idioms::{Idiom, IdiomSet};
use crate::miner::{Depth2Pattern, MinerConfig, PatternCounts, TieBreak};
use crate::tree::ParseTree;

/// Counts patterns by collecting all nodes post-order and then looking at
/// every (node, child index) pair.
pub fn brute_force_counts(corpus: &[ParseTree]) -> PatternCounts {
    fn collect<'a>(t: &'a ParseTree, out: &mut Vec<&'a ParseTree>) {
        for c in &t.children {
            collect(c, out);
        }
        out.push(t);
    }
    let mut nodes = Vec::new();
    for t in corpus {
        collect(t, &mut nodes);
    }
    let mut counts: BTreeMap<(u32, u32, u32), u64> = BTreeMap::new();
    for node in &nodes {
        for i in 0..node.children.len() {
            if let (Some(p), Some(c)) = (node.rule, node.children[i].rule) {
                *counts.entry((p.0, i as u32, c.0)).or_default() += 1;
            }
        }
    }
    PatternCounts(counts.into_iter().map(|((p, i, c), n)| (Depth2Pattern::new(p, i, c), n)).collect())
}

/// Literal transcription of the extraction loop: recount from scratch, pick
/// the winner by scanning a sorted list, rewrite one occurrence at a time by
/// full-tree rescans.
pub fn reference_extract(corpus: &[ParseTree], grammar: &Grammar, config: &MinerConfig) -> IdiomSet {
    let mut trees = corpus.to_vec();
    let mut g = grammar.base();
    let mut idioms = Vec::new();
    for rank in 1..=config.n as u32 {
        let mut sorted: Vec<(Depth2Pattern, u64)> = brute_force_counts(&trees).0.into_iter().collect();
        sorted.sort_by_key(|(p, _)| (p.parent.0, p.child_pos, p.child.0));
        if config.tie_break == TieBreak::LexMax {
            sorted.reverse();
        }
        let mut best: Option<(Depth2Pattern, u64)> = None;
        for (p, c) in sorted {
            let lexical = {
                let r = g.rule(p.child).unwrap();
                r.rhs.len() == 1 && r.rhs[0].is_terminal()
            };
            if c < config.min_count || (lexical && !config.identifier_idioms) {
                continue;
            }
            if best.is_none_or(|(_, bc)| c > bc) {
                best = Some((p, c));
            }
        }
        let Some((pattern, support)) = best else { break };

        let parent = g.rule(pattern.parent).unwrap().clone();
        let child = g.rule(pattern.child).unwrap().clone();
        let mut rhs = Vec::new();
        for (i, s) in parent.rhs.iter().enumerate() {
            if i == pattern.child_pos as usize {
                rhs.extend(child.rhs.iter().cloned());
            } else {
                rhs.push(s.clone());
            }
        }
        let id = g.push_idiom_rule(parent.lhs.clone(), rhs, rank);

        for t in &mut trees {
            while let Some(path) = first_occurrence(t, &pattern) {
                let mut node = &mut *t;
                for i in path {
                    node = &mut node.children[i];
                }
                let old = std::mem::take(&mut node.children);
                let mut new_children = Vec::new();
                for (i, c) in old.into_iter().enumerate() {
                    if i == pattern.child_pos as usize {
                        new_children.extend(c.children);
                    } else {
                        new_children.push(c);
                    }
                }
                node.children = new_children;
                node.rule = Some(id);
            }
        }
        idioms.push(Idiom { rank, rule: g.rule(id).unwrap().clone(), provenance: pattern, support });
    }
    IdiomSet::from_parts(idioms, &g, config.clone())
}

/// Path of the first pre-order node where `pattern` occurs.
fn first_occurrence(t: &ParseTree, pattern: &Depth2Pattern) -> Option<Vec<usize>> {
    let here = t.rule == Some(pattern.parent)
        && t.children.get(pattern.child_pos as usize).and_then(|c| c.rule) == Some(pattern.child);
    if here {
        return Some(Vec::new());
    }
    for (i, c) in t.children.iter().enumerate() {
        if let Some(mut p) = first_occurrence(c, pattern) {
            p.insert(0, i);
            return Some(p);
        }
    }
    None
}

/// Standard pair-merge BPE over token-id sequences. Overlapping pairs all
/// count; ties go to the smallest (or largest) `(left, right)` id pair.
/// Merged tokens get ids `vocab_size`, `vocab_size + 1`, ...; merges are
/// applied left to right.
pub fn reference_pair_bpe(
    sequences: &[Vec<u32>],
    vocab_size: u32,
    n: usize,
    min_count: u64,
    tie: TieBreak,
) -> Vec<(u32, u32)> {
    let mut seqs = sequences.to_vec();
    let mut merges = Vec::new();
    for k in 0..n {
        let mut counts: HashMap<(u32, u32), u64> = HashMap::new();
        for s in &seqs {
            for w in s.windows(2) {
                *counts.entry((w[0], w[1])).or_default() += 1;
            }
        }
        let best = counts.into_iter().filter(|&(_, c)| c >= min_count).max_by(|(pa, ca), (pb, cb)| {
            ca.cmp(cb).then_with(|| match tie {
                TieBreak::LexMin => pb.cmp(pa),
                TieBreak::LexMax => pa.cmp(pb),
            })
        });
        let Some(((a, b), _)) = best else { break };
        let merged = vocab_size + k as u32;
        for s in &mut seqs {
            let mut out = Vec::with_capacity(s.len());
            let mut i = 0;
            while i < s.len() {
                if i + 1 < s.len() && s[i] == a && s[i + 1] == b {
                    out.push(merged);
                    i += 2;
                } else {
                    out.push(s[i]);
                    i += 1;
                }
            }
            *s = out;
        }
        merges.push((a, b));
    }
    merges
}

/// Marker appended to every sequence in [`ChainCorpus`].
pub const END_TOKEN: &str = "</s>";

/// Token sequences encoded as right-branching chain trees.
///
/// Each token `t` owns one rule `Seq -> t Seq`, and the end marker owns
/// `Seq -> </s>`. A sequence `a b` becomes `Seq -> a (Seq -> b (Seq -> </s>))`.
/// Rule ids equal token ids (tokens in first-appearance order, end marker
/// last), so the depth-2 pattern `(a, 1, b)` is exactly the adjacent pair
/// `(a, b)` of the marker-terminated sequence.
pub struct ChainCorpus {
    pub grammar: Grammar,
    pub trees: Vec<ParseTree>,
    /// Token ids per sequence, end marker included.
    pub ids: Vec<Vec<u32>>,
    pub vocab: Vec<String>,
}

impl ChainCorpus {
    pub fn encode(sequences: &[Vec<String>]) -> ChainCorpus {
        let mut vocab: Vec<String> = Vec::new();
        for s in sequences {
            for t in s {
                assert_ne!(t, END_TOKEN, "token collides with the end marker");
                if !vocab.contains(t) {
                    vocab.push(t.clone());
                }
            }
        }
        vocab.push(END_TOKEN.to_string());
        let terminals: Vec<&str> = vocab.iter().map(String::as_str).collect();
        let end = vocab.len() - 1;
        let rules: Vec<(&str, Vec<&str>)> = terminals
            .iter()
            .enumerate()
            .map(|(i, t)| if i == end { ("Seq", vec![*t]) } else { ("Seq", vec![*t, "Seq"]) })
            .collect();
        let grammar = Grammar::new(&["Seq"], &terminals, "Seq", &rules).expect("chain grammar");
        let ids: Vec<Vec<u32>> = sequences
            .iter()
            .map(|s| {
                s.iter()
                    .map(|t| vocab.iter().position(|v| v == t).unwrap() as u32)
                    .chain(std::iter::once(end as u32))
                    .collect()
            })
            .collect();
        let trees = ids
            .iter()
            .map(|s| {
                let mut t = ParseTree::depth_one(&grammar, RuleId(end as u32));
                for &tok in s[..s.len() - 1].iter().rev() {
                    let leaf = ParseTree::leaf(grammar.terminal(&vocab[tok as usize]).unwrap().clone());
                    t = ParseTree::apply(&grammar, RuleId(tok), vec![leaf, t]);
                }
                t
            })
            .collect();
        ChainCorpus { grammar, trees, ids, vocab }
    }

    /// Number of base tokens, end marker included; also the id of the first
    /// merged token / idiom rule.
    pub fn vocab_size(&self) -> u32 {
        self.vocab.len() as u32
    }
}

/// Random token sequences over a small alphabet, used for the BPE property.
pub fn random_sequences(seed: u64) -> Vec<Vec<String>> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let alphabet = ["a", "b", "c", "d", "e"];
    let width = rng.gen_range(2..=alphabet.len());
    (0..rng.gen_range(1..=12))
        .map(|_| (0..rng.gen_range(1..=10)).map(|_| alphabet[rng.gen_range(0..width)].to_string()).collect())
        .collect()
}

/// A random grammar over `S, A, B, C` in which every nonterminal has a
/// terminal-only rule, plus up to 50 random derivations from `S`.
pub fn random_corpus(seed: u64) -> (Grammar, Vec<ParseTree>) {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let nts = ["S", "A", "B", "C"];
    let ts = ["a", "b", "c"];
    let mut rules: Vec<(&str, Vec<&str>)> = Vec::new();
    for nt in nts {
        let len = rng.gen_range(1..=2);
        rules.push((nt, (0..len).map(|_| *ts.choose(&mut rng).unwrap()).collect()));
        for _ in 0..rng.gen_range(1..=2) {
            let len = rng.gen_range(1..=3);
            let rhs = (0..len)
                .map(|_| if rng.gen_bool(0.6) { *nts.choose(&mut rng).unwrap() } else { *ts.choose(&mut rng).unwrap() })
                .collect();
            rules.push((nt, rhs));
        }
    }
    let grammar = Grammar::new(&nts, &ts, "S", &rules).expect("random grammar");
    let count = rng.gen_range(1..=50);
    let trees = (0..count).map(|_| random_tree(&grammar, grammar.start(), &mut rng, 5)).collect();
    (grammar, trees)
}

/// Random derivation of `root`. Beyond `max_depth` only rules without
/// nonterminals are chosen, if the nonterminal has one.
pub fn random_tree(grammar: &Grammar, root: &Symbol, rng: &mut impl Rng, max_depth: usize) -> ParseTree {
    let candidates: Vec<_> = grammar.base_rules().iter().filter(|r| &r.lhs == root).collect();
    let closed: Vec<_> = candidates.iter().filter(|r| r.rhs.iter().all(Symbol::is_terminal)).copied().collect();
    let pool = if max_depth == 0 && !closed.is_empty() { &closed } else { &candidates };
    let rule = pool.choose(rng).expect("nonterminal has rules");
    let children = rule
        .rhs
        .iter()
        .map(|s| {
            if s.is_terminal() {
                ParseTree::leaf(s.clone())
            } else {
                random_tree(grammar, s, rng, max_depth.saturating_sub(1))
            }
        })
        .collect();
    ParseTree::node(root.clone(), rule.id, children)
}

/// A hand-built if/else corpus over the mini grammar, plus a nested if/else
/// tree to compress with what it yields.
///
/// The corpus has three `if ( Expr ) Statement else Statement` skeletons and
/// one `if ( Expr ) Statement IfOrElse` whose else branch is left open, so
/// the `ParExpr` pattern (4 occurrences) is extracted before the `else`
/// pattern (3). `Expr` and `Statement` are unexpanded slots throughout. The
/// nested tree is an if/else whose else branch is another if with its
/// `IfOrElse` open: five rule applications before compression.
pub fn if_else_scenario() -> (Grammar, Vec<ParseTree>, ParseTree) {
    use crate::minilang::{MiniGrammar, Prod};
    let g = MiniGrammar::new().into_grammar();
    let slot = |name: &str| ParseTree::leaf(g.nonterminal(name).expect("mini nonterminal").clone());
    let t = |s: &str| ParseTree::leaf(Symbol::terminal(s));
    let par = || ParseTree::apply(&g, Prod::ParExpr.id(), vec![t("("), slot("Expr"), t(")")]);
    let if_else = |stmt: ParseTree, tail: ParseTree| {
        ParseTree::apply(&g, Prod::StmtIfElse.id(), vec![t("if"), par(), stmt, tail])
    };
    let else_of = |stmt: ParseTree| ParseTree::apply(&g, Prod::Else.id(), vec![t("else"), stmt]);

    let mut corpus: Vec<ParseTree> = (0..3).map(|_| if_else(slot("Statement"), else_of(slot("Statement")))).collect();
    corpus.push(if_else(slot("Statement"), slot("IfOrElse")));
    let nested = if_else(slot("Statement"), else_of(if_else(slot("Statement"), slot("IfOrElse"))));
    (g, corpus, nested)
}
