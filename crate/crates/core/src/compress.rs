//! Applying a mined idiom set to trees and undoing it.

use std::collections::BTreeMap;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::CompressError;
use crate::grammar::{Grammar, FORMAT_VERSION};
use crate::idioms::IdiomSet;
use crate::miner::rewrite_tree;
use crate::tree::ParseTree;

/// An idiom set bound to its base grammar, with expansion templates
/// precomputed.
pub struct Compressor<'a> {
    idioms: &'a IdiomSet,
    base: Grammar,
    augmented: Grammar,
    templates: Vec<ParseTree>,
    fixpoint: bool,
}

impl<'a> Compressor<'a> {
    pub fn new(grammar: &Grammar, idioms: &'a IdiomSet) -> Result<Self, CompressError> {
        if grammar.fingerprint() != idioms.fingerprint() {
            return Err(CompressError::FingerprintMismatch {
                idioms: idioms.fingerprint().to_string(),
                grammar: grammar.fingerprint().to_string(),
            });
        }
        let base = grammar.base();
        let augmented = idioms.augment(&base);
        let templates = idioms.iter().map(|i| idioms.template(i.rule.id, &base)).collect::<Result<Vec<_>, _>>()?;
        Ok(Compressor { idioms, base, augmented, templates, fixpoint: false })
    }

    /// Keep sweeping the idiom list until no idiom applies. This is an
    /// extension; the default is a single pass in rank order.
    pub fn with_fixpoint(mut self, on: bool) -> Self {
        self.fixpoint = on;
        self
    }

    pub fn idioms(&self) -> &IdiomSet {
        self.idioms
    }

    /// Base grammar plus idiom rules.
    pub fn grammar(&self) -> &Grammar {
        &self.augmented
    }

    pub fn base_grammar(&self) -> &Grammar {
        &self.base
    }

    /// Applies every idiom in rank order, each exhaustively.
    pub fn compress_tree(&self, tree: &ParseTree) -> ParseTree {
        self.compress_counting(tree).0
    }

    /// Like [`compress_tree`](Self::compress_tree), also returning how many
    /// times each idiom fired (indexed by rank - 1).
    pub fn compress_counting(&self, tree: &ParseTree) -> (ParseTree, Vec<u64>) {
        let mut t = tree.clone();
        let mut fired = vec![0u64; self.idioms.len()];
        loop {
            let mut any = false;
            for (i, idiom) in self.idioms.iter().enumerate() {
                let n = rewrite_tree(&mut t, &idiom.provenance, idiom.rule.id) as u64;
                fired[i] += n;
                any |= n > 0;
            }
            if !self.fixpoint || !any {
                break;
            }
        }
        (t, fired)
    }

    /// Replaces every idiom node by its base-grammar template, filling the
    /// template's slots with the node's (expanded) children left to right.
    pub fn expand_tree(&self, tree: &ParseTree) -> Result<ParseTree, CompressError> {
        let children = tree.children.iter().map(|c| self.expand_tree(c)).collect::<Result<Vec<_>, _>>()?;
        let Some(id) = tree.rule else {
            return Ok(ParseTree { symbol: tree.symbol.clone(), rule: None, children });
        };
        if id.index() < self.base.base_rule_count() {
            return Ok(ParseTree::node(tree.symbol.clone(), id, children));
        }
        let template =
            self.templates.get(id.index() - self.base.base_rule_count()).ok_or(CompressError::UnknownRule(id))?;
        let arity = self.augmented.rule(id).map_or(0, |r| r.rhs.len());
        if arity != children.len() {
            return Err(CompressError::Arity { rule: id, expected: arity, found: children.len() });
        }
        let mut filled = template.clone();
        let mut children = children.into_iter();
        fill_frontier(&mut filled, &mut children);
        Ok(filled)
    }

    pub fn compress_corpus(&self, corpus: &[ParseTree]) -> (Vec<ParseTree>, CompressionReport) {
        let results: Vec<(ParseTree, Vec<u64>)> = corpus.par_iter().map(|t| self.compress_counting(t)).collect();
        let mut per_tree = Vec::with_capacity(corpus.len());
        let mut applications = vec![0u64; self.idioms.len()];
        let mut out = Vec::with_capacity(corpus.len());
        for (orig, (compressed, fired)) in corpus.iter().zip(results) {
            per_tree.push(TreeStats::new(orig.internal_count(), compressed.internal_count()));
            for (a, f) in applications.iter_mut().zip(&fired) {
                *a += f;
            }
            out.push(compressed);
        }
        (out, CompressionReport::new(per_tree, &applications))
    }

    /// One row per rank prefix size in `ks`.
    pub fn k_sweep(&self, corpus: &[ParseTree], ks: &[usize]) -> Result<Vec<SweepRow>, CompressError> {
        if ks.windows(2).any(|w| w[0] > w[1]) {
            return Err(CompressError::UnsortedSweep);
        }
        if let Some(&k) = ks.iter().find(|&&k| k > self.idioms.len()) {
            return Err(CompressError::KOutOfRange { k, available: self.idioms.len() });
        }
        ks.iter()
            .map(|&k| {
                let prefix = self.idioms.prefix(k);
                let c = Compressor::new(&self.base, &prefix)?.with_fixpoint(self.fixpoint);
                let (_, report) = c.compress_corpus(corpus);
                Ok(SweepRow {
                    k,
                    mean_ratio: report.mean_ratio,
                    total_before: report.total_before,
                    total_after: report.total_after,
                })
            })
            .collect()
    }
}

fn fill_frontier(t: &mut ParseTree, children: &mut impl Iterator<Item = ParseTree>) {
    if t.rule.is_none() && t.children.is_empty() {
        if let Some(c) = children.next() {
            *t = c;
        }
        return;
    }
    for c in &mut t.children {
        fill_frontier(c, children);
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TreeStats {
    /// Rules in the uncompressed derivation.
    pub before: usize,
    /// Rules after idiom application.
    pub after: usize,
    /// `1 - after / before`, or 0 for an empty derivation.
    pub ratio: f64,
}

impl TreeStats {
    pub fn new(before: usize, after: usize) -> Self {
        let ratio = if before == 0 { 0.0 } else { 1.0 - after as f64 / before as f64 };
        TreeStats { before, after, ratio }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CompressionReport {
    pub format_version: u32,
    pub trees: Vec<TreeStats>,
    pub mean_ratio: f64,
    pub median_ratio: f64,
    pub total_before: usize,
    pub total_after: usize,
    /// Times each idiom fired, keyed by rank. Idioms that never fired are
    /// omitted.
    pub idiom_applications: BTreeMap<u32, u64>,
}

impl CompressionReport {
    pub fn new(trees: Vec<TreeStats>, applications: &[u64]) -> Self {
        let n = trees.len();
        let mean_ratio = if n == 0 { 0.0 } else { trees.iter().map(|t| t.ratio).sum::<f64>() / n as f64 };
        let mut ratios: Vec<f64> = trees.iter().map(|t| t.ratio).collect();
        ratios.sort_by(f64::total_cmp);
        let median_ratio = match n {
            0 => 0.0,
            _ if n % 2 == 1 => ratios[n / 2],
            _ => (ratios[n / 2 - 1] + ratios[n / 2]) / 2.0,
        };
        CompressionReport {
            format_version: FORMAT_VERSION,
            total_before: trees.iter().map(|t| t.before).sum(),
            total_after: trees.iter().map(|t| t.after).sum(),
            trees,
            mean_ratio,
            median_ratio,
            idiom_applications: applications
                .iter()
                .enumerate()
                .filter(|(_, &a)| a > 0)
                .map(|(i, &a)| (i as u32 + 1, a))
                .collect(),
        }
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("report serializes");
        s.push('\n');
        s
    }

    /// Aligned plain-text summary.
    pub fn render_table(&self) -> String {
        let mut out = String::new();
        let rows = [
            ("trees", self.trees.len().to_string()),
            ("rules before", self.total_before.to_string()),
            ("rules after", self.total_after.to_string()),
            ("mean ratio", format!("{:.4}", self.mean_ratio)),
            ("median ratio", format!("{:.4}", self.median_ratio)),
            ("idioms fired", self.idiom_applications.len().to_string()),
        ];
        for (k, v) in rows {
            out.push_str(&format!("{k:<14}{v:>12}\n"));
        }
        out
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SweepRow {
    pub k: usize,
    pub mean_ratio: f64,
    pub total_before: usize,
    pub total_after: usize,
}

pub fn render_sweep(rows: &[SweepRow]) -> String {
    let mut out = format!("{:>6} {:>10} {:>12} {:>12}\n", "K", "mean_ratio", "rules_before", "rules_after");
    for r in rows {
        out.push_str(&format!("{:>6} {:>10.4} {:>12} {:>12}\n", r.k, r.mean_ratio, r.total_before, r.total_after));
    }
    out
}
