//! Mined idioms, their expansion back to base rules, and the idiom file.

use serde::{Deserialize, Serialize};

use crate::error::{IdiomFileError, MineError};
use crate::grammar::{Grammar, ProductionRule, RuleId, FORMAT_VERSION};
use crate::miner::{collapsed_rule, Depth2Pattern, MinerConfig};
use crate::tree::ParseTree;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Idiom {
    /// Extraction order, starting at 1.
    pub rank: u32,
    pub rule: ProductionRule,
    /// The pattern this idiom collapsed.
    pub provenance: Depth2Pattern,
    /// Occurrences of the pattern when it was extracted.
    pub support: u64,
}

/// Idioms in rank order, tied to the base grammar they were mined under.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct IdiomSet {
    idioms: Vec<Idiom>,
    fingerprint: String,
    base_rules: usize,
    config: MinerConfig,
}

impl IdiomSet {
    pub(crate) fn from_parts(idioms: Vec<Idiom>, grammar: &Grammar, config: MinerConfig) -> Self {
        IdiomSet {
            idioms,
            fingerprint: grammar.fingerprint().to_string(),
            base_rules: grammar.base_rule_count(),
            config,
        }
    }

    /// An empty set for `grammar`.
    pub fn empty(grammar: &Grammar) -> Self {
        IdiomSet::from_parts(Vec::new(), grammar, MinerConfig { n: 0, ..Default::default() })
    }

    pub fn len(&self) -> usize {
        self.idioms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.idioms.is_empty()
    }

    pub fn iter(&self) -> std::slice::Iter<'_, Idiom> {
        self.idioms.iter()
    }

    /// Idiom by 1-based rank.
    pub fn get(&self, rank: u32) -> Option<&Idiom> {
        rank.checked_sub(1).and_then(|i| self.idioms.get(i as usize))
    }

    /// The idiom registered under `id`, if `id` is an idiom rule.
    pub fn by_rule(&self, id: RuleId) -> Option<&Idiom> {
        id.index().checked_sub(self.base_rules).and_then(|i| self.idioms.get(i))
    }

    pub fn fingerprint(&self) -> &str {
        &self.fingerprint
    }

    pub fn base_rule_count(&self) -> usize {
        self.base_rules
    }

    pub fn config(&self) -> &MinerConfig {
        &self.config
    }

    /// The first `k` idioms. Panics if `k > len()`.
    pub fn prefix(&self, k: usize) -> IdiomSet {
        IdiomSet {
            idioms: self.idioms[..k].to_vec(),
            fingerprint: self.fingerprint.clone(),
            base_rules: self.base_rules,
            config: self.config.clone(),
        }
    }

    /// `base` with this set's idiom rules appended.
    pub fn augment(&self, base: &Grammar) -> Grammar {
        let mut g = base.base();
        for idiom in &self.idioms {
            let id = g.push_idiom_rule(idiom.rule.lhs.clone(), idiom.rule.rhs.clone(), idiom.rank);
            debug_assert_eq!(id, idiom.rule.id);
        }
        g
    }

    /// Base-grammar template witnessing the idiom's derivation: nonterminal
    /// leaves are slots, the frontier equals the idiom's right-hand side and
    /// it applies at least two base rules.
    pub fn expand_idiom(&self, idiom: &Idiom, grammar: &Grammar) -> Result<ParseTree, MineError> {
        if self.get(idiom.rank) != Some(idiom) {
            return Err(MineError::UnknownIdiom(idiom.rank));
        }
        self.template(idiom.rule.id, grammar)
    }

    /// Template for any rule id: depth one for base rules, recursively
    /// expanded provenance for idiom rules.
    pub fn template(&self, id: RuleId, grammar: &Grammar) -> Result<ParseTree, MineError> {
        if id.index() < self.base_rules {
            if grammar.rule(id).is_none() {
                return Err(MineError::UnknownRule(id));
            }
            return Ok(ParseTree::depth_one(grammar, id));
        }
        let idiom = self.by_rule(id).ok_or(MineError::UnknownRule(id))?;
        let p = idiom.provenance;
        for r in [p.parent, p.child] {
            if r >= id {
                return Err(MineError::DanglingProvenance { rank: idiom.rank, rule: r });
            }
        }
        let mut tree = self.template(p.parent, grammar)?;
        let child = self.template(p.child, grammar)?;
        if !replace_frontier_leaf(&mut tree, p.child_pos as usize, child) {
            return Err(MineError::PositionOutOfRange { rule: p.parent, pos: p.child_pos });
        }
        Ok(tree)
    }

    pub fn to_file(&self) -> IdiomFile {
        IdiomFile {
            format_version: FORMAT_VERSION,
            grammar_fingerprint: self.fingerprint.clone(),
            config: ConfigRecord::from(&self.config),
            idioms: self
                .idioms
                .iter()
                .map(|i| IdiomRecord {
                    rank: i.rank,
                    rule_id: i.rule.id.0,
                    lhs: i.rule.lhs.name().to_string(),
                    rhs: i.rule.rhs.iter().map(|s| s.name().to_string()).collect(),
                    provenance: i.provenance,
                    support: i.support,
                })
                .collect(),
        }
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(&self.to_file()).expect("idiom file serializes");
        s.push('\n');
        s
    }

    /// Loads an idiom file against its base grammar. The fingerprint must
    /// match and every record must equal the collapse of its provenance.
    pub fn from_file(file: &IdiomFile, grammar: &Grammar) -> Result<IdiomSet, IdiomFileError> {
        if file.format_version != FORMAT_VERSION {
            return Err(IdiomFileError::FormatVersion(file.format_version));
        }
        if file.grammar_fingerprint != grammar.fingerprint() {
            return Err(IdiomFileError::FingerprintMismatch {
                file: file.grammar_fingerprint.clone(),
                grammar: grammar.fingerprint().to_string(),
            });
        }
        let config = file.config.to_config()?;
        let mut g = grammar.base();
        let mut idioms = Vec::with_capacity(file.idioms.len());
        for (index, rec) in file.idioms.iter().enumerate() {
            if rec.rank as usize != index + 1 {
                return Err(IdiomFileError::Rank { index, expected: file.idioms.len(), found: rec.rank });
            }
            let p = rec.provenance;
            let next = RuleId(g.rules().len() as u32);
            for r in [p.parent, p.child] {
                if r >= next {
                    return Err(IdiomFileError::Provenance {
                        rank: rec.rank,
                        source: MineError::DanglingProvenance { rank: rec.rank, rule: r },
                    });
                }
            }
            let (lhs, rhs) =
                collapsed_rule(&p, &g).map_err(|source| IdiomFileError::Provenance { rank: rec.rank, source })?;
            let derived_names: Vec<&str> = rhs.iter().map(|s| s.name()).collect();
            if lhs.name() != rec.lhs || derived_names != rec.rhs || rec.rule_id != next.0 {
                return Err(IdiomFileError::RuleMismatch {
                    rank: rec.rank,
                    recorded: format!("{}@{} -> {}", rec.lhs, rec.rule_id, rec.rhs.join(" ")),
                    derived: format!("{}@{} -> {}", lhs.name(), next, derived_names.join(" ")),
                });
            }
            let id = g.push_idiom_rule(lhs, rhs, rec.rank);
            idioms.push(Idiom {
                rank: rec.rank,
                rule: g.rule(id).expect("registered").clone(),
                provenance: p,
                support: rec.support,
            });
        }
        Ok(IdiomSet::from_parts(idioms, grammar, config))
    }

    pub fn from_json(text: &str, grammar: &Grammar) -> Result<IdiomSet, IdiomFileError> {
        let file: IdiomFile = serde_json::from_str(text)?;
        IdiomSet::from_file(&file, grammar)
    }
}

impl<'a> IntoIterator for &'a IdiomSet {
    type Item = &'a Idiom;
    type IntoIter = std::slice::Iter<'a, Idiom>;

    fn into_iter(self) -> Self::IntoIter {
        self.idioms.iter()
    }
}

/// Replaces the `index`-th frontier leaf with `with`; the leaf must be a
/// nonterminal slot.
fn replace_frontier_leaf(tree: &mut ParseTree, index: usize, with: ParseTree) -> bool {
    fn find(t: &ParseTree, remaining: &mut usize, path: &mut Vec<usize>) -> bool {
        if t.rule.is_none() && t.children.is_empty() {
            if *remaining == 0 {
                return true;
            }
            *remaining -= 1;
            return false;
        }
        for (i, c) in t.children.iter().enumerate() {
            path.push(i);
            if find(c, remaining, path) {
                return true;
            }
            path.pop();
        }
        false
    }
    let mut path = Vec::new();
    let mut remaining = index;
    if !find(tree, &mut remaining, &mut path) {
        return false;
    }
    let slot = path.iter().fold(tree, |t, &i| &mut t.children[i]);
    if !slot.symbol.is_nonterminal() || slot.symbol != with.symbol {
        return false;
    }
    *slot = with;
    true
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct IdiomFile {
    pub format_version: u32,
    pub grammar_fingerprint: String,
    pub config: ConfigRecord,
    pub idioms: Vec<IdiomRecord>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ConfigRecord {
    pub n: usize,
    pub min_count: u64,
    pub tie_break: String,
    pub identifier_idioms: bool,
    /// Always `"overlapping"`: every (node, expanded child) incidence counts.
    pub counting: String,
}

impl From<&MinerConfig> for ConfigRecord {
    fn from(c: &MinerConfig) -> Self {
        ConfigRecord {
            n: c.n,
            min_count: c.min_count,
            tie_break: c.tie_break.name().to_string(),
            identifier_idioms: c.identifier_idioms,
            counting: "overlapping".to_string(),
        }
    }
}

impl ConfigRecord {
    fn to_config(&self) -> Result<MinerConfig, IdiomFileError> {
        let tie_break = crate::miner::TieBreak::parse(&self.tie_break)
            .ok_or_else(|| IdiomFileError::TieBreak(self.tie_break.clone()))?;
        Ok(MinerConfig { n: self.n, min_count: self.min_count, tie_break, identifier_idioms: self.identifier_idioms })
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct IdiomRecord {
    pub rank: u32,
    pub rule_id: u32,
    pub lhs: String,
    pub rhs: Vec<String>,
    pub provenance: Depth2Pattern,
    pub support: u64,
}
