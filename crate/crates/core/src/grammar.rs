//! Symbols, production rules and grammars.
//!
//! A [`Grammar`] holds the base rules `R` of a context-free grammar together
//! with any idiom rules `I` appended by mining. Base rules get dense ids in
//! declaration order; idiom rules follow in extraction-rank order. The
//! [`Grammar::fingerprint`] covers the symbol inventory, start symbol and base
//! rules only, so a grammar keeps its fingerprint when idioms are appended.

use std::collections::HashMap;
use std::fmt;
use std::sync::Arc;

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::error::GrammarError;

/// Version tag written into every JSON file this crate produces.
pub const FORMAT_VERSION: u32 = 1;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SymbolKind {
    Nonterminal,
    Terminal,
}

/// A grammar symbol. Terminals carry their concrete lexeme as the name.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Symbol {
    name: Arc<str>,
    kind: SymbolKind,
}

impl Symbol {
    pub fn nonterminal(name: &str) -> Self {
        Symbol { name: name.into(), kind: SymbolKind::Nonterminal }
    }

    pub fn terminal(name: &str) -> Self {
        Symbol { name: name.into(), kind: SymbolKind::Terminal }
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn kind(&self) -> SymbolKind {
        self.kind
    }

    pub fn is_terminal(&self) -> bool {
        self.kind == SymbolKind::Terminal
    }

    pub fn is_nonterminal(&self) -> bool {
        self.kind == SymbolKind::Nonterminal
    }
}

impl fmt::Debug for Symbol {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.kind {
            SymbolKind::Nonterminal => write!(f, "{}", self.name),
            SymbolKind::Terminal => write!(f, "{:?}", &*self.name),
        }
    }
}

impl fmt::Display for Symbol {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.name)
    }
}

/// Index of a production rule inside its grammar.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(transparent)]
pub struct RuleId(pub u32);

impl RuleId {
    pub fn index(self) -> usize {
        self.0 as usize
    }
}

impl fmt::Display for RuleId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum RuleOrigin {
    Base,
    /// Extraction rank, starting at 1.
    Idiom(u32),
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct ProductionRule {
    pub id: RuleId,
    pub lhs: Symbol,
    pub rhs: Vec<Symbol>,
    pub origin: RuleOrigin,
}

impl ProductionRule {
    /// A rule whose right-hand side is a single terminal, such as
    /// `Ident -> "println"`. These are how identifiers and literals enter trees.
    pub fn is_lexical(&self) -> bool {
        self.rhs.len() == 1 && self.rhs[0].is_terminal()
    }

    pub fn is_idiom(&self) -> bool {
        matches!(self.origin, RuleOrigin::Idiom(_))
    }
}

impl fmt::Display for ProductionRule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} ->", self.lhs)?;
        for sym in &self.rhs {
            write!(f, " {sym}")?;
        }
        Ok(())
    }
}

#[derive(Debug, Clone)]
pub struct Grammar {
    symbols: Vec<Symbol>,
    nonterminals: HashMap<Arc<str>, Symbol>,
    terminals: HashMap<Arc<str>, Symbol>,
    rules: Vec<ProductionRule>,
    base_len: usize,
    start: Symbol,
    fingerprint: String,
}

impl Grammar {
    /// Builds a base grammar. Rule ids are the indices into `rules`.
    pub fn new(
        nonterminals: &[&str],
        terminals: &[&str],
        start: &str,
        rules: &[(&str, Vec<&str>)],
    ) -> Result<Self, GrammarError> {
        let mut builder = GrammarBuilder::default();
        for nt in nonterminals {
            builder.declare(Symbol::nonterminal(nt))?;
        }
        for t in terminals {
            builder.declare(Symbol::terminal(t))?;
        }
        let start = builder.lookup(start)?;
        if !start.is_nonterminal() {
            return Err(GrammarError::StartNotNonterminal(start.name().to_string()));
        }
        let mut resolved = Vec::with_capacity(rules.len());
        for (lhs, rhs) in rules {
            let lhs = builder.lookup(lhs)?;
            let rhs = rhs.iter().map(|s| builder.lookup(s)).collect::<Result<Vec<_>, _>>()?;
            resolved.push((lhs, rhs));
        }
        builder.finish(start, resolved)
    }

    pub fn start(&self) -> &Symbol {
        &self.start
    }

    pub fn symbols(&self) -> &[Symbol] {
        &self.symbols
    }

    pub fn rules(&self) -> &[ProductionRule] {
        &self.rules
    }

    pub fn base_rules(&self) -> &[ProductionRule] {
        &self.rules[..self.base_len]
    }

    pub fn idiom_rules(&self) -> &[ProductionRule] {
        &self.rules[self.base_len..]
    }

    pub fn base_rule_count(&self) -> usize {
        self.base_len
    }

    pub fn rule(&self, id: RuleId) -> Option<&ProductionRule> {
        self.rules.get(id.index())
    }

    pub fn nonterminal(&self, name: &str) -> Option<&Symbol> {
        self.nonterminals.get(name)
    }

    pub fn terminal(&self, name: &str) -> Option<&Symbol> {
        self.terminals.get(name)
    }

    pub fn contains(&self, symbol: &Symbol) -> bool {
        match symbol.kind() {
            SymbolKind::Nonterminal => self.nonterminals.contains_key(symbol.name()),
            SymbolKind::Terminal => self.terminals.contains_key(symbol.name()),
        }
    }

    /// Hex SHA-256 over the symbol inventory, start symbol and base rules.
    pub fn fingerprint(&self) -> &str {
        &self.fingerprint
    }

    /// Appends a base rule, introducing any unknown terminals on its
    /// right-hand side. Fails once idiom rules are present, since base ids
    /// must stay dense.
    pub fn push_base_rule(&mut self, lhs: &Symbol, rhs: Vec<Symbol>) -> Result<RuleId, GrammarError> {
        if self.base_len != self.rules.len() {
            return Err(GrammarError::BaseAfterIdioms);
        }
        if !lhs.is_nonterminal() || !self.contains(lhs) {
            return Err(GrammarError::UnknownSymbol(lhs.name().to_string()));
        }
        if rhs.is_empty() {
            return Err(GrammarError::EmptyRhs(lhs.name().to_string()));
        }
        for sym in &rhs {
            if self.contains(sym) {
                continue;
            }
            match sym.kind() {
                SymbolKind::Terminal => {
                    if self.nonterminals.contains_key(sym.name()) {
                        return Err(GrammarError::AmbiguousName(sym.name().to_string()));
                    }
                    self.terminals.insert(sym.name.clone(), sym.clone());
                    self.symbols.push(sym.clone());
                }
                SymbolKind::Nonterminal => return Err(GrammarError::UnknownSymbol(sym.name().to_string())),
            }
        }
        let id = RuleId(self.rules.len() as u32);
        self.rules.push(ProductionRule { id, lhs: lhs.clone(), rhs, origin: RuleOrigin::Base });
        self.base_len += 1;
        self.fingerprint = compute_fingerprint(&self.symbols, &self.start, self.base_rules());
        Ok(id)
    }

    /// Appends an idiom rule with the next free id. The caller is
    /// responsible for the rule being a collapse of existing rules.
    pub(crate) fn push_idiom_rule(&mut self, lhs: Symbol, rhs: Vec<Symbol>, rank: u32) -> RuleId {
        let id = RuleId(self.rules.len() as u32);
        self.rules.push(ProductionRule { id, lhs, rhs, origin: RuleOrigin::Idiom(rank) });
        id
    }

    /// A copy with every idiom rule removed.
    pub fn base(&self) -> Grammar {
        let mut g = self.clone();
        g.rules.truncate(self.base_len);
        g
    }

    pub fn to_file(&self) -> GrammarFile {
        let names = |kind| self.symbols.iter().filter(|s| s.kind() == kind).map(|s| s.name().to_string()).collect();
        GrammarFile {
            format_version: FORMAT_VERSION,
            nonterminals: names(SymbolKind::Nonterminal),
            terminals: names(SymbolKind::Terminal),
            start: self.start.name().to_string(),
            rules: self
                .base_rules()
                .iter()
                .map(|r| RuleRecord {
                    lhs: r.lhs.name().to_string(),
                    rhs: r.rhs.iter().map(|s| s.name().to_string()).collect(),
                })
                .collect(),
        }
    }

    pub fn from_file(file: &GrammarFile) -> Result<Self, GrammarError> {
        if file.format_version != FORMAT_VERSION {
            return Err(GrammarError::FormatVersion(file.format_version));
        }
        let nts: Vec<&str> = file.nonterminals.iter().map(String::as_str).collect();
        let ts: Vec<&str> = file.terminals.iter().map(String::as_str).collect();
        let rules: Vec<(&str, Vec<&str>)> =
            file.rules.iter().map(|r| (r.lhs.as_str(), r.rhs.iter().map(String::as_str).collect())).collect();
        Grammar::new(&nts, &ts, &file.start, &rules)
    }

    pub fn from_json(text: &str) -> Result<Self, GrammarError> {
        let file: GrammarFile = serde_json::from_str(text)?;
        Grammar::from_file(&file)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(&self.to_file()).expect("grammar file serializes")
    }

    /// Resolves a bare name to whichever symbol carries it.
    pub fn lookup(&self, name: &str) -> Option<&Symbol> {
        self.nonterminals.get(name).or_else(|| self.terminals.get(name))
    }
}

/// On-disk grammar layout. Rule ids are the array indices of `rules`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct GrammarFile {
    #[serde(default = "default_version")]
    pub format_version: u32,
    pub nonterminals: Vec<String>,
    pub terminals: Vec<String>,
    pub start: String,
    pub rules: Vec<RuleRecord>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct RuleRecord {
    pub lhs: String,
    pub rhs: Vec<String>,
}

fn default_version() -> u32 {
    FORMAT_VERSION
}

#[derive(Default)]
struct GrammarBuilder {
    symbols: Vec<Symbol>,
    nonterminals: HashMap<Arc<str>, Symbol>,
    terminals: HashMap<Arc<str>, Symbol>,
}

impl GrammarBuilder {
    fn declare(&mut self, sym: Symbol) -> Result<(), GrammarError> {
        let (same, other) = match sym.kind() {
            SymbolKind::Nonterminal => (&mut self.nonterminals, &self.terminals),
            SymbolKind::Terminal => (&mut self.terminals, &self.nonterminals),
        };
        // Rule right-hand sides name symbols without a kind marker, so a
        // name may belong to only one kind.
        if other.contains_key(sym.name()) {
            return Err(GrammarError::AmbiguousName(sym.name().to_string()));
        }
        if same.insert(sym.name.clone(), sym.clone()).is_some() {
            return Err(GrammarError::DuplicateSymbol(sym.name().to_string()));
        }
        if sym.is_nonterminal() && !valid_nonterminal_name(sym.name()) {
            return Err(GrammarError::BadNonterminalName(sym.name().to_string()));
        }
        self.symbols.push(sym);
        Ok(())
    }

    fn lookup(&self, name: &str) -> Result<Symbol, GrammarError> {
        self.nonterminals
            .get(name)
            .or_else(|| self.terminals.get(name))
            .cloned()
            .ok_or_else(|| GrammarError::UnknownSymbol(name.to_string()))
    }

    fn finish(self, start: Symbol, rules: Vec<(Symbol, Vec<Symbol>)>) -> Result<Grammar, GrammarError> {
        let mut out = Vec::with_capacity(rules.len());
        for (i, (lhs, rhs)) in rules.into_iter().enumerate() {
            if !lhs.is_nonterminal() {
                return Err(GrammarError::TerminalLhs(lhs.name().to_string()));
            }
            if rhs.is_empty() {
                return Err(GrammarError::EmptyRhs(lhs.name().to_string()));
            }
            out.push(ProductionRule { id: RuleId(i as u32), lhs, rhs, origin: RuleOrigin::Base });
        }
        let fingerprint = compute_fingerprint(&self.symbols, &start, &out);
        Ok(Grammar {
            symbols: self.symbols,
            nonterminals: self.nonterminals,
            terminals: self.terminals,
            base_len: out.len(),
            rules: out,
            start,
            fingerprint,
        })
    }
}

/// Nonterminal names appear unquoted in tree files, so they must not contain
/// characters the tree reader treats as delimiters.
pub(crate) fn valid_nonterminal_name(name: &str) -> bool {
    !name.is_empty() && !name.chars().any(|c| c.is_whitespace() || matches!(c, '(' | ')' | '"' | '@' | '\\'))
}

fn compute_fingerprint(symbols: &[Symbol], start: &Symbol, base: &[ProductionRule]) -> String {
    let mut hasher = Sha256::new();
    let mut put = |tag: u8, s: &str| {
        hasher.update([tag]);
        hasher.update((s.len() as u64).to_le_bytes());
        hasher.update(s.as_bytes());
    };
    for sym in symbols {
        put(if sym.is_terminal() { b't' } else { b'n' }, sym.name());
    }
    put(b's', start.name());
    for rule in base {
        put(b'l', rule.lhs.name());
        for sym in &rule.rhs {
            put(if sym.is_terminal() { b't' } else { b'n' }, sym.name());
        }
        put(b'.', "");
    }
    hex::encode(&hasher.finalize()[..16])
}

#[cfg(test)]
mod tests {
    use super::*;

    fn tiny() -> Grammar {
        Grammar::new(&["S", "A"], &["a", "b"], "S", &[("S", vec!["A", "b"]), ("A", vec!["a"]), ("S", vec!["a"])])
            .unwrap()
    }

    #[test]
    fn ids_follow_declaration_order() {
        let g = tiny();
        assert_eq!(g.rules()[1].id, RuleId(1));
        assert_eq!(g.rules()[1].to_string(), "A -> a");
        assert!(g.rules()[1].is_lexical());
        assert!(!g.rules()[0].is_lexical());
    }

    #[test]
    fn fingerprint_ignores_idioms_but_not_base_rules() {
        let mut g = tiny();
        let before = g.fingerprint().to_string();
        let s = g.nonterminal("S").unwrap().clone();
        g.push_idiom_rule(s.clone(), vec![Symbol::terminal("a"), Symbol::terminal("b")], 1);
        assert_eq!(g.fingerprint(), before);
        assert_eq!(g.idiom_rules().len(), 1);

        let mut h = tiny();
        h.push_base_rule(&s, vec![Symbol::terminal("zz")]).unwrap();
        assert_ne!(h.fingerprint(), before);
        assert!(h.terminal("zz").is_some());

        let other =
            Grammar::new(&["S", "A"], &["a", "b"], "S", &[("S", vec!["A", "b"]), ("A", vec!["b"]), ("S", vec!["a"])])
                .unwrap();
        assert_ne!(other.fingerprint(), before);
    }

    #[test]
    fn base_rules_cannot_follow_idioms() {
        let mut g = tiny();
        let s = g.nonterminal("S").unwrap().clone();
        g.push_idiom_rule(s.clone(), vec![Symbol::terminal("a")], 1);
        assert!(matches!(g.push_base_rule(&s, vec![Symbol::terminal("a")]), Err(GrammarError::BaseAfterIdioms)));
    }

    #[test]
    fn json_round_trip_keeps_fingerprint() {
        let g = tiny();
        let back = Grammar::from_json(&g.to_json()).unwrap();
        assert_eq!(back.fingerprint(), g.fingerprint());
        assert_eq!(back.rules(), g.rules());
    }

    #[test]
    fn rejects_bad_grammars() {
        assert!(matches!(Grammar::new(&["S"], &["S"], "S", &[]), Err(GrammarError::AmbiguousName(_))));
        assert!(matches!(Grammar::new(&["S"], &["a"], "S", &[("S", vec!["q"])]), Err(GrammarError::UnknownSymbol(_))));
        assert!(matches!(Grammar::new(&["S"], &["a"], "a", &[]), Err(GrammarError::StartNotNonterminal(_))));
        assert!(matches!(Grammar::new(&["S"], &["a"], "S", &[("a", vec!["S"])]), Err(GrammarError::TerminalLhs(_))));
        assert!(matches!(Grammar::new(&["S"], &["a"], "S", &[("S", vec![])]), Err(GrammarError::EmptyRhs(_))));
        assert!(matches!(Grammar::new(&["S x"], &["a"], "S x", &[]), Err(GrammarError::BadNonterminalName(_))));
        let mut file = tiny().to_file();
        file.format_version = 7;
        assert!(matches!(Grammar::from_file(&file), Err(GrammarError::FormatVersion(7))));
    }
}
