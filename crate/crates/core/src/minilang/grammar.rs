//! The built-in grammar for the statement language.
//!
//! Structural rules are fixed and numbered in table order. Identifiers,
//! integer and string literals enter through lexical rules
//! (`Ident -> "println"`), appended after the structural rules: first the
//! demo-corpus vocabulary, then any new spelling the parser meets.

use std::collections::HashMap;

use crate::error::GrammarError;
use crate::grammar::{Grammar, RuleId, Symbol};

macro_rules! productions {
    ($($name:ident: $lhs:literal -> [$($rhs:literal),* $(,)?];)*) => {
        /// Structural productions of the built-in grammar; the discriminant is
        /// the rule id.
        #[derive(Debug, Clone, Copy, PartialEq, Eq)]
        #[repr(u32)]
        pub enum Prod { $($name),* }

        pub(crate) const PRODUCTIONS: &[(&str, &[&str])] = &[$(($lhs, &[$($rhs),*])),*];
    };
}

productions! {
    Program: "Program" -> ["BlockStmts"];
    StmtsCons: "BlockStmts" -> ["BlockStmt", "BlockStmts"];
    StmtsOne: "BlockStmts" -> ["BlockStmt"];
    DeclStmt: "BlockStmt" -> ["LocalVarDecl", ";"];
    PlainStmt: "BlockStmt" -> ["Statement"];
    LocalVarDecl: "LocalVarDecl" -> ["Type", "VarDecl"];
    VarInit: "VarDecl" -> ["Ident", "=", "Expr"];
    VarBare: "VarDecl" -> ["Ident"];
    TypeInt: "Type" -> ["int"];
    TypeBool: "Type" -> ["boolean"];
    TypeClass: "Type" -> ["ClassType"];
    ClassType: "ClassType" -> ["Ident"];
    StmtBlock: "Statement" -> ["Block"];
    StmtIfElse: "Statement" -> ["if", "ParExpr", "Statement", "IfOrElse"];
    StmtIf: "Statement" -> ["if", "ParExpr", "Statement"];
    StmtWhile: "Statement" -> ["while", "ParExpr", "Statement"];
    StmtFor: "Statement" -> ["for", "(", "ForInit", ";", "Expr", ";", "ForUpdate", ")", "Statement"];
    StmtTry: "Statement" -> ["try", "Block", "Catches"];
    StmtThrow: "Statement" -> ["throw", "Expr", ";"];
    StmtReturn: "Statement" -> ["return", "Expr", ";"];
    StmtReturnVoid: "Statement" -> ["return", ";"];
    StmtExpr: "Statement" -> ["StmtExpr", ";"];
    Else: "IfOrElse" -> ["else", "Statement"];
    Block: "Block" -> ["{", "BlockStmts", "}"];
    BlockEmpty: "Block" -> ["{", "}"];
    CatchesCons: "Catches" -> ["CatchClause", "Catches"];
    CatchesOne: "Catches" -> ["CatchClause"];
    CatchClause: "CatchClause" -> ["catch", "(", "ClassType", "Ident", ")", "Block"];
    ForInitDecl: "ForInit" -> ["LocalVarDecl"];
    ForInitExpr: "ForInit" -> ["StmtExpr"];
    ForUpdate: "ForUpdate" -> ["StmtExpr"];
    ParExpr: "ParExpr" -> ["(", "Expr", ")"];
    SeAssign: "StmtExpr" -> ["Assignment"];
    SeCall: "StmtExpr" -> ["Call"];
    SeIncr: "StmtExpr" -> ["Name", "++"];
    SeDecr: "StmtExpr" -> ["Name", "--"];
    Assignment: "Assignment" -> ["Name", "=", "Expr"];
    Expr: "Expr" -> ["OrExpr"];
    OrCons: "OrExpr" -> ["OrExpr", "||", "AndExpr"];
    OrOne: "OrExpr" -> ["AndExpr"];
    AndCons: "AndExpr" -> ["AndExpr", "&&", "EqExpr"];
    AndOne: "AndExpr" -> ["EqExpr"];
    EqEq: "EqExpr" -> ["RelExpr", "==", "RelExpr"];
    EqNe: "EqExpr" -> ["RelExpr", "!=", "RelExpr"];
    EqOne: "EqExpr" -> ["RelExpr"];
    RelLt: "RelExpr" -> ["AddExpr", "<", "AddExpr"];
    RelGt: "RelExpr" -> ["AddExpr", ">", "AddExpr"];
    RelLe: "RelExpr" -> ["AddExpr", "<=", "AddExpr"];
    RelGe: "RelExpr" -> ["AddExpr", ">=", "AddExpr"];
    RelOne: "RelExpr" -> ["AddExpr"];
    AddPlus: "AddExpr" -> ["AddExpr", "+", "MulExpr"];
    AddMinus: "AddExpr" -> ["AddExpr", "-", "MulExpr"];
    AddOne: "AddExpr" -> ["MulExpr"];
    MulTimes: "MulExpr" -> ["MulExpr", "*", "Unary"];
    MulDiv: "MulExpr" -> ["MulExpr", "/", "Unary"];
    MulMod: "MulExpr" -> ["MulExpr", "%", "Unary"];
    MulOne: "MulExpr" -> ["Unary"];
    Neg: "Unary" -> ["-", "Unary"];
    Not: "Unary" -> ["!", "Unary"];
    UnaryPrimary: "Unary" -> ["Primary"];
    PrimLiteral: "Primary" -> ["Literal"];
    PrimName: "Primary" -> ["Name"];
    PrimCall: "Primary" -> ["Call"];
    PrimNew: "Primary" -> ["NewExpr"];
    PrimParen: "Primary" -> ["ParExpr"];
    PrimThis: "Primary" -> ["this"];
    CallArgs: "Call" -> ["Name", "(", "Args", ")"];
    CallEmpty: "Call" -> ["Name", "(", ")"];
    NewArgs: "NewExpr" -> ["new", "ClassType", "(", "Args", ")"];
    NewEmpty: "NewExpr" -> ["new", "ClassType", "(", ")"];
    ArgsCons: "Args" -> ["Expr", ",", "Args"];
    ArgsOne: "Args" -> ["Expr"];
    NameDot: "Name" -> ["Name", ".", "Ident"];
    NameOne: "Name" -> ["Ident"];
    LitInt: "Literal" -> ["IntLit"];
    LitStr: "Literal" -> ["StrLit"];
    LitTrue: "Literal" -> ["true"];
    LitFalse: "Literal" -> ["false"];
    LitNull: "Literal" -> ["null"];
}

impl Prod {
    pub fn id(self) -> RuleId {
        RuleId(self as u32)
    }
}

/// Which lexical nonterminal a spelling belongs to.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum LexClass {
    Ident,
    IntLit,
    StrLit,
}

impl LexClass {
    pub fn nonterminal(self) -> &'static str {
        match self {
            LexClass::Ident => "Ident",
            LexClass::IntLit => "IntLit",
            LexClass::StrLit => "StrLit",
        }
    }
}

/// Spellings registered up front so that demo-corpus trees only use rules of
/// the `builtin:mini` grammar.
pub const IDENTIFIERS: &[&str] = &[
    "System",
    "out",
    "err",
    "println",
    "print",
    "i",
    "j",
    "k",
    "n",
    "x",
    "y",
    "z",
    "count",
    "total",
    "sum",
    "value",
    "result",
    "index",
    "size",
    "name",
    "items",
    "list",
    "data",
    "buffer",
    "flag",
    "limit",
    "left",
    "right",
    "node",
    "key",
    "e",
    "ex",
    "Exception",
    "IOException",
    "IllegalArgumentException",
    "IllegalStateException",
    "RuntimeException",
    "StringBuilder",
    "ArrayList",
    "HashMap",
    "Point",
    "File",
    "Scanner",
    "Reader",
    "String",
    "Integer",
    "process",
    "compute",
    "update",
    "reset",
    "close",
    "open",
    "log",
    "add",
    "put",
    "get",
    "append",
    "length",
    "parse",
    "validate",
    "valueOf",
    "toString",
    "init",
    "next",
    "hasNext",
    "read",
    "write",
    "handle",
    "apply",
];

pub const INT_LITERALS: &[&str] = &["0", "1", "2", "3", "5", "8", "10", "16", "42", "64", "100", "255", "1000"];

pub const STRING_LITERALS: &[&str] = &[
    "\"hi\"",
    "\"done\"",
    "\"error\"",
    "\"failed\"",
    "\"value: \"",
    "\"null argument\"",
    "\"index out of range\"",
    "\"starting\"",
    "\"finished\"",
    "\"invalid state\"",
    "\"not found\"",
    "\"ok\"",
    "\"retrying\"",
    "\"bad input\"",
];

/// The built-in grammar plus the table mapping spellings to lexical rules.
#[derive(Debug, Clone)]
pub struct MiniGrammar {
    grammar: Grammar,
    lexical: HashMap<(LexClass, String), RuleId>,
}

impl MiniGrammar {
    /// The `builtin:mini` grammar.
    pub fn new() -> Self {
        let mut nonterminals: Vec<&str> = Vec::new();
        for (lhs, _) in PRODUCTIONS {
            if !nonterminals.contains(lhs) {
                nonterminals.push(lhs);
            }
        }
        for class in [LexClass::Ident, LexClass::IntLit, LexClass::StrLit] {
            nonterminals.push(class.nonterminal());
        }
        let mut terminals: Vec<&str> = Vec::new();
        for (_, rhs) in PRODUCTIONS {
            for sym in *rhs {
                if !nonterminals.contains(sym) && !terminals.contains(sym) {
                    terminals.push(sym);
                }
            }
        }
        let rules: Vec<(&str, Vec<&str>)> = PRODUCTIONS.iter().map(|(l, r)| (*l, r.to_vec())).collect();
        let grammar =
            Grammar::new(&nonterminals, &terminals, "Program", &rules).expect("built-in grammar is well formed");
        let mut mini = MiniGrammar { grammar, lexical: HashMap::new() };
        for (class, words) in
            [(LexClass::Ident, IDENTIFIERS), (LexClass::IntLit, INT_LITERALS), (LexClass::StrLit, STRING_LITERALS)]
        {
            for w in words {
                mini.lexical_rule(class, w).expect("vocabulary is valid");
            }
        }
        mini
    }

    /// Reopens a grammar saved from an extended `builtin:mini`, so parsing
    /// can continue adding spellings to it.
    pub fn from_grammar(grammar: Grammar) -> Result<Self, GrammarError> {
        let base = grammar.base_rules();
        let structural_match = base.len() >= PRODUCTIONS.len()
            && grammar.start().name() == "Program"
            && PRODUCTIONS.iter().zip(base).all(|((lhs, rhs), rule)| {
                rule.lhs.name() == *lhs
                    && rule.rhs.len() == rhs.len()
                    && rule.rhs.iter().zip(rhs.iter()).all(|(a, b)| a.name() == *b)
            });
        if !structural_match || !grammar.idiom_rules().is_empty() {
            return Err(GrammarError::NotMini);
        }
        let mut lexical = HashMap::new();
        for rule in &base[PRODUCTIONS.len()..] {
            let class = [LexClass::Ident, LexClass::IntLit, LexClass::StrLit]
                .into_iter()
                .find(|c| c.nonterminal() == rule.lhs.name());
            match class {
                Some(c) if rule.is_lexical() => {
                    lexical.insert((c, rule.rhs[0].name().to_string()), rule.id);
                }
                _ => return Err(GrammarError::NotMini),
            }
        }
        Ok(MiniGrammar { grammar, lexical })
    }

    pub fn grammar(&self) -> &Grammar {
        &self.grammar
    }

    pub fn into_grammar(self) -> Grammar {
        self.grammar
    }

    /// Rule id for `class -> spelling`, registering the rule if new.
    pub fn lexical_rule(&mut self, class: LexClass, spelling: &str) -> Result<RuleId, GrammarError> {
        if let Some(&id) = self.lexical.get(&(class, spelling.to_string())) {
            return Ok(id);
        }
        let lhs = self.grammar.nonterminal(class.nonterminal()).expect("lexical class").clone();
        let id = self.grammar.push_base_rule(&lhs, vec![Symbol::terminal(spelling)])?;
        self.lexical.insert((class, spelling.to_string()), id);
        Ok(id)
    }

    /// Whether `spelling` is already registered under `class`.
    pub fn has_lexical(&self, class: LexClass, spelling: &str) -> bool {
        self.lexical.contains_key(&(class, spelling.to_string()))
    }
}

impl Default for MiniGrammar {
    fn default() -> Self {
        MiniGrammar::new()
    }
}
