use thiserror::Error;

use super::grammar::{LexClass, MiniGrammar, Prod};
use super::lexer::{tokenize, LexError, Position, Token, TokenKind};
use crate::error::GrammarError;
use crate::grammar::Symbol;
use crate::tree::ParseTree;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ParseError {
    #[error(transparent)]
    Lex(#[from] LexError),
    #[error("{pos}: expected {}, found {found}", expected.join(" or "))]
    Syntax { pos: Position, expected: Vec<&'static str>, found: String },
    #[error("{pos}: {message}")]
    Lexical { pos: Position, message: String },
}

impl ParseError {
    pub fn position(&self) -> Position {
        match self {
            ParseError::Lex(e) => e.position(),
            ParseError::Syntax { pos, .. } | ParseError::Lexical { pos, .. } => *pos,
        }
    }

    /// The description without the leading `line:col: `.
    pub fn message(&self) -> String {
        let full = self.to_string();
        let prefix = format!("{}: ", self.position());
        full.strip_prefix(&prefix).map_or_else(|| full.clone(), str::to_string)
    }
}

type PResult<T> = Result<T, ParseError>;

/// Parses a program into a tree under `grammar`, registering lexical rules
/// for spellings the grammar does not know yet.
pub fn parse_program(source: &str, grammar: &mut MiniGrammar) -> PResult<ParseTree> {
    let tokens = tokenize(source)?;
    let end = tokens
        .last()
        .map(|t| Position { line: t.pos.line, col: t.pos.col + t.text.chars().count() })
        .unwrap_or(Position { line: 1, col: 1 });
    let mut p = Parser { tokens, pos: 0, grammar, end };
    let body = p.block_stmts(None)?;
    if let Some(t) = p.peek() {
        return Err(p.unexpected_at(t, vec!["statement"]));
    }
    Ok(p.node(Prod::Program, vec![body]))
}

struct Parser<'g> {
    tokens: Vec<Token>,
    pos: usize,
    grammar: &'g mut MiniGrammar,
    end: Position,
}

impl Parser<'_> {
    fn peek(&self) -> Option<&Token> {
        self.tokens.get(self.pos)
    }

    fn peek_at(&self, ahead: usize) -> Option<&Token> {
        self.tokens.get(self.pos + ahead)
    }

    fn is(&self, text: &str) -> bool {
        self.peek().is_some_and(|t| t.text == text && matches!(t.kind, TokenKind::Keyword | TokenKind::Punct))
    }

    fn is_kind(&self, ahead: usize, kind: TokenKind) -> bool {
        self.peek_at(ahead).is_some_and(|t| t.kind == kind)
    }

    fn unexpected_at(&self, t: &Token, expected: Vec<&'static str>) -> ParseError {
        ParseError::Syntax { pos: t.pos, expected, found: format!("`{}`", t.text) }
    }

    fn unexpected(&self, expected: Vec<&'static str>) -> ParseError {
        match self.peek() {
            Some(t) => self.unexpected_at(t, expected),
            None => ParseError::Syntax { pos: self.end, expected, found: "end of input".into() },
        }
    }

    fn node(&self, prod: Prod, children: Vec<ParseTree>) -> ParseTree {
        ParseTree::apply(self.grammar.grammar(), prod.id(), children)
    }

    fn terminal(&self, text: &str) -> ParseTree {
        let sym = self.grammar.grammar().terminal(text).cloned().unwrap_or_else(|| Symbol::terminal(text));
        ParseTree::leaf(sym)
    }

    /// Consumes the keyword or punctuation `text`.
    fn expect(&mut self, text: &'static str) -> PResult<ParseTree> {
        if self.is(text) {
            self.pos += 1;
            Ok(self.terminal(text))
        } else {
            Err(self.unexpected(vec![text]))
        }
    }

    fn lexical(&mut self, class: LexClass, expected: &'static str) -> PResult<ParseTree> {
        let kind = match class {
            LexClass::Ident => TokenKind::Ident,
            LexClass::IntLit => TokenKind::Int,
            LexClass::StrLit => TokenKind::Str,
        };
        let Some(tok) = self.peek().filter(|t| t.kind == kind).cloned() else {
            return Err(self.unexpected(vec![expected]));
        };
        self.pos += 1;
        let id = self.grammar.lexical_rule(class, &tok.text).map_err(|e| match e {
            GrammarError::AmbiguousName(name) => ParseError::Lexical {
                pos: tok.pos,
                message: format!("identifier `{name}` collides with a grammar nonterminal"),
            },
            other => ParseError::Lexical { pos: tok.pos, message: other.to_string() },
        })?;
        let leaf = self.terminal(&tok.text);
        Ok(ParseTree::apply(self.grammar.grammar(), id, vec![leaf]))
    }

    fn ident(&mut self) -> PResult<ParseTree> {
        self.lexical(LexClass::Ident, "identifier")
    }

    /// One or more block statements, stopping at `close` or end of input.
    fn block_stmts(&mut self, close: Option<&str>) -> PResult<ParseTree> {
        let mut items = Vec::new();
        while self.peek().is_some() && !close.is_some_and(|c| self.is(c)) {
            items.push(self.block_stmt()?);
        }
        let Some(last) = items.pop() else {
            return Err(self.unexpected(vec!["statement"]));
        };
        let mut tail = self.node(Prod::StmtsOne, vec![last]);
        while let Some(item) = items.pop() {
            tail = self.node(Prod::StmtsCons, vec![item, tail]);
        }
        Ok(tail)
    }

    fn starts_decl(&self) -> bool {
        self.is("int") || self.is("boolean") || (self.is_kind(0, TokenKind::Ident) && self.is_kind(1, TokenKind::Ident))
    }

    fn block_stmt(&mut self) -> PResult<ParseTree> {
        if self.starts_decl() {
            let decl = self.local_var_decl()?;
            let semi = self.expect(";")?;
            Ok(self.node(Prod::DeclStmt, vec![decl, semi]))
        } else {
            let s = self.statement()?;
            Ok(self.node(Prod::PlainStmt, vec![s]))
        }
    }

    fn local_var_decl(&mut self) -> PResult<ParseTree> {
        let ty = if self.is("int") {
            let t = self.expect("int")?;
            self.node(Prod::TypeInt, vec![t])
        } else if self.is("boolean") {
            let t = self.expect("boolean")?;
            self.node(Prod::TypeBool, vec![t])
        } else {
            let c = self.class_type()?;
            self.node(Prod::TypeClass, vec![c])
        };
        let name = self.ident()?;
        let var = if self.is("=") {
            let eq = self.expect("=")?;
            let init = self.expr()?;
            self.node(Prod::VarInit, vec![name, eq, init])
        } else {
            self.node(Prod::VarBare, vec![name])
        };
        Ok(self.node(Prod::LocalVarDecl, vec![ty, var]))
    }

    fn class_type(&mut self) -> PResult<ParseTree> {
        let id = self.ident()?;
        Ok(self.node(Prod::ClassType, vec![id]))
    }

    fn statement(&mut self) -> PResult<ParseTree> {
        let Some(tok) = self.peek() else {
            return Err(self.unexpected(vec!["statement"]));
        };
        match (tok.kind, tok.text.as_str()) {
            (TokenKind::Punct, "{") => {
                let b = self.block()?;
                Ok(self.node(Prod::StmtBlock, vec![b]))
            }
            (TokenKind::Keyword, "if") => {
                let kw = self.expect("if")?;
                let cond = self.par_expr()?;
                let then = self.statement()?;
                if self.is("else") {
                    let e = self.expect("else")?;
                    let other = self.statement()?;
                    let tail = self.node(Prod::Else, vec![e, other]);
                    Ok(self.node(Prod::StmtIfElse, vec![kw, cond, then, tail]))
                } else {
                    Ok(self.node(Prod::StmtIf, vec![kw, cond, then]))
                }
            }
            (TokenKind::Keyword, "while") => {
                let kw = self.expect("while")?;
                let cond = self.par_expr()?;
                let body = self.statement()?;
                Ok(self.node(Prod::StmtWhile, vec![kw, cond, body]))
            }
            (TokenKind::Keyword, "for") => self.for_stmt(),
            (TokenKind::Keyword, "try") => {
                let kw = self.expect("try")?;
                let body = self.block()?;
                let catches = self.catches()?;
                Ok(self.node(Prod::StmtTry, vec![kw, body, catches]))
            }
            (TokenKind::Keyword, "throw") => {
                let kw = self.expect("throw")?;
                let e = self.expr()?;
                let semi = self.expect(";")?;
                Ok(self.node(Prod::StmtThrow, vec![kw, e, semi]))
            }
            (TokenKind::Keyword, "return") => {
                let kw = self.expect("return")?;
                if self.is(";") {
                    let semi = self.expect(";")?;
                    return Ok(self.node(Prod::StmtReturnVoid, vec![kw, semi]));
                }
                let e = self.expr()?;
                let semi = self.expect(";")?;
                Ok(self.node(Prod::StmtReturn, vec![kw, e, semi]))
            }
            (TokenKind::Ident, _) => {
                let se = self.stmt_expr()?;
                let semi = self.expect(";")?;
                Ok(self.node(Prod::StmtExpr, vec![se, semi]))
            }
            _ => Err(self.unexpected(vec!["statement"])),
        }
    }

    fn block(&mut self) -> PResult<ParseTree> {
        let open = self.expect("{")?;
        if self.is("}") {
            let close = self.expect("}")?;
            return Ok(self.node(Prod::BlockEmpty, vec![open, close]));
        }
        let body = self.block_stmts(Some("}"))?;
        let close = self.expect("}")?;
        Ok(self.node(Prod::Block, vec![open, body, close]))
    }

    fn catches(&mut self) -> PResult<ParseTree> {
        let mut clauses = Vec::new();
        while self.is("catch") {
            let kw = self.expect("catch")?;
            let open = self.expect("(")?;
            let ty = self.class_type()?;
            let name = self.ident()?;
            let close = self.expect(")")?;
            let body = self.block()?;
            clauses.push(self.node(Prod::CatchClause, vec![kw, open, ty, name, close, body]));
        }
        let Some(last) = clauses.pop() else {
            return Err(self.unexpected(vec!["catch"]));
        };
        let mut tail = self.node(Prod::CatchesOne, vec![last]);
        while let Some(c) = clauses.pop() {
            tail = self.node(Prod::CatchesCons, vec![c, tail]);
        }
        Ok(tail)
    }

    fn for_stmt(&mut self) -> PResult<ParseTree> {
        let kw = self.expect("for")?;
        let open = self.expect("(")?;
        let init = if self.starts_decl() {
            let d = self.local_var_decl()?;
            self.node(Prod::ForInitDecl, vec![d])
        } else {
            let se = self.stmt_expr()?;
            self.node(Prod::ForInitExpr, vec![se])
        };
        let s1 = self.expect(";")?;
        let cond = self.expr()?;
        let s2 = self.expect(";")?;
        let se = self.stmt_expr()?;
        let update = self.node(Prod::ForUpdate, vec![se]);
        let close = self.expect(")")?;
        let body = self.statement()?;
        Ok(self.node(Prod::StmtFor, vec![kw, open, init, s1, cond, s2, update, close, body]))
    }

    fn stmt_expr(&mut self) -> PResult<ParseTree> {
        let name = self.name()?;
        if self.is("(") {
            let call = self.call(name)?;
            Ok(self.node(Prod::SeCall, vec![call]))
        } else if self.is("=") {
            let eq = self.expect("=")?;
            let value = self.expr()?;
            let a = self.node(Prod::Assignment, vec![name, eq, value]);
            Ok(self.node(Prod::SeAssign, vec![a]))
        } else if self.is("++") {
            let op = self.expect("++")?;
            Ok(self.node(Prod::SeIncr, vec![name, op]))
        } else if self.is("--") {
            let op = self.expect("--")?;
            Ok(self.node(Prod::SeDecr, vec![name, op]))
        } else {
            Err(self.unexpected(vec!["(", "=", "++", "--"]))
        }
    }

    fn name(&mut self) -> PResult<ParseTree> {
        let first = self.ident()?;
        let mut name = self.node(Prod::NameOne, vec![first]);
        while self.is(".") {
            let dot = self.expect(".")?;
            let part = self.ident()?;
            name = self.node(Prod::NameDot, vec![name, dot, part]);
        }
        Ok(name)
    }

    fn call(&mut self, name: ParseTree) -> PResult<ParseTree> {
        let open = self.expect("(")?;
        if self.is(")") {
            let close = self.expect(")")?;
            return Ok(self.node(Prod::CallEmpty, vec![name, open, close]));
        }
        let args = self.args()?;
        let close = self.expect(")")?;
        Ok(self.node(Prod::CallArgs, vec![name, open, args, close]))
    }

    fn args(&mut self) -> PResult<ParseTree> {
        let mut items = vec![self.expr()?];
        let mut commas = Vec::new();
        while self.is(",") {
            commas.push(self.expect(",")?);
            items.push(self.expr()?);
        }
        let last = items.pop().expect("at least one argument");
        let mut tail = self.node(Prod::ArgsOne, vec![last]);
        while let (Some(item), Some(comma)) = (items.pop(), commas.pop()) {
            tail = self.node(Prod::ArgsCons, vec![item, comma, tail]);
        }
        Ok(tail)
    }

    fn par_expr(&mut self) -> PResult<ParseTree> {
        let open = self.expect("(")?;
        let e = self.expr()?;
        let close = self.expect(")")?;
        Ok(self.node(Prod::ParExpr, vec![open, e, close]))
    }

    fn expr(&mut self) -> PResult<ParseTree> {
        let or = self.or_expr()?;
        Ok(self.node(Prod::Expr, vec![or]))
    }

    fn or_expr(&mut self) -> PResult<ParseTree> {
        let first = self.and_expr()?;
        let mut acc = self.node(Prod::OrOne, vec![first]);
        while self.is("||") {
            let op = self.expect("||")?;
            let rhs = self.and_expr()?;
            acc = self.node(Prod::OrCons, vec![acc, op, rhs]);
        }
        Ok(acc)
    }

    fn and_expr(&mut self) -> PResult<ParseTree> {
        let first = self.eq_expr()?;
        let mut acc = self.node(Prod::AndOne, vec![first]);
        while self.is("&&") {
            let op = self.expect("&&")?;
            let rhs = self.eq_expr()?;
            acc = self.node(Prod::AndCons, vec![acc, op, rhs]);
        }
        Ok(acc)
    }

    fn eq_expr(&mut self) -> PResult<ParseTree> {
        let lhs = self.rel_expr()?;
        for (op, prod) in [("==", Prod::EqEq), ("!=", Prod::EqNe)] {
            if self.is(op) {
                let o = self.expect(op)?;
                let rhs = self.rel_expr()?;
                return Ok(self.node(prod, vec![lhs, o, rhs]));
            }
        }
        Ok(self.node(Prod::EqOne, vec![lhs]))
    }

    fn rel_expr(&mut self) -> PResult<ParseTree> {
        let lhs = self.add_expr()?;
        for (op, prod) in [("<", Prod::RelLt), (">", Prod::RelGt), ("<=", Prod::RelLe), (">=", Prod::RelGe)] {
            if self.is(op) {
                let o = self.expect(op)?;
                let rhs = self.add_expr()?;
                return Ok(self.node(prod, vec![lhs, o, rhs]));
            }
        }
        Ok(self.node(Prod::RelOne, vec![lhs]))
    }

    fn add_expr(&mut self) -> PResult<ParseTree> {
        let first = self.mul_expr()?;
        let mut acc = self.node(Prod::AddOne, vec![first]);
        loop {
            let prod = if self.is("+") {
                Prod::AddPlus
            } else if self.is("-") {
                Prod::AddMinus
            } else {
                return Ok(acc);
            };
            let op = self.take_punct();
            let rhs = self.mul_expr()?;
            acc = self.node(prod, vec![acc, op, rhs]);
        }
    }

    fn mul_expr(&mut self) -> PResult<ParseTree> {
        let first = self.unary()?;
        let mut acc = self.node(Prod::MulOne, vec![first]);
        loop {
            let prod = if self.is("*") {
                Prod::MulTimes
            } else if self.is("/") {
                Prod::MulDiv
            } else if self.is("%") {
                Prod::MulMod
            } else {
                return Ok(acc);
            };
            let op = self.take_punct();
            let rhs = self.unary()?;
            acc = self.node(prod, vec![acc, op, rhs]);
        }
    }

    fn take_punct(&mut self) -> ParseTree {
        let text = self.tokens[self.pos].text.clone();
        self.pos += 1;
        self.terminal(&text)
    }

    fn unary(&mut self) -> PResult<ParseTree> {
        if self.is("-") || self.is("!") {
            let prod = if self.is("-") { Prod::Neg } else { Prod::Not };
            let op = self.take_punct();
            let inner = self.unary()?;
            return Ok(self.node(prod, vec![op, inner]));
        }
        let p = self.primary()?;
        Ok(self.node(Prod::UnaryPrimary, vec![p]))
    }

    fn primary(&mut self) -> PResult<ParseTree> {
        const EXPECTED: &[&str] = &["expression"];
        let Some(tok) = self.peek() else {
            return Err(self.unexpected(EXPECTED.to_vec()));
        };
        match (tok.kind, tok.text.as_str()) {
            (TokenKind::Int, _) => {
                let lit = self.lexical(LexClass::IntLit, "integer")?;
                let l = self.node(Prod::LitInt, vec![lit]);
                Ok(self.node(Prod::PrimLiteral, vec![l]))
            }
            (TokenKind::Str, _) => {
                let lit = self.lexical(LexClass::StrLit, "string")?;
                let l = self.node(Prod::LitStr, vec![lit]);
                Ok(self.node(Prod::PrimLiteral, vec![l]))
            }
            (TokenKind::Keyword, kw @ ("true" | "false" | "null")) => {
                let prod = match kw {
                    "true" => Prod::LitTrue,
                    "false" => Prod::LitFalse,
                    _ => Prod::LitNull,
                };
                let t = self.take_punct();
                let l = self.node(prod, vec![t]);
                Ok(self.node(Prod::PrimLiteral, vec![l]))
            }
            (TokenKind::Keyword, "this") => {
                let t = self.take_punct();
                Ok(self.node(Prod::PrimThis, vec![t]))
            }
            (TokenKind::Keyword, "new") => {
                let kw = self.expect("new")?;
                let ty = self.class_type()?;
                let open = self.expect("(")?;
                let new = if self.is(")") {
                    let close = self.expect(")")?;
                    self.node(Prod::NewEmpty, vec![kw, ty, open, close])
                } else {
                    let args = self.args()?;
                    let close = self.expect(")")?;
                    self.node(Prod::NewArgs, vec![kw, ty, open, args, close])
                };
                Ok(self.node(Prod::PrimNew, vec![new]))
            }
            (TokenKind::Punct, "(") => {
                let p = self.par_expr()?;
                Ok(self.node(Prod::PrimParen, vec![p]))
            }
            (TokenKind::Ident, _) => {
                let name = self.name()?;
                if self.is("(") {
                    let call = self.call(name)?;
                    Ok(self.node(Prod::PrimCall, vec![call]))
                } else {
                    Ok(self.node(Prod::PrimName, vec![name]))
                }
            }
            _ => Err(self.unexpected(EXPECTED.to_vec())),
        }
    }
}
