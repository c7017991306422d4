use std::collections::HashMap;

use super::lexer::{lex, Tok, Token};
use super::{Diagnostic, Diagnostics, SourceSpan};
use crate::model::{BinOp, Domain, EnumType, Expr, ExprScope, Model, ModelBuilder, Property, Sort, Value};

#[derive(Debug, Clone)]
pub(crate) struct Ast {
    kind: AstKind,
    span: SourceSpan,
}

#[derive(Debug, Clone)]
enum AstKind {
    Bool(bool),
    Int(i64),
    Ident(String),
    Next(String),
    Not(Box<Ast>),
    Neg(Box<Ast>),
    Bin(BinOp, Box<Ast>, Box<Ast>),
    Ite(Box<Ast>, Box<Ast>, Box<Ast>),
}

struct Parser {
    toks: Vec<Token>,
    pos: usize,
}

type PResult<T> = Result<T, Diagnostic>;

impl Parser {
    fn new(text: &str) -> PResult<Self> {
        Ok(Parser { toks: lex(text)?, pos: 0 })
    }

    fn peek(&self) -> &Tok {
        &self.toks[self.pos].tok
    }

    fn peek_at(&self, n: usize) -> &Tok {
        &self.toks[(self.pos + n).min(self.toks.len() - 1)].tok
    }

    fn span(&self) -> SourceSpan {
        self.toks[self.pos].span.clone()
    }

    fn prev_span(&self) -> SourceSpan {
        self.toks[self.pos.saturating_sub(1)].span.clone()
    }

    fn bump(&mut self) -> Token {
        let t = self.toks[self.pos].clone();
        if self.pos + 1 < self.toks.len() {
            self.pos += 1;
        }
        t
    }

    fn eat(&mut self, tok: &Tok) -> bool {
        if self.peek() == tok {
            self.bump();
            true
        } else {
            false
        }
    }

    fn unexpected(&self, wanted: &str) -> Diagnostic {
        Diagnostic::error(format!("expected {wanted}, found {}", self.peek().describe()), self.span())
    }

    fn expect(&mut self, tok: Tok) -> PResult<SourceSpan> {
        if self.peek() == &tok {
            Ok(self.bump().span)
        } else {
            Err(self.unexpected(&tok.describe()))
        }
    }

    fn is_keyword(&self, kw: &str) -> bool {
        matches!(self.peek(), Tok::Ident(s) if s == kw)
    }

    fn keyword(&mut self, kw: &str) -> PResult<SourceSpan> {
        if self.is_keyword(kw) {
            Ok(self.bump().span)
        } else {
            Err(self.unexpected(&format!("`{kw}`")))
        }
    }

    fn ident(&mut self) -> PResult<(String, SourceSpan)> {
        match self.peek().clone() {
            Tok::Ident(s) if !is_reserved(&s) => {
                let sp = self.bump().span;
                Ok((s, sp))
            }
            _ => Err(self.unexpected("a name")),
        }
    }

    fn int(&mut self) -> PResult<(i64, SourceSpan)> {
        let start = self.span();
        let neg = self.eat(&Tok::Minus);
        match self.peek().clone() {
            Tok::Int(v) => {
                let end = self.bump().span;
                Ok((if neg { -v } else { v }, start.to(&end)))
            }
            _ => Err(self.unexpected("an integer")),
        }
    }

    fn expr(&mut self) -> PResult<Ast> {
        let cond = self.implies()?;
        if self.eat(&Tok::Question) {
            let then = self.expr()?;
            self.expect(Tok::Colon)?;
            let els = self.expr()?;
            let span = cond.span.to(&els.span);
            return Ok(Ast { kind: AstKind::Ite(Box::new(cond), Box::new(then), Box::new(els)), span });
        }
        Ok(cond)
    }

    fn implies(&mut self) -> PResult<Ast> {
        let lhs = self.or()?;
        if self.eat(&Tok::Implies) {
            let rhs = self.implies()?;
            return Ok(bin(BinOp::Implies, lhs, rhs));
        }
        Ok(lhs)
    }

    fn or(&mut self) -> PResult<Ast> {
        let mut lhs = self.and()?;
        while self.eat(&Tok::OrOr) {
            let rhs = self.and()?;
            lhs = bin(BinOp::Or, lhs, rhs);
        }
        Ok(lhs)
    }

    fn and(&mut self) -> PResult<Ast> {
        let mut lhs = self.equality()?;
        while self.eat(&Tok::AndAnd) {
            let rhs = self.equality()?;
            lhs = bin(BinOp::And, lhs, rhs);
        }
        Ok(lhs)
    }

    fn equality(&mut self) -> PResult<Ast> {
        let mut lhs = self.relation()?;
        loop {
            let op = match self.peek() {
                Tok::EqEq => BinOp::Eq,
                Tok::NotEq => BinOp::Ne,
                _ => return Ok(lhs),
            };
            self.bump();
            let rhs = self.relation()?;
            lhs = bin(op, lhs, rhs);
        }
    }

    fn relation(&mut self) -> PResult<Ast> {
        let mut lhs = self.additive()?;
        loop {
            let (op, swap) = match self.peek() {
                Tok::Lt => (BinOp::Lt, false),
                Tok::Le => (BinOp::Le, false),
                Tok::Gt => (BinOp::Lt, true),
                Tok::Ge => (BinOp::Le, true),
                _ => return Ok(lhs),
            };
            self.bump();
            let rhs = self.additive()?;
            lhs = if swap {
                let span = lhs.span.to(&rhs.span);
                Ast { kind: AstKind::Bin(op, Box::new(rhs), Box::new(lhs)), span }
            } else {
                bin(op, lhs, rhs)
            };
        }
    }

    fn additive(&mut self) -> PResult<Ast> {
        let mut lhs = self.unary()?;
        loop {
            let op = match self.peek() {
                Tok::Plus => BinOp::Add,
                Tok::Minus => BinOp::Sub,
                _ => return Ok(lhs),
            };
            self.bump();
            let rhs = self.unary()?;
            lhs = bin(op, lhs, rhs);
        }
    }

    fn unary(&mut self) -> PResult<Ast> {
        let start = self.span();
        if self.eat(&Tok::Bang) {
            let a = self.unary()?;
            let span = start.to(&a.span);
            return Ok(Ast { kind: AstKind::Not(Box::new(a)), span });
        }
        if self.eat(&Tok::Minus) {
            let a = self.unary()?;
            let span = start.to(&a.span);
            return Ok(Ast { kind: AstKind::Neg(Box::new(a)), span });
        }
        self.primary()
    }

    fn primary(&mut self) -> PResult<Ast> {
        let start = self.span();
        match self.peek().clone() {
            Tok::Int(v) => {
                self.bump();
                Ok(Ast { kind: AstKind::Int(v), span: start })
            }
            Tok::LParen => {
                self.bump();
                let e = self.expr()?;
                let end = self.expect(Tok::RParen)?;
                Ok(Ast { kind: e.kind, span: start.to(&end) })
            }
            Tok::Ident(s) if s == "true" || s == "false" => {
                self.bump();
                Ok(Ast { kind: AstKind::Bool(s == "true"), span: start })
            }
            Tok::Ident(s) if s == "next" && self.peek_at(1) == &Tok::LParen => {
                self.bump();
                self.bump();
                let (name, _) = self.ident()?;
                let end = self.expect(Tok::RParen)?;
                Ok(Ast { kind: AstKind::Next(name), span: start.to(&end) })
            }
            Tok::Ident(_) => {
                let (name, span) = self.ident()?;
                Ok(Ast { kind: AstKind::Ident(name), span })
            }
            _ => Err(self.unexpected("an expression")),
        }
    }

    fn domain(&mut self) -> PResult<(Domain, SourceSpan)> {
        let start = self.span();
        if self.is_keyword("bool") {
            self.bump();
            return Ok((Domain::Bool, start));
        }
        if self.eat(&Tok::LBrace) {
            let mut names = vec![];
            loop {
                let (n, _) = self.ident()?;
                names.push(n);
                if !self.eat(&Tok::Comma) {
                    break;
                }
            }
            let end = self.expect(Tok::RBrace)?;
            let span = start.to(&end);
            let e = EnumType::new(names).map_err(|m| Diagnostic::error(m, span.clone()))?;
            return Ok((Domain::Enum(e.into()), span));
        }
        let (lo, _) = self.int()?;
        self.expect(Tok::DotDot)?;
        let (hi, end) = self.int()?;
        let span = start.to(&end);
        let d = Domain::int(lo, hi).map_err(|m| Diagnostic::error(m, span.clone()))?;
        Ok((d, span))
    }

    fn value(&mut self, domain: &Domain) -> PResult<Value> {
        let start = self.span();
        let v =
            match (domain, self.peek().clone()) {
                (Domain::Bool, Tok::Ident(s)) if s == "true" || s == "false" => {
                    self.bump();
                    Value::Bool(s == "true")
                }
                (Domain::Int { .. }, Tok::Int(_) | Tok::Minus) => Value::Int(self.int()?.0),
                (Domain::Enum(e), Tok::Ident(s)) => {
                    self.bump();
                    Value::Sym(e.index_of(&s).ok_or_else(|| {
                        Diagnostic::error(format!("`{s}` is not a constant of {domain}"), start.clone())
                    })?)
                }
                _ => return Err(self.unexpected(&format!("a value of {domain}"))),
            };
        if !domain.contains(v) {
            return Err(Diagnostic::error(format!("initial value outside {domain}"), start.to(&self.prev_span())));
        }
        Ok(v)
    }
}

fn bin(op: BinOp, a: Ast, b: Ast) -> Ast {
    let span = a.span.to(&b.span);
    Ast { kind: AstKind::Bin(op, Box::new(a), Box::new(b)), span }
}

const RESERVED: &[&str] = &[
    "model",
    "state",
    "input",
    "init",
    "assume",
    "invariant",
    "trans",
    "true",
    "false",
    "next",
    "property",
    "assert",
    "bool",
];

fn is_reserved(s: &str) -> bool {
    RESERVED.contains(&s)
}

/// Turns a syntax tree into a model expression, resolving names against the model.
fn resolve(model: &Model, ast: &Ast, scope: ExprScope, what: &str) -> PResult<Expr> {
    let err = |m: String| Diagnostic::error(m, ast.span.clone());
    Ok(match &ast.kind {
        AstKind::Bool(b) => Expr::Bool(*b),
        AstKind::Int(i) => Expr::Int(*i),
        AstKind::Ident(name) => {
            if let Some(i) = model.state_index(name) {
                if !scope.state {
                    return Err(err(format!("state variable `{name}` is not allowed in {what}")));
                }
                Expr::state(i)
            } else if let Some(i) = model.input_index(name) {
                if !scope.input {
                    return Err(err(format!("input `{name}` is not allowed in {what}")));
                }
                Expr::input(i)
            } else if let Some((e, idx)) = model.constant(name) {
                Expr::Sym(e, idx)
            } else {
                return Err(err(format!("unknown name `{name}`")));
            }
        }
        AstKind::Next(name) => {
            let i =
                model.state_index(name).ok_or_else(|| err(format!("`next` needs a state variable, found `{name}`")))?;
            if !scope.next {
                return Err(err(format!("`next({name})` is not allowed in {what}")));
            }
            Expr::next(i)
        }
        AstKind::Not(a) => Expr::not(resolve(model, a, scope, what)?),
        AstKind::Neg(a) => match &a.kind {
            AstKind::Int(v) => Expr::Int(-v),
            _ => Expr::binary(BinOp::Sub, Expr::Int(0), resolve(model, a, scope, what)?),
        },
        AstKind::Bin(op, a, b) => Expr::binary(*op, resolve(model, a, scope, what)?, resolve(model, b, scope, what)?),
        AstKind::Ite(c, t, e) => {
            Expr::ite(resolve(model, c, scope, what)?, resolve(model, t, scope, what)?, resolve(model, e, scope, what)?)
        }
    })
}

/// Resolves and sort-checks a boolean expression.
fn resolve_bool(model: &Model, ast: &Ast, scope: ExprScope, what: &str) -> PResult<Expr> {
    let e = resolve(model, ast, scope, what)?;
    model.expect_bool(&e, scope).map_err(|m| Diagnostic::error(format!("{what}: {m}"), ast.span.clone()))?;
    Ok(e)
}

enum Item {
    State { name: String, span: SourceSpan, domain: Domain, init: Option<Value> },
    Input { names: Vec<(String, SourceSpan)>, domain: Domain },
    Init(Ast),
    Assume(Ast),
    Invariant(Ast),
    Trans(Vec<(String, SourceSpan, Ast)>),
}

fn parse_model_items(p: &mut Parser) -> PResult<(String, SourceSpan, Vec<Item>)> {
    p.keyword("model")?;
    let (name, name_span) = p.ident()?;
    p.expect(Tok::LBrace)?;
    let mut items = vec![];
    while !p.eat(&Tok::RBrace) {
        let kw = match p.peek() {
            Tok::Ident(s) => s.clone(),
            _ => return Err(p.unexpected("a declaration")),
        };
        match kw.as_str() {
            "state" => {
                p.bump();
                let (name, span) = p.ident()?;
                p.expect(Tok::Colon)?;
                let (domain, _) = p.domain()?;
                let init = if p.is_keyword("init") {
                    p.bump();
                    Some(p.value(&domain)?)
                } else {
                    None
                };
                p.expect(Tok::Semi)?;
                items.push(Item::State { name, span, domain, init });
            }
            "input" => {
                p.bump();
                let mut names = vec![p.ident()?];
                while p.eat(&Tok::Comma) {
                    names.push(p.ident()?);
                }
                p.expect(Tok::Colon)?;
                let (domain, _) = p.domain()?;
                p.expect(Tok::Semi)?;
                items.push(Item::Input { names, domain });
            }
            "init" | "assume" | "invariant" => {
                p.bump();
                let e = p.expr()?;
                p.expect(Tok::Semi)?;
                items.push(match kw.as_str() {
                    "init" => Item::Init(e),
                    "assume" => Item::Assume(e),
                    _ => Item::Invariant(e),
                });
            }
            "trans" => {
                p.bump();
                p.expect(Tok::LBrace)?;
                let mut assigns = vec![];
                while !p.eat(&Tok::RBrace) {
                    let (var, span) = p.ident()?;
                    p.expect(Tok::Prime)?;
                    p.expect(Tok::Assign)?;
                    let e = p.expr()?;
                    p.expect(Tok::Semi)?;
                    assigns.push((var, span, e));
                }
                items.push(Item::Trans(assigns));
            }
            _ => return Err(p.unexpected("`state`, `input`, `init`, `assume`, `invariant` or `trans`")),
        }
    }
    p.expect(Tok::Eof)?;
    Ok((name, name_span, items))
}

pub(crate) fn parse_model(text: &str) -> Result<Model, Diagnostics> {
    let mut p = Parser::new(text)?;
    let (name, name_span, items) = parse_model_items(&mut p)?;

    let mut diags = vec![];
    let mut declared: HashMap<String, SourceSpan> = HashMap::new();
    let mut builder = ModelBuilder::new(name);
    let mut declare = |n: &str, sp: &SourceSpan, diags: &mut Vec<Diagnostic>| {
        if declared.insert(n.to_string(), sp.clone()).is_some() {
            diags.push(Diagnostic::error(format!("duplicate name `{n}`"), sp.clone()));
        }
    };
    for item in &items {
        match item {
            Item::State { name, span, domain, init } => {
                declare(name, span, &mut diags);
                builder.state(name.clone(), domain.clone(), *init);
            }
            Item::Input { names, domain } => {
                for (n, sp) in names {
                    declare(n, sp, &mut diags);
                    builder.input(n.clone(), domain.clone());
                }
            }
            _ => {}
        }
    }
    if !diags.is_empty() {
        return Err(Diagnostics(diags));
    }
    let skeleton = builder.clone().build().map_err(|e| Diagnostic::error(e.to_string(), name_span.clone()))?;

    let mut assigned: HashMap<usize, SourceSpan> = HashMap::new();
    for item in &items {
        let r = match item {
            Item::State { .. } | Item::Input { .. } => Ok(()),
            Item::Init(a) => resolve_bool(&skeleton, a, ExprScope::STATE, "an init predicate").map(|e| {
                builder.init(e);
            }),
            Item::Assume(a) => resolve_bool(&skeleton, a, ExprScope::INPUT, "an input assumption").map(|e| {
                builder.assume(e);
            }),
            Item::Invariant(a) => resolve_bool(&skeleton, a, ExprScope::STATE, "a state invariant").map(|e| {
                builder.invariant(e);
            }),
            Item::Trans(assigns) => {
                for (var, span, a) in assigns {
                    let Some(idx) = skeleton.state_index(var) else {
                        diags.push(Diagnostic::error(format!("`{var}` is not a state variable"), span.clone()));
                        continue;
                    };
                    if assigned.insert(idx, span.clone()).is_some() {
                        diags.push(Diagnostic::error(format!("`{var}` is assigned twice"), span.clone()));
                        continue;
                    }
                    match check_assignment(&skeleton, idx, a) {
                        Ok(e) => {
                            builder.trans(idx, e);
                        }
                        Err(d) => diags.push(d),
                    }
                }
                Ok(())
            }
        };
        if let Err(d) = r {
            diags.push(d);
        }
    }
    if !diags.is_empty() {
        return Err(Diagnostics(diags));
    }
    builder.build().map_err(|e| Diagnostics(vec![Diagnostic::error(e.to_string(), name_span)]))
}

fn check_assignment(model: &Model, idx: usize, ast: &Ast) -> PResult<Expr> {
    let var = &model.state_vars()[idx];
    let what = format!("the transition of `{}`", var.name);
    let e = resolve(model, ast, ExprScope::STEP, &what)?;
    let sort = model.sort_of(&e, ExprScope::STEP).map_err(|m| Diagnostic::error(m, ast.span.clone()))?;
    let ok = match (&var.domain, &sort) {
        (Domain::Bool, Sort::Bool) | (Domain::Int { .. }, Sort::Int { .. }) => true,
        (Domain::Enum(a), Sort::Enum(b)) => a == b,
        _ => false,
    };
    if !ok {
        return Err(Diagnostic::error(
            format!("{what}: assigns {} to a variable of domain {}", sort.describe(), var.domain),
            ast.span.clone(),
        ));
    }
    Ok(e)
}

pub(crate) fn parse_properties(model: &Model, text: &str) -> Result<Vec<Property>, Diagnostics> {
    let mut p = Parser::new(text)?;
    let mut out: Vec<Property> = vec![];
    let mut diags = vec![];
    let mut names: HashMap<String, SourceSpan> = HashMap::new();
    while p.peek() != &Tok::Eof {
        p.keyword("property")?;
        let (name, name_span) = p.ident()?;
        if names.insert(name.clone(), name_span.clone()).is_some() {
            diags.push(Diagnostic::error(format!("duplicate property `{name}`"), name_span.clone()));
        }
        p.expect(Tok::LBrace)?;
        let mut assume: Option<Ast> = None;
        let mut assert: Option<Ast> = None;
        while !p.eat(&Tok::RBrace) {
            let kw_span = p.span();
            let slot = if p.is_keyword("assume") {
                &mut assume
            } else if p.is_keyword("assert") {
                &mut assert
            } else {
                return Err(p.unexpected("`assume` or `assert`").into());
            };
            p.bump();
            let e = p.expr()?;
            p.expect(Tok::Semi)?;
            if slot.is_some() {
                diags.push(Diagnostic::error("clause given twice", kw_span));
            }
            *slot = Some(e);
        }
        let phi = assume
            .map(|a| resolve_bool(model, &a, ExprScope::STEP, &format!("the assumption of `{name}`")))
            .unwrap_or(Ok(Expr::tt()));
        let psi = assert
            .map(|a| resolve_bool(model, &a, ExprScope::FULL, &format!("the assertion of `{name}`")))
            .unwrap_or(Ok(Expr::tt()));
        match (phi, psi) {
            (Ok(phi), Ok(psi)) => out.push(Property { name, assume: phi, assert: psi }),
            (a, b) => diags.extend(a.err().into_iter().chain(b.err())),
        }
    }
    if diags.is_empty() {
        Ok(out)
    } else {
        Err(Diagnostics(diags))
    }
}

pub(crate) fn parse_expr(model: &Model, text: &str, scope: ExprScope, what: &str) -> Result<Expr, Diagnostics> {
    let mut p = Parser::new(text)?;
    let ast = p.expr()?;
    p.expect(Tok::Eof)?;
    Ok(resolve_bool(model, &ast, scope, what)?)
}
