//! Recursive-descent parser for expressions and system description files.
//!
//! Expression precedence, loosest first: `->` (right associative), `=>`
//! (right associative), `or`, `and`, `not`, relations (non-associative),
//! `+ -`, `* /`, unary minus, record update / primary. `if then else` is a
//! primary whose `else` branch extends as far as possible.

use crate::diag::{Diagnostic, Span};
use crate::lang::ast::*;
use crate::lang::lexer::{tokenize, Keyword, Token, TokenKind};
use crate::value::parse_decimal;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ParseError {
    pub span: Span,
    pub expected: Vec<String>,
    pub found: String,
}

impl ParseError {
    pub fn to_diagnostic(&self) -> Diagnostic {
        let expected = if self.expected.len() == 1 {
            self.expected[0].clone()
        } else {
            format!("one of {}", self.expected.join(", "))
        };
        Diagnostic::error(self.span, format!("expected {expected}, found {}", self.found))
    }
}

type PResult<T> = Result<T, ParseError>;

pub struct Parser {
    tokens: Vec<Token>,
    pos: usize,
    eof_span: Span,
}

impl Parser {
    pub fn new(tokens: Vec<Token>) -> Parser {
        let eof_span = tokens
            .last()
            .map(|t| Span::new(t.span.line, t.span.col + 1))
            .unwrap_or(Span::new(1, 1));
        Parser {
            tokens,
            pos: 0,
            eof_span,
        }
    }

    fn peek(&self) -> Option<&TokenKind> {
        self.tokens.get(self.pos).map(|t| &t.kind)
    }

    fn peek_at(&self, offset: usize) -> Option<&TokenKind> {
        self.tokens.get(self.pos + offset).map(|t| &t.kind)
    }

    fn span(&self) -> Span {
        self.tokens.get(self.pos).map(|t| t.span).unwrap_or(self.eof_span)
    }

    fn at_end(&self) -> bool {
        self.pos >= self.tokens.len()
    }

    fn advance(&mut self) -> Option<Token> {
        let t = self.tokens.get(self.pos).cloned();
        if t.is_some() {
            self.pos += 1;
        }
        t
    }

    fn error<T>(&self, expected: &[&str]) -> PResult<T> {
        let found = match self.peek() {
            Some(TokenKind::Error(s)) => format!("unexpected character '{s}'"),
            Some(k) => format!("'{}'", k.describe()),
            None => "end of input".to_string(),
        };
        Err(ParseError {
            span: self.span(),
            expected: expected.iter().map(|s| s.to_string()).collect(),
            found,
        })
    }

    fn check(&self, kind: &TokenKind) -> bool {
        self.peek() == Some(kind)
    }

    fn check_kw(&self, kw: Keyword) -> bool {
        self.peek() == Some(&TokenKind::Kw(kw))
    }

    fn eat(&mut self, kind: &TokenKind) -> bool {
        if self.check(kind) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    fn eat_kw(&mut self, kw: Keyword) -> bool {
        self.eat(&TokenKind::Kw(kw))
    }

    fn expect(&mut self, kind: &TokenKind) -> PResult<Span> {
        let span = self.span();
        if self.eat(kind) {
            Ok(span)
        } else {
            self.error(&[&format!("'{}'", kind.describe())])
        }
    }

    fn expect_kw(&mut self, kw: Keyword) -> PResult<Span> {
        self.expect(&TokenKind::Kw(kw))
    }

    fn ident(&mut self) -> PResult<(String, Span)> {
        let span = self.span();
        match self.peek() {
            Some(TokenKind::Ident(s)) => {
                let s = s.clone();
                self.pos += 1;
                Ok((s, span))
            }
            _ => self.error(&["identifier"]),
        }
    }

    fn string(&mut self) -> PResult<String> {
        match self.peek() {
            Some(TokenKind::Str(s)) => {
                let s = s.clone();
                self.pos += 1;
                Ok(s)
            }
            _ => self.error(&["string label"]),
        }
    }

    fn path(&mut self) -> PResult<(Path, Span)> {
        let (first, span) = self.ident()?;
        let mut parts = vec![first];
        loop {
            let part = match (self.peek(), self.peek_at(1)) {
                (Some(TokenKind::Dot), Some(TokenKind::Ident(s))) => s.clone(),
                (Some(TokenKind::Dot), Some(TokenKind::Kw(k))) => k.as_str().to_string(),
                _ => break,
            };
            self.pos += 2;
            parts.push(part);
        }
        Ok((Path(parts), span))
    }

    // ---- expressions ----

    pub fn expr(&mut self) -> PResult<Expr> {
        self.arrow()
    }

    fn arrow(&mut self) -> PResult<Expr> {
        let lhs = self.implies()?;
        if self.check(&TokenKind::Arrow) {
            let span = lhs.span;
            self.pos += 1;
            let rhs = self.arrow()?;
            return Ok(Expr::new(ExprKind::Arrow(Box::new(lhs), Box::new(rhs)), span));
        }
        Ok(lhs)
    }

    fn implies(&mut self) -> PResult<Expr> {
        let lhs = self.or()?;
        if self.check(&TokenKind::Implies) {
            let span = lhs.span;
            self.pos += 1;
            let rhs = self.implies()?;
            return Ok(binary(BinOp::Implies, lhs, rhs, span));
        }
        Ok(lhs)
    }

    fn or(&mut self) -> PResult<Expr> {
        let mut lhs = self.and()?;
        while self.check_kw(Keyword::Or) {
            self.pos += 1;
            let rhs = self.and()?;
            let span = lhs.span;
            lhs = binary(BinOp::Or, lhs, rhs, span);
        }
        Ok(lhs)
    }

    fn and(&mut self) -> PResult<Expr> {
        let mut lhs = self.not()?;
        while self.check_kw(Keyword::And) {
            self.pos += 1;
            let rhs = self.not()?;
            let span = lhs.span;
            lhs = binary(BinOp::And, lhs, rhs, span);
        }
        Ok(lhs)
    }

    fn not(&mut self) -> PResult<Expr> {
        if self.check_kw(Keyword::Not) {
            let span = self.span();
            self.pos += 1;
            let inner = self.not()?;
            return Ok(Expr::new(ExprKind::Unary(UnOp::Not, Box::new(inner)), span));
        }
        self.relation()
    }

    fn relation(&mut self) -> PResult<Expr> {
        let lhs = self.additive()?;
        let op = match self.peek() {
            Some(TokenKind::Lt) => BinOp::Lt,
            Some(TokenKind::Le) => BinOp::Le,
            Some(TokenKind::Gt) => BinOp::Gt,
            Some(TokenKind::Ge) => BinOp::Ge,
            Some(TokenKind::Equal) => BinOp::Eq,
            Some(TokenKind::Ne) => BinOp::Ne,
            _ => return Ok(lhs),
        };
        self.pos += 1;
        let rhs = self.additive()?;
        let span = lhs.span;
        Ok(binary(op, lhs, rhs, span))
    }

    fn additive(&mut self) -> PResult<Expr> {
        let mut lhs = self.multiplicative()?;
        loop {
            let op = match self.peek() {
                Some(TokenKind::Plus) => BinOp::Add,
                Some(TokenKind::Minus) => BinOp::Sub,
                _ => return Ok(lhs),
            };
            self.pos += 1;
            let rhs = self.multiplicative()?;
            let span = lhs.span;
            lhs = binary(op, lhs, rhs, span);
        }
    }

    fn multiplicative(&mut self) -> PResult<Expr> {
        let mut lhs = self.unary()?;
        loop {
            let op = match self.peek() {
                Some(TokenKind::Star) => BinOp::Mul,
                Some(TokenKind::Slash) => BinOp::Div,
                _ => return Ok(lhs),
            };
            self.pos += 1;
            let rhs = self.unary()?;
            let span = lhs.span;
            lhs = binary(op, lhs, rhs, span);
        }
    }

    fn unary(&mut self) -> PResult<Expr> {
        if self.check(&TokenKind::Minus) {
            let span = self.span();
            self.pos += 1;
            let inner = self.unary()?;
            return Ok(Expr::new(ExprKind::Unary(UnOp::Neg, Box::new(inner)), span));
        }
        self.postfix()
    }

    fn postfix(&mut self) -> PResult<Expr> {
        let mut e = self.primary()?;
        while self.check(&TokenKind::LBrace) {
            self.pos += 1;
            let (field, _) = self.ident()?;
            self.expect(&TokenKind::Assign)?;
            let value = self.expr()?;
            self.expect(&TokenKind::RBrace)?;
            let span = e.span;
            e = Expr::new(
                ExprKind::RecordUpdate {
                    base: Box::new(e),
                    field,
                    value: Box::new(value),
                },
                span,
            );
        }
        Ok(e)
    }

    fn parenthesized(&mut self) -> PResult<Expr> {
        self.expect(&TokenKind::LParen)?;
        let e = self.expr()?;
        self.expect(&TokenKind::RParen)?;
        Ok(e)
    }

    fn primary(&mut self) -> PResult<Expr> {
        let span = self.span();
        let kind = match self.peek().cloned() {
            Some(TokenKind::Int(v)) => {
                self.pos += 1;
                ExprKind::Int(v)
            }
            Some(TokenKind::Real(text)) => {
                self.pos += 1;
                ExprKind::Real(parse_decimal(&text).expect("lexer only produces decimal literals"))
            }
            Some(TokenKind::Kw(Keyword::True)) => {
                self.pos += 1;
                ExprKind::Bool(true)
            }
            Some(TokenKind::Kw(Keyword::False)) => {
                self.pos += 1;
                ExprKind::Bool(false)
            }
            Some(TokenKind::Kw(Keyword::Pre)) => {
                self.pos += 1;
                ExprKind::Pre(Box::new(self.parenthesized()?))
            }
            Some(TokenKind::Kw(Keyword::Floor)) => {
                self.pos += 1;
                ExprKind::Floor(Box::new(self.parenthesized()?))
            }
            Some(TokenKind::Kw(Keyword::Real)) => {
                self.pos += 1;
                ExprKind::ToReal(Box::new(self.parenthesized()?))
            }
            Some(TokenKind::Kw(Keyword::If)) => {
                self.pos += 1;
                let c = self.expr()?;
                self.expect_kw(Keyword::Then)?;
                let a = self.expr()?;
                self.expect_kw(Keyword::Else)?;
                let b = self.expr()?;
                ExprKind::Ite(Box::new(c), Box::new(a), Box::new(b))
            }
            Some(TokenKind::LParen) => {
                self.pos += 1;
                let mut e = self.expr()?;
                self.expect(&TokenKind::RParen)?;
                e.span = span;
                return Ok(e);
            }
            Some(TokenKind::Ident(_)) => {
                let (path, _) = self.path()?;
                if self.check(&TokenKind::LParen) {
                    self.pos += 1;
                    let mut args = Vec::new();
                    if !self.check(&TokenKind::RParen) {
                        loop {
                            args.push(self.expr()?);
                            if !self.eat(&TokenKind::Comma) {
                                break;
                            }
                        }
                    }
                    self.expect(&TokenKind::RParen)?;
                    ExprKind::Call { node: path, args }
                } else {
                    ExprKind::Id(path)
                }
            }
            _ => {
                return self.error(&[
                    "literal", "identifier", "'('", "'-'", "'not'", "'if'", "'pre'", "'floor'",
                    "'real'",
                ])
            }
        };
        Ok(Expr::new(kind, span))
    }

    // ---- declarations ----

    fn type_name(&mut self) -> PResult<TypeName> {
        match self.peek().cloned() {
            Some(TokenKind::Kw(Keyword::Bool)) => {
                self.pos += 1;
                Ok(TypeName::Bool)
            }
            Some(TokenKind::Kw(Keyword::Int)) => {
                self.pos += 1;
                Ok(TypeName::Int)
            }
            Some(TokenKind::Kw(Keyword::Real)) => {
                self.pos += 1;
                Ok(TypeName::Real)
            }
            Some(TokenKind::Ident(name)) => {
                self.pos += 1;
                Ok(TypeName::Named(name))
            }
            _ => self.error(&["type"]),
        }
    }

    /// `a, b : int` one group of parameters sharing a type.
    fn param_group(&mut self) -> PResult<Vec<Param>> {
        let mut names = vec![self.ident()?];
        while self.eat(&TokenKind::Comma) {
            names.push(self.ident()?);
        }
        self.expect(&TokenKind::Colon)?;
        let ty = self.type_name()?;
        Ok(names
            .into_iter()
            .map(|(name, span)| Param {
                name,
                ty: ty.clone(),
                span,
            })
            .collect())
    }

    /// Parameter groups separated by `,` or `;` (used by node signatures and
    /// `eq` statements).
    fn params_until(&mut self, stop: &TokenKind) -> PResult<Vec<Param>> {
        let mut params = Vec::new();
        if self.check(stop) {
            return Ok(params);
        }
        loop {
            params.extend(self.param_group()?);
            if self.eat(&TokenKind::Comma) || self.eat(&TokenKind::Semi) {
                if self.check(stop) {
                    break;
                }
                continue;
            }
            break;
        }
        Ok(params)
    }

    fn eq_vars(&mut self) -> PResult<Vec<Param>> {
        let mut params = Vec::new();
        loop {
            params.extend(self.param_group()?);
            if !self.eat(&TokenKind::Comma) {
                break;
            }
        }
        Ok(params)
    }

    fn node_def(&mut self) -> PResult<NodeDef> {
        let span = self.expect_kw(Keyword::Node)?;
        let (name, _) = self.ident()?;
        self.expect(&TokenKind::LParen)?;
        let inputs = self.params_until(&TokenKind::RParen)?;
        self.expect(&TokenKind::RParen)?;
        self.expect_kw(Keyword::Returns)?;
        self.expect(&TokenKind::LParen)?;
        let outputs = self.params_until(&TokenKind::RParen)?;
        self.expect(&TokenKind::RParen)?;
        self.eat(&TokenKind::Semi);
        let mut locals = Vec::new();
        if self.eat_kw(Keyword::Var) {
            while !self.check_kw(Keyword::Let) {
                locals.extend(self.param_group()?);
                self.expect(&TokenKind::Semi)?;
            }
        }
        self.expect_kw(Keyword::Let)?;
        let mut equations = Vec::new();
        while !self.check_kw(Keyword::Tel) {
            let (first, eq_span) = self.ident()?;
            let mut lhs = vec![first];
            while self.eat(&TokenKind::Comma) {
                lhs.push(self.ident()?.0);
            }
            self.expect(&TokenKind::Equal)?;
            let rhs = self.expr()?;
            self.expect(&TokenKind::Semi)?;
            equations.push(NodeEquation {
                lhs,
                rhs,
                span: eq_span,
            });
        }
        self.expect_kw(Keyword::Tel)?;
        self.eat(&TokenKind::Semi);
        Ok(NodeDef {
            name,
            inputs,
            outputs,
            locals,
            equations,
            span,
        })
    }

    fn labeled(&mut self) -> PResult<(String, Expr)> {
        let label = self.string()?;
        self.expect(&TokenKind::Colon)?;
        let e = self.expr()?;
        self.expect(&TokenKind::Semi)?;
        Ok((label, e))
    }

    /// Parses one statement; `in_type` selects which statements are legal.
    fn statement(&mut self, in_type: bool) -> PResult<Statement> {
        let span = self.span();
        match self.peek() {
            Some(TokenKind::Kw(Keyword::Assume)) if in_type => {
                self.pos += 1;
                let (label, expr) = self.labeled()?;
                Ok(Statement::Assume { label, expr, span })
            }
            Some(TokenKind::Kw(Keyword::Guarantee)) if in_type => {
                self.pos += 1;
                let (label, expr) = self.labeled()?;
                Ok(Statement::Guarantee { label, expr, span })
            }
            Some(TokenKind::Kw(Keyword::Assert)) if !in_type => {
                self.pos += 1;
                let expr = self.expr()?;
                self.expect(&TokenKind::Semi)?;
                Ok(Statement::Assert { expr, span })
            }
            Some(TokenKind::Kw(Keyword::Lemma)) if !in_type => {
                self.pos += 1;
                let (label, expr) = self.labeled()?;
                Ok(Statement::Lemma { label, expr, span })
            }
            Some(TokenKind::Kw(Keyword::Eq)) => {
                self.pos += 1;
                let vars = self.eq_vars()?;
                let def = if self.eat(&TokenKind::Equal) {
                    Some(self.expr()?)
                } else {
                    None
                };
                self.expect(&TokenKind::Semi)?;
                Ok(Statement::Eq { vars, def, span })
            }
            Some(TokenKind::Kw(Keyword::Node)) => Ok(Statement::Node(self.node_def()?)),
            _ if in_type => self.error(&["'in'", "'out'", "'assume'", "'guarantee'", "'eq'", "'node'", "'end'"]),
            _ => self.error(&[
                "'subcomponents'",
                "'connections'",
                "'assert'",
                "'lemma'",
                "'eq'",
                "'node'",
                "'end'",
            ]),
        }
    }

    fn component(&mut self) -> PResult<ComponentDecl> {
        let span = self.expect_kw(Keyword::Component)?;
        let (name, _) = self.ident()?;
        let mut ports = Vec::new();
        let mut statements = Vec::new();
        loop {
            let pspan = self.span();
            let dir = if self.eat_kw(Keyword::In) {
                Some(Direction::In)
            } else if self.eat_kw(Keyword::Out) {
                Some(Direction::Out)
            } else {
                None
            };
            if let Some(dir) = dir {
                for p in self.param_group()? {
                    ports.push(PortDecl {
                        name: p.name,
                        dir,
                        ty: p.ty,
                        span: p.span,
                    });
                }
                let _ = pspan;
                self.expect(&TokenKind::Semi)?;
                continue;
            }
            if self.eat_kw(Keyword::End) {
                break;
            }
            statements.push(self.statement(true)?);
        }
        Ok(ComponentDecl {
            name,
            ports,
            statements,
            span,
        })
    }

    fn implementation(&mut self) -> PResult<ImplDecl> {
        let span = self.expect_kw(Keyword::Implementation)?;
        let (name, _) = self.path()?;
        let mut subcomponents = Vec::new();
        let mut connections = Vec::new();
        let mut statements = Vec::new();
        loop {
            if self.eat_kw(Keyword::Subcomponents) {
                while matches!(self.peek(), Some(TokenKind::Ident(_))) {
                    let (sub, sspan) = self.ident()?;
                    self.expect(&TokenKind::Colon)?;
                    let (classifier, _) = self.path()?;
                    self.expect(&TokenKind::Semi)?;
                    subcomponents.push(SubcomponentDecl {
                        name: sub,
                        classifier,
                        span: sspan,
                    });
                }
                continue;
            }
            if self.eat_kw(Keyword::Connections) {
                while matches!(self.peek(), Some(TokenKind::Ident(_))) {
                    let (src, cspan) = self.path()?;
                    self.expect(&TokenKind::Arrow)?;
                    let (dst, _) = self.path()?;
                    self.expect(&TokenKind::Semi)?;
                    connections.push(ConnectionDecl {
                        src,
                        dst,
                        span: cspan,
                    });
                }
                continue;
            }
            if self.eat_kw(Keyword::End) {
                break;
            }
            statements.push(self.statement(false)?);
        }
        Ok(ImplDecl {
            name,
            subcomponents,
            connections,
            statements,
            span,
        })
    }

    fn record(&mut self) -> PResult<RecordDecl> {
        let span = self.expect_kw(Keyword::Record)?;
        let (name, _) = self.ident()?;
        self.expect(&TokenKind::LBrace)?;
        let mut fields = Vec::new();
        while !self.check(&TokenKind::RBrace) {
            fields.extend(self.param_group()?);
            self.expect(&TokenKind::Semi)?;
        }
        self.expect(&TokenKind::RBrace)?;
        self.eat(&TokenKind::Semi);
        Ok(RecordDecl { name, fields, span })
    }

    fn constant(&mut self) -> PResult<ConstDecl> {
        let span = self.expect_kw(Keyword::Const)?;
        let (name, _) = self.ident()?;
        self.expect(&TokenKind::Colon)?;
        let ty = self.type_name()?;
        self.expect(&TokenKind::Equal)?;
        let value = self.expr()?;
        self.expect(&TokenKind::Semi)?;
        Ok(ConstDecl {
            name,
            ty,
            value,
            span,
        })
    }

    fn item(&mut self) -> PResult<Item> {
        match self.peek() {
            Some(TokenKind::Kw(Keyword::Component)) => Ok(Item::Component(self.component()?)),
            Some(TokenKind::Kw(Keyword::Implementation)) => {
                Ok(Item::Implementation(self.implementation()?))
            }
            Some(TokenKind::Kw(Keyword::Record)) => Ok(Item::Record(self.record()?)),
            Some(TokenKind::Kw(Keyword::Const)) => Ok(Item::Const(self.constant()?)),
            Some(TokenKind::Kw(Keyword::Node)) => Ok(Item::Node(self.node_def()?)),
            _ => self.error(&["'component'", "'implementation'", "'record'", "'const'", "'node'"]),
        }
    }

    fn is_item_start(&self) -> bool {
        matches!(
            self.peek(),
            Some(TokenKind::Kw(
                Keyword::Component | Keyword::Implementation | Keyword::Record | Keyword::Const
            ))
        )
    }
}

fn binary(op: BinOp, lhs: Expr, rhs: Expr, span: Span) -> Expr {
    Expr::new(ExprKind::Binary(op, Box::new(lhs), Box::new(rhs)), span)
}

/// Parses a complete expression from a token sequence.
pub fn parse_expr(tokens: Vec<Token>) -> Result<Expr, ParseError> {
    let mut p = Parser::new(tokens);
    let e = p.expr()?;
    if !p.at_end() {
        return p.error(&["end of expression"]);
    }
    Ok(e)
}

/// Convenience: tokenize and parse one expression.
pub fn parse_expr_str(source: &str) -> Result<Expr, ParseError> {
    parse_expr(tokenize(source))
}

/// Parses a system description file. On a syntax error the parser skips
/// to the next top-level declaration and keeps going, so one call can
/// report several problems.
pub fn parse_file(source: &str) -> (SourceFile, Vec<Diagnostic>) {
    let mut p = Parser::new(tokenize(source));
    let mut file = SourceFile::default();
    let mut diags = Vec::new();
    while !p.at_end() {
        match p.item() {
            Ok(item) => file.items.push(item),
            Err(e) => {
                diags.push(e.to_diagnostic());
                p.advance();
                while !p.at_end() && !p.is_item_start() {
                    p.advance();
                }
            }
        }
    }
    (file, diags)
}
