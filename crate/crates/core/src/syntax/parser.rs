//! Recursive-descent parser for VML.
//!
//! Top-level grammar:
//!
//! ```text
//! model      ::= (typedef | vardef | rule)+
//! typedef    ::= 'enum' ID '{' (ID ('(' INT ')')? ';')+ '}'
//!              | 'number' ID '{' 'range' ':' '[' num ',' num ']' ';'
//!                    'precision' ':' num ';' ('unit' ':' STRING ';')? '}'
//!              | 'boolean' ID ';'
//! vardef     ::= 'var' ID (':' ID)? '=' expr ';'
//!              | 'context' ID ':' ID ';'
//!              | 'varpoint' ID ':' ID (';' | '{' item (',' item)* ';' '}')
//!              | 'property' ID ':' ID ('maximized'|'minimized')? '{'
//!                    'priorities' ':' func (',' func)* ';'
//!                    'definitions' ':' func (',' func)* ';' '}'
//! rule       ::= 'rule' ID ':' expr '=>' expr ';'
//! item       ::= expr ('=>' expr)?
//! func       ::= ID '(' ID (',' ID)* ')' '=' expr
//! ```
//!
//! Expressions, loosest first: `|`, `&`, prefix `!`, comparisons
//! (non-associative), `+ -`, `* /`, prefix `-`, then calls, literals,
//! identifiers and parentheses.
//!
//! After a syntax error the parser skips to the end of the current
//! declaration (`;` or the closing `}`) and keeps going, so one run reports
//! every broken declaration.

use crate::diagnostic::{Code, Diagnostic};
use crate::domain::{EnumType, NumericType};
use crate::expr::{BinaryOp, Expr, ExprKind, Literal, Span, UnaryOp};

use super::ast::*;
use super::lexer::{tokenize, Keyword, Token, TokenKind};

struct Parser {
    tokens: Vec<Token>,
    pos: usize,
    depth: i32,
    diags: Vec<Diagnostic>,
    eof_span: Span,
}

/// Marker for a reported syntax error; the diagnostic is already recorded.
struct Failed;

type PResult<T> = Result<T, Failed>;

fn describe(expected: &[&str]) -> String {
    match expected {
        [one] => one.to_string(),
        _ => format!("one of {}", expected.join(", ")),
    }
}

impl Parser {
    fn peek(&self) -> Option<&TokenKind> {
        self.tokens.get(self.pos).map(|t| &t.kind)
    }

    fn span(&self) -> Span {
        self.tokens.get(self.pos).map(|t| t.span).unwrap_or(self.eof_span)
    }

    fn prev_span(&self) -> Span {
        if self.pos == 0 {
            return self.span();
        }
        self.tokens[self.pos - 1].span
    }

    fn bump(&mut self) -> Option<Token> {
        let tok = self.tokens.get(self.pos).cloned()?;
        match tok.kind {
            TokenKind::LBrace => self.depth += 1,
            TokenKind::RBrace => self.depth -= 1,
            _ => {}
        }
        self.pos += 1;
        Some(tok)
    }

    fn at(&self, kind: &TokenKind) -> bool {
        self.peek() == Some(kind)
    }

    fn at_kw(&self, kw: Keyword) -> bool {
        self.peek() == Some(&TokenKind::Keyword(kw))
    }

    fn eat(&mut self, kind: &TokenKind) -> bool {
        if self.at(kind) {
            self.bump();
            true
        } else {
            false
        }
    }

    fn error_expected(&mut self, expected: &[&str]) -> Failed {
        let found = match self.peek() {
            Some(k) => k.to_string(),
            None => "end of input".to_string(),
        };
        let span = self.span();
        self.diags.push(Diagnostic::error(
            Code::Syntax,
            span,
            format!("expected {}, found {}", describe(expected), found),
        ));
        Failed
    }

    fn expect(&mut self, kind: TokenKind) -> PResult<Span> {
        if self.at(&kind) {
            Ok(self.bump().unwrap().span)
        } else {
            Err(self.error_expected(&[&format!("`{}`", super::lexer::punct_text(&kind))]))
        }
    }

    fn expect_kw(&mut self, kw: Keyword) -> PResult<Span> {
        if self.at_kw(kw) {
            Ok(self.bump().unwrap().span)
        } else {
            Err(self.error_expected(&[&format!("`{}`", kw.as_str())]))
        }
    }

    fn ident(&mut self) -> PResult<Ident> {
        if let Some(TokenKind::Ident(name)) = self.peek() {
            let name = name.clone();
            let span = self.bump().unwrap().span;
            Ok(Ident { name, span })
        } else {
            Err(self.error_expected(&["identifier"]))
        }
    }

    fn is_item_start(kind: &TokenKind) -> bool {
        matches!(
            kind,
            TokenKind::Keyword(
                Keyword::Enum
                    | Keyword::Number
                    | Keyword::Boolean
                    | Keyword::Var
                    | Keyword::Context
                    | Keyword::Varpoint
                    | Keyword::Property
                    | Keyword::Rule
            )
        )
    }

    /// Skips to the end of the broken declaration.
    fn synchronize(&mut self) {
        while let Some(kind) = self.peek().cloned() {
            if self.depth <= 0 && Self::is_item_start(&kind) {
                self.depth = 0;
                return;
            }
            self.bump();
            match kind {
                TokenKind::Semi if self.depth <= 0 => {
                    self.depth = 0;
                    return;
                }
                TokenKind::RBrace if self.depth <= 0 => {
                    self.depth = 0;
                    self.eat(&TokenKind::Semi);
                    return;
                }
                _ => {}
            }
        }
    }

    fn model(&mut self) -> Model {
        let mut model = Model::default();
        while let Some(kind) = self.peek().cloned() {
            self.depth = 0;
            if kind == TokenKind::Semi {
                self.bump();
                continue;
            }
            match self.item() {
                Ok(Some(item)) => model.items.push(item),
                Ok(None) => {}
                Err(Failed) => self.synchronize(),
            }
        }
        if model.items.is_empty() && self.diags.is_empty() {
            self.diags.push(Diagnostic::error(
                Code::Syntax,
                self.eof_span,
                "a model needs at least one declaration",
            ));
        }
        model
    }

    /// `Ok(None)` when the declaration parsed but was semantically invalid
    /// (already reported).
    fn item(&mut self) -> PResult<Option<Item>> {
        let start = self.span();
        match self.peek() {
            Some(TokenKind::Keyword(Keyword::Enum)) => self.enum_decl(start),
            Some(TokenKind::Keyword(Keyword::Number)) => self.number_decl(start),
            Some(TokenKind::Keyword(Keyword::Boolean)) => {
                self.bump();
                let name = self.ident()?;
                self.expect(TokenKind::Semi)?;
                let span = start.to(self.prev_span());
                Ok(Some(Item::Type(TypeDef::Boolean(BoolDecl { name, span }))))
            }
            Some(TokenKind::Keyword(Keyword::Var)) => {
                self.bump();
                let name = self.ident()?;
                let ty = if self.eat(&TokenKind::Colon) { Some(self.ident()?) } else { None };
                self.expect(TokenKind::Eq)?;
                let value = self.expr()?;
                self.expect(TokenKind::Semi)?;
                let span = start.to(self.prev_span());
                Ok(Some(Item::Var(VarDef::General(GeneralVar { name, ty, value, span }))))
            }
            Some(TokenKind::Keyword(Keyword::Context)) => {
                self.bump();
                let name = self.ident()?;
                self.expect(TokenKind::Colon)?;
                let ty = self.ident()?;
                self.expect(TokenKind::Semi)?;
                let span = start.to(self.prev_span());
                Ok(Some(Item::Var(VarDef::Context(ContextDecl { name, ty, span }))))
            }
            Some(TokenKind::Keyword(Keyword::Varpoint)) => self.varpoint_decl(start),
            Some(TokenKind::Keyword(Keyword::Property)) => self.property_decl(start),
            Some(TokenKind::Keyword(Keyword::Rule)) => {
                self.bump();
                let name = self.ident()?;
                self.expect(TokenKind::Colon)?;
                let implication = self.implication()?;
                self.expect(TokenKind::Semi)?;
                let span = start.to(self.prev_span());
                Ok(Some(Item::Rule(RuleDecl { name, implication, span })))
            }
            _ => Err(self.error_expected(&[
                "`enum`", "`number`", "`boolean`", "`var`", "`context`", "`varpoint`",
                "`property`", "`rule`",
            ])),
        }
    }

    fn enum_decl(&mut self, start: Span) -> PResult<Option<Item>> {
        self.bump();
        let name = self.ident()?;
        self.expect(TokenKind::LBrace)?;
        let mut literals = Vec::new();
        loop {
            let lit = self.ident()?;
            let code = if self.eat(&TokenKind::LParen) {
                let negative = self.eat(&TokenKind::Minus);
                let code = match self.peek() {
                    Some(TokenKind::Int(i)) => *i,
                    _ => return Err(self.error_expected(&["integer code"])),
                };
                self.bump();
                self.expect(TokenKind::RParen)?;
                Some(if negative { -code } else { code })
            } else {
                None
            };
            self.expect(TokenKind::Semi)?;
            literals.push(EnumLiteralDecl { name: lit, code });
            if self.eat(&TokenKind::RBrace) {
                break;
            }
        }
        let span = start.to(self.prev_span());
        let check = EnumType::new(
            name.name.clone(),
            literals.iter().map(|l| (l.name.name.clone(), l.code)),
        );
        if let Err(e) = check {
            self.diags.push(Diagnostic::error(Code::InvalidType, span, e.to_string()));
            return Ok(None);
        }
        Ok(Some(Item::Type(TypeDef::Enum(EnumDecl { name, literals, span }))))
    }

    fn signed_literal(&mut self) -> PResult<Literal> {
        let negative = self.eat(&TokenKind::Minus);
        let lit = match self.peek() {
            Some(TokenKind::Int(i)) => Literal::int(*i),
            Some(TokenKind::Real(r)) => Literal::real(*r),
            _ => return Err(self.error_expected(&["number"])),
        };
        self.bump();
        Ok(if negative { Literal { value: -lit.value, ..lit } } else { lit })
    }

    fn number_decl(&mut self, start: Span) -> PResult<Option<Item>> {
        self.bump();
        let name = self.ident()?;
        self.expect(TokenKind::LBrace)?;
        self.expect_kw(Keyword::Range)?;
        self.expect(TokenKind::Colon)?;
        self.expect(TokenKind::LBracket)?;
        let lo = self.signed_literal()?;
        self.expect(TokenKind::Comma)?;
        let hi = self.signed_literal()?;
        self.expect(TokenKind::RBracket)?;
        self.expect(TokenKind::Semi)?;
        self.expect_kw(Keyword::Precision)?;
        self.expect(TokenKind::Colon)?;
        let precision = self.signed_literal()?;
        self.expect(TokenKind::Semi)?;
        let mut unit = None;
        if self.eat(&TokenKind::Keyword(Keyword::Unit)) {
            self.expect(TokenKind::Colon)?;
            match self.peek() {
                Some(TokenKind::Str(s)) => unit = Some(s.clone()),
                _ => return Err(self.error_expected(&["unit string"])),
            }
            self.bump();
            self.expect(TokenKind::Semi)?;
        }
        self.expect(TokenKind::RBrace)?;
        let span = start.to(self.prev_span());
        if let Err(e) =
            NumericType::new(name.name.clone(), lo.value, hi.value, precision.value, unit.clone())
        {
            self.diags.push(Diagnostic::error(
                Code::InvalidType,
                span,
                format!("invalid type `{}`: {e}", name.name),
            ));
            return Ok(None);
        }
        Ok(Some(Item::Type(TypeDef::Number(NumberDecl { name, lo, hi, precision, unit, span }))))
    }

    fn varpoint_decl(&mut self, start: Span) -> PResult<Option<Item>> {
        self.bump();
        let name = self.ident()?;
        self.expect(TokenKind::Colon)?;
        let ty = self.ident()?;
        let mut body = Vec::new();
        if self.eat(&TokenKind::LBrace) {
            loop {
                let cond = self.expr()?;
                if self.eat(&TokenKind::Implies) {
                    let consequence = self.expr()?;
                    body.push(Constraint::Implication(Implication { condition: cond, consequence }));
                } else {
                    body.push(Constraint::Invariant(cond));
                }
                if !self.eat(&TokenKind::Comma) {
                    break;
                }
            }
            self.expect(TokenKind::Semi)?;
            self.expect(TokenKind::RBrace)?;
        } else {
            self.expect(TokenKind::Semi)?;
        }
        let span = start.to(self.prev_span());
        Ok(Some(Item::Var(VarDef::VarPoint(VarPointDecl { name, ty, body, span }))))
    }

    fn property_decl(&mut self, start: Span) -> PResult<Option<Item>> {
        self.bump();
        let name = self.ident()?;
        self.expect(TokenKind::Colon)?;
        let ty = self.ident()?;
        let direction = if self.eat(&TokenKind::Keyword(Keyword::Maximized)) {
            Some(Direction::Maximized)
        } else if self.eat(&TokenKind::Keyword(Keyword::Minimized)) {
            Some(Direction::Minimized)
        } else {
            None
        };
        self.expect(TokenKind::LBrace)?;
        self.expect_kw(Keyword::Priorities)?;
        self.expect(TokenKind::Colon)?;
        let priorities = self.function_list()?;
        self.expect_kw(Keyword::Definitions)?;
        self.expect(TokenKind::Colon)?;
        let definitions = self.function_list()?;
        self.expect(TokenKind::RBrace)?;
        let span = start.to(self.prev_span());
        Ok(Some(Item::Var(VarDef::Property(PropertyDecl {
            name,
            ty,
            direction,
            priorities,
            definitions,
            span,
        }))))
    }

    fn function_list(&mut self) -> PResult<Vec<FunctionDef>> {
        let mut out = vec![self.function()?];
        while self.eat(&TokenKind::Comma) {
            out.push(self.function()?);
        }
        self.expect(TokenKind::Semi)?;
        Ok(out)
    }

    fn function(&mut self) -> PResult<FunctionDef> {
        let start = self.span();
        let name = self.ident()?;
        self.expect(TokenKind::LParen)?;
        let mut params = vec![self.ident()?];
        while self.eat(&TokenKind::Comma) {
            params.push(self.ident()?);
        }
        self.expect(TokenKind::RParen)?;
        self.expect(TokenKind::Eq)?;
        let body = self.expr()?;
        let span = start.to(self.prev_span());
        Ok(FunctionDef { name, params, body, span })
    }

    fn implication(&mut self) -> PResult<Implication> {
        let condition = self.expr()?;
        self.expect(TokenKind::Implies)?;
        let consequence = self.expr()?;
        Ok(Implication { condition, consequence })
    }

    pub(crate) fn expr(&mut self) -> PResult<Expr> {
        self.or_expr()
    }

    fn binary_level(
        &mut self,
        next: fn(&mut Self) -> PResult<Expr>,
        ops: &[(TokenKind, BinaryOp)],
    ) -> PResult<Expr> {
        let mut lhs = next(self)?;
        'outer: loop {
            for (tok, op) in ops {
                if self.at(tok) {
                    self.bump();
                    let rhs = next(self)?;
                    let span = lhs.span.to(rhs.span);
                    lhs = Expr::new(ExprKind::Binary(*op, Box::new(lhs), Box::new(rhs)), span);
                    continue 'outer;
                }
            }
            return Ok(lhs);
        }
    }

    fn or_expr(&mut self) -> PResult<Expr> {
        self.binary_level(Self::and_expr, &[(TokenKind::Pipe, BinaryOp::Or)])
    }

    fn and_expr(&mut self) -> PResult<Expr> {
        self.binary_level(Self::not_expr, &[(TokenKind::Amp, BinaryOp::And)])
    }

    fn not_expr(&mut self) -> PResult<Expr> {
        if self.at(&TokenKind::Bang) {
            let start = self.bump().unwrap().span;
            let operand = self.not_expr()?;
            let span = start.to(operand.span);
            return Ok(Expr::new(ExprKind::Unary(UnaryOp::Not, Box::new(operand)), span));
        }
        self.cmp_expr()
    }

    fn cmp_expr(&mut self) -> PResult<Expr> {
        let lhs = self.add_expr()?;
        let op = match self.peek() {
            Some(TokenKind::Lt) => BinaryOp::Lt,
            Some(TokenKind::Le) => BinaryOp::Le,
            Some(TokenKind::Gt) => BinaryOp::Gt,
            Some(TokenKind::Ge) => BinaryOp::Ge,
            Some(TokenKind::Eq) => BinaryOp::Eq,
            Some(TokenKind::Ne) => BinaryOp::Ne,
            _ => return Ok(lhs),
        };
        self.bump();
        let rhs = self.add_expr()?;
        let span = lhs.span.to(rhs.span);
        Ok(Expr::new(ExprKind::Binary(op, Box::new(lhs), Box::new(rhs)), span))
    }

    fn add_expr(&mut self) -> PResult<Expr> {
        self.binary_level(
            Self::mul_expr,
            &[(TokenKind::Plus, BinaryOp::Add), (TokenKind::Minus, BinaryOp::Sub)],
        )
    }

    fn mul_expr(&mut self) -> PResult<Expr> {
        self.binary_level(
            Self::neg_expr,
            &[(TokenKind::Star, BinaryOp::Mul), (TokenKind::Slash, BinaryOp::Div)],
        )
    }

    fn neg_expr(&mut self) -> PResult<Expr> {
        if self.at(&TokenKind::Minus) {
            let start = self.bump().unwrap().span;
            let operand = self.neg_expr()?;
            let span = start.to(operand.span);
            return Ok(Expr::new(ExprKind::Unary(UnaryOp::Neg, Box::new(operand)), span));
        }
        self.atom()
    }

    fn atom(&mut self) -> PResult<Expr> {
        let span = self.span();
        match self.peek().cloned() {
            Some(TokenKind::Int(i)) => {
                self.bump();
                Ok(Expr::new(ExprKind::Number(Literal::int(i)), span))
            }
            Some(TokenKind::Real(r)) => {
                self.bump();
                Ok(Expr::new(ExprKind::Number(Literal::real(r)), span))
            }
            Some(TokenKind::Bool(b)) => {
                self.bump();
                Ok(Expr::new(ExprKind::Bool(b), span))
            }
            Some(TokenKind::Ident(name)) => {
                self.bump();
                if self.peek() == Some(&TokenKind::LParen) {
                    self.bump();
                    let mut args = Vec::new();
                    if !self.at(&TokenKind::RParen) {
                        args.push(self.expr()?);
                        while self.eat(&TokenKind::Comma) {
                            args.push(self.expr()?);
                        }
                    }
                    let end = self.expect(TokenKind::RParen)?;
                    return Ok(Expr::new(ExprKind::Call(name, args), span.to(end)));
                }
                Ok(Expr::new(ExprKind::Ident(name), span))
            }
            Some(TokenKind::LParen) => {
                self.bump();
                let inner = self.expr()?;
                let end = self.expect(TokenKind::RParen)?;
                Ok(Expr { span: span.to(end), ..inner })
            }
            _ => Err(self.error_expected(&["expression"])),
        }
    }
}

fn parser_for(text: &str) -> Result<Parser, Vec<Diagnostic>> {
    let tokens = tokenize(text)?;
    let line = text.lines().count().max(1) as u32;
    let col = text.lines().last().map(|l| l.chars().count() as u32 + 1).unwrap_or(1);
    let eof_span = Span::new(line, col, text.len(), 0);
    Ok(Parser { tokens, pos: 0, depth: 0, diags: Vec::new(), eof_span })
}

/// Parses a whole VML file.
pub fn parse_model(text: &str) -> Result<Model, Vec<Diagnostic>> {
    let mut p = parser_for(text)?;
    let model = p.model();
    if p.diags.is_empty() {
        Ok(model)
    } else {
        Err(p.diags)
    }
}

/// Parses a single expression (used for subscription predicates and tests).
pub fn parse_expr(text: &str) -> Result<Expr, Vec<Diagnostic>> {
    let mut p = parser_for(text)?;
    let result = p.expr();
    if result.is_ok() && p.peek().is_some() {
        p.error_expected(&["end of expression"]);
    }
    match result {
        Ok(e) if p.diags.is_empty() => Ok(e),
        _ => Err(p.diags),
    }
}
