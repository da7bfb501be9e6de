use std::fmt;

use crate::diagnostic::{Code, Diagnostic};
use crate::expr::Span;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Keyword {
    Enum,
    Number,
    Boolean,
    Var,
    Context,
    Varpoint,
    Property,
    Rule,
    Range,
    Precision,
    Unit,
    Priorities,
    Definitions,
    Maximized,
    Minimized,
}

impl Keyword {
    pub fn lookup(s: &str) -> Option<Keyword> {
        Some(match s {
            "enum" => Keyword::Enum,
            "number" => Keyword::Number,
            "boolean" => Keyword::Boolean,
            "var" => Keyword::Var,
            "context" => Keyword::Context,
            "varpoint" => Keyword::Varpoint,
            "property" => Keyword::Property,
            "rule" => Keyword::Rule,
            "range" => Keyword::Range,
            "precision" => Keyword::Precision,
            "unit" => Keyword::Unit,
            "priorities" => Keyword::Priorities,
            "definitions" => Keyword::Definitions,
            "maximized" => Keyword::Maximized,
            "minimized" => Keyword::Minimized,
            _ => return None,
        })
    }

    pub fn as_str(self) -> &'static str {
        match self {
            Keyword::Enum => "enum",
            Keyword::Number => "number",
            Keyword::Boolean => "boolean",
            Keyword::Var => "var",
            Keyword::Context => "context",
            Keyword::Varpoint => "varpoint",
            Keyword::Property => "property",
            Keyword::Rule => "rule",
            Keyword::Range => "range",
            Keyword::Precision => "precision",
            Keyword::Unit => "unit",
            Keyword::Priorities => "priorities",
            Keyword::Definitions => "definitions",
            Keyword::Maximized => "maximized",
            Keyword::Minimized => "minimized",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum TokenKind {
    Keyword(Keyword),
    Ident(String),
    Int(i64),
    Real(f64),
    Str(String),
    Bool(bool),
    LBrace,
    RBrace,
    LBracket,
    RBracket,
    LParen,
    RParen,
    Colon,
    Semi,
    Comma,
    /// `=`: assignment in declarations, equality in expressions
    Eq,
    Implies,
    Plus,
    Minus,
    Star,
    Slash,
    Lt,
    Le,
    Gt,
    Ge,
    Ne,
    Bang,
    Amp,
    Pipe,
}

impl fmt::Display for TokenKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            TokenKind::Keyword(k) => write!(f, "`{}`", k.as_str()),
            TokenKind::Ident(s) => write!(f, "identifier `{s}`"),
            TokenKind::Int(i) => write!(f, "integer `{i}`"),
            TokenKind::Real(r) => write!(f, "number `{r}`"),
            TokenKind::Str(s) => write!(f, "string \"{s}\""),
            TokenKind::Bool(b) => write!(f, "`{b}`"),
            other => write!(f, "`{}`", punct_text(other)),
        }
    }
}

pub(crate) fn punct_text(kind: &TokenKind) -> &'static str {
    match kind {
        TokenKind::LBrace => "{",
        TokenKind::RBrace => "}",
        TokenKind::LBracket => "[",
        TokenKind::RBracket => "]",
        TokenKind::LParen => "(",
        TokenKind::RParen => ")",
        TokenKind::Colon => ":",
        TokenKind::Semi => ";",
        TokenKind::Comma => ",",
        TokenKind::Eq => "=",
        TokenKind::Implies => "=>",
        TokenKind::Plus => "+",
        TokenKind::Minus => "-",
        TokenKind::Star => "*",
        TokenKind::Slash => "/",
        TokenKind::Lt => "<",
        TokenKind::Le => "<=",
        TokenKind::Gt => ">",
        TokenKind::Ge => ">=",
        TokenKind::Ne => "!=",
        TokenKind::Bang => "!",
        TokenKind::Amp => "&",
        TokenKind::Pipe => "|",
        _ => "?",
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Token {
    pub kind: TokenKind,
    pub span: Span,
}

struct Cursor<'a> {
    text: &'a str,
    pos: usize,
    line: u32,
    col: u32,
}

impl<'a> Cursor<'a> {
    fn peek(&self) -> Option<char> {
        self.text[self.pos..].chars().next()
    }

    fn peek2(&self) -> Option<char> {
        let mut it = self.text[self.pos..].chars();
        it.next();
        it.next()
    }

    fn bump(&mut self) -> Option<char> {
        let c = self.peek()?;
        self.pos += c.len_utf8();
        if c == '\n' {
            self.line += 1;
            self.col = 1;
        } else {
            self.col += 1;
        }
        Some(c)
    }

    fn span_from(&self, start: (usize, u32, u32)) -> Span {
        Span::new(start.1, start.2, start.0, self.pos - start.0)
    }

    fn mark(&self) -> (usize, u32, u32) {
        (self.pos, self.line, self.col)
    }
}

/// Splits VML source into tokens. `/* ... */` comments and whitespace are
/// dropped. Lexing continues past bad characters so that every problem is
/// reported in one pass.
pub fn tokenize(text: &str) -> Result<Vec<Token>, Vec<Diagnostic>> {
    let mut cur = Cursor { text, pos: 0, line: 1, col: 1 };
    let mut tokens = Vec::new();
    let mut diags = Vec::new();

    while let Some(c) = cur.peek() {
        let start = cur.mark();
        if c.is_whitespace() {
            cur.bump();
            continue;
        }
        if c == '/' && cur.peek2() == Some('*') {
            cur.bump();
            cur.bump();
            let mut closed = false;
            while let Some(c) = cur.bump() {
                if c == '*' && cur.peek() == Some('/') {
                    cur.bump();
                    closed = true;
                    break;
                }
            }
            if !closed {
                diags.push(Diagnostic::error(
                    Code::UnterminatedComment,
                    cur.span_from(start),
                    "unterminated comment",
                ));
            }
            continue;
        }
        if c.is_ascii_alphabetic() || c == '_' {
            while matches!(cur.peek(), Some(c) if c.is_ascii_alphanumeric() || c == '_') {
                cur.bump();
            }
            let word = &text[start.0..cur.pos];
            let kind = match word {
                "true" => TokenKind::Bool(true),
                "false" => TokenKind::Bool(false),
                _ => match Keyword::lookup(word) {
                    Some(k) => TokenKind::Keyword(k),
                    None => TokenKind::Ident(word.to_string()),
                },
            };
            tokens.push(Token { kind, span: cur.span_from(start) });
            continue;
        }
        if c.is_ascii_digit() {
            while matches!(cur.peek(), Some(c) if c.is_ascii_digit()) {
                cur.bump();
            }
            let mut real = false;
            if cur.peek() == Some('.') && matches!(cur.peek2(), Some(d) if d.is_ascii_digit()) {
                real = true;
                cur.bump();
                while matches!(cur.peek(), Some(c) if c.is_ascii_digit()) {
                    cur.bump();
                }
            }
            if matches!(cur.peek(), Some('e' | 'E')) {
                let save = (cur.pos, cur.line, cur.col);
                cur.bump();
                if matches!(cur.peek(), Some('+' | '-')) {
                    cur.bump();
                }
                if matches!(cur.peek(), Some(c) if c.is_ascii_digit()) {
                    real = true;
                    while matches!(cur.peek(), Some(c) if c.is_ascii_digit()) {
                        cur.bump();
                    }
                } else {
                    (cur.pos, cur.line, cur.col) = save;
                }
            }
            let lexeme = &text[start.0..cur.pos];
            let span = cur.span_from(start);
            let kind = if real {
                lexeme.parse::<f64>().ok().map(TokenKind::Real)
            } else {
                lexeme.parse::<i64>().ok().map(TokenKind::Int)
            };
            match kind {
                Some(kind) => tokens.push(Token { kind, span }),
                None => diags.push(Diagnostic::error(
                    Code::InvalidNumber,
                    span,
                    format!("invalid number literal `{lexeme}`"),
                )),
            }
            continue;
        }
        if c == '"' {
            cur.bump();
            let mut closed = false;
            while let Some(c) = cur.bump() {
                if c == '"' {
                    closed = true;
                    break;
                }
                if c == '\n' {
                    break;
                }
            }
            let span = cur.span_from(start);
            if closed {
                let inner = text[start.0 + 1..cur.pos - 1].to_string();
                tokens.push(Token { kind: TokenKind::Str(inner), span });
            } else {
                diags.push(Diagnostic::error(Code::UnterminatedString, span, "unterminated string"));
            }
            continue;
        }

        cur.bump();
        let next = cur.peek();
        let kind = match (c, next) {
            ('=', Some('>')) => {
                cur.bump();
                Some(TokenKind::Implies)
            }
            ('<', Some('=')) => {
                cur.bump();
                Some(TokenKind::Le)
            }
            ('>', Some('=')) => {
                cur.bump();
                Some(TokenKind::Ge)
            }
            ('!', Some('=')) => {
                cur.bump();
                Some(TokenKind::Ne)
            }
            ('{', _) => Some(TokenKind::LBrace),
            ('}', _) => Some(TokenKind::RBrace),
            ('[', _) => Some(TokenKind::LBracket),
            (']', _) => Some(TokenKind::RBracket),
            ('(', _) => Some(TokenKind::LParen),
            (')', _) => Some(TokenKind::RParen),
            (':', _) => Some(TokenKind::Colon),
            (';', _) => Some(TokenKind::Semi),
            (',', _) => Some(TokenKind::Comma),
            ('=', _) => Some(TokenKind::Eq),
            ('+', _) => Some(TokenKind::Plus),
            ('-', _) => Some(TokenKind::Minus),
            ('*', _) => Some(TokenKind::Star),
            ('/', _) => Some(TokenKind::Slash),
            ('<', _) => Some(TokenKind::Lt),
            ('>', _) => Some(TokenKind::Gt),
            ('!', _) => Some(TokenKind::Bang),
            ('&', _) => Some(TokenKind::Amp),
            ('|', _) => Some(TokenKind::Pipe),
            _ => None,
        };
        let span = cur.span_from(start);
        match kind {
            Some(kind) => tokens.push(Token { kind, span }),
            None => diags.push(Diagnostic::error(
                Code::UnknownCharacter,
                span,
                format!("unknown character `{}`", c.escape_default()),
            )),
        }
    }

    if diags.is_empty() {
        Ok(tokens)
    } else {
        Err(diags)
    }
}
