//! Syntax tree of a VML file. Declaration order is preserved.

use crate::expr::{Expr, Literal, Span};

#[derive(Debug, Clone, PartialEq)]
pub struct Ident {
    pub name: String,
    pub span: Span,
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct Model {
    pub items: Vec<Item>,
}

#[derive(Debug, Clone, PartialEq)]
pub enum Item {
    Type(TypeDef),
    Var(VarDef),
    Rule(RuleDecl),
}

#[derive(Debug, Clone, PartialEq)]
pub enum TypeDef {
    Enum(EnumDecl),
    Number(NumberDecl),
    Boolean(BoolDecl),
}

impl TypeDef {
    pub fn name(&self) -> &Ident {
        match self {
            TypeDef::Enum(d) => &d.name,
            TypeDef::Number(d) => &d.name,
            TypeDef::Boolean(d) => &d.name,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct EnumDecl {
    pub name: Ident,
    pub literals: Vec<EnumLiteralDecl>,
    pub span: Span,
}

#[derive(Debug, Clone, PartialEq)]
pub struct EnumLiteralDecl {
    pub name: Ident,
    pub code: Option<i64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct NumberDecl {
    pub name: Ident,
    pub lo: Literal,
    pub hi: Literal,
    pub precision: Literal,
    pub unit: Option<String>,
    pub span: Span,
}

#[derive(Debug, Clone, PartialEq)]
pub struct BoolDecl {
    pub name: Ident,
    pub span: Span,
}

#[derive(Debug, Clone, PartialEq)]
pub enum VarDef {
    General(GeneralVar),
    Context(ContextDecl),
    VarPoint(VarPointDecl),
    Property(PropertyDecl),
}

impl VarDef {
    pub fn name(&self) -> &Ident {
        match self {
            VarDef::General(d) => &d.name,
            VarDef::Context(d) => &d.name,
            VarDef::VarPoint(d) => &d.name,
            VarDef::Property(d) => &d.name,
        }
    }
}

/// `var name (: type)? = expr;` The annotation is optional, the type is
/// inferred when absent.
#[derive(Debug, Clone, PartialEq)]
pub struct GeneralVar {
    pub name: Ident,
    pub ty: Option<Ident>,
    pub value: Expr,
    pub span: Span,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ContextDecl {
    pub name: Ident,
    pub ty: Ident,
    pub span: Span,
}

#[derive(Debug, Clone, PartialEq)]
pub struct VarPointDecl {
    pub name: Ident,
    pub ty: Ident,
    pub body: Vec<Constraint>,
    pub span: Span,
}

/// Item of a varpoint body.
#[derive(Debug, Clone, PartialEq)]
pub enum Constraint {
    Invariant(Expr),
    Implication(Implication),
}

#[derive(Debug, Clone, PartialEq)]
pub struct Implication {
    pub condition: Expr,
    pub consequence: Expr,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Direction {
    Minimized,
    Maximized,
}

#[derive(Debug, Clone, PartialEq)]
pub struct PropertyDecl {
    pub name: Ident,
    pub ty: Ident,
    pub direction: Option<Direction>,
    pub priorities: Vec<FunctionDef>,
    pub definitions: Vec<FunctionDef>,
    pub span: Span,
}

/// `f(x, y) = body`
#[derive(Debug, Clone, PartialEq)]
pub struct FunctionDef {
    pub name: Ident,
    pub params: Vec<Ident>,
    pub body: Expr,
    pub span: Span,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RuleDecl {
    pub name: Ident,
    pub implication: Implication,
    pub span: Span,
}

impl Model {
    pub fn types(&self) -> impl Iterator<Item = &TypeDef> {
        self.items.iter().filter_map(|i| match i {
            Item::Type(t) => Some(t),
            _ => None,
        })
    }

    pub fn vars(&self) -> impl Iterator<Item = &VarDef> {
        self.items.iter().filter_map(|i| match i {
            Item::Var(v) => Some(v),
            _ => None,
        })
    }

    pub fn rules(&self) -> impl Iterator<Item = &RuleDecl> {
        self.items.iter().filter_map(|i| match i {
            Item::Rule(r) => Some(r),
            _ => None,
        })
    }

    pub fn contexts(&self) -> impl Iterator<Item = &ContextDecl> {
        self.vars().filter_map(|v| match v {
            VarDef::Context(c) => Some(c),
            _ => None,
        })
    }

    pub fn varpoints(&self) -> impl Iterator<Item = &VarPointDecl> {
        self.vars().filter_map(|v| match v {
            VarDef::VarPoint(c) => Some(c),
            _ => None,
        })
    }

    pub fn properties(&self) -> impl Iterator<Item = &PropertyDecl> {
        self.vars().filter_map(|v| match v {
            VarDef::Property(c) => Some(c),
            _ => None,
        })
    }

    pub fn general_vars(&self) -> impl Iterator<Item = &GeneralVar> {
        self.vars().filter_map(|v| match v {
            VarDef::General(c) => Some(c),
            _ => None,
        })
    }
}
