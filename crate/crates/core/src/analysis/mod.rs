//! Semantic analysis: name resolution, type and unit checking,
//! normalization metadata and cross-model linking.

mod check;
mod link;
mod normalize;
mod typed;

use std::collections::HashMap;
use std::fmt;

use crate::diagnostic::Diagnostic;
use crate::domain::ValueType;
use crate::expr::{Expr, Span};
use crate::syntax::ast::{Direction, Model};
use crate::syntax::parse_model;
use crate::units::Unit;

pub use link::{link_models, AdaptationPipeline, Link, LinkError, LinkSpec};
pub use normalize::{compute_normalization, Extrema, NormalizationInfo, GRID_CAP};
pub use typed::{EvalError, Func, TExpr};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum SymbolKind {
    Context,
    VarPoint,
    General,
}

impl SymbolKind {
    pub(crate) fn plural(self) -> &'static str {
        match self {
            SymbolKind::Context => "context variables",
            SymbolKind::VarPoint => "variation points",
            SymbolKind::General => "auxiliary variables",
        }
    }
}

impl fmt::Display for SymbolKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            SymbolKind::Context => "context variable",
            SymbolKind::VarPoint => "variation point",
            SymbolKind::General => "auxiliary variable",
        })
    }
}

/// Static type of an expression. `Error` poisons an expression whose parts
/// were already reported, so one mistake yields one diagnostic.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ExprType {
    Num(Unit),
    /// Index into [`TypedModel::types`].
    Enum(usize),
    Bool,
    Error,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Symbol {
    pub name: String,
    pub kind: SymbolKind,
    /// Index into [`TypedModel::types`]; `None` for unannotated generals.
    pub declared_type: Option<usize>,
    pub ty: ExprType,
    pub span: Span,
}

#[derive(Debug, Clone, PartialEq)]
pub struct TypedGeneral {
    pub slot: usize,
    pub expr: TExpr,
}

#[derive(Debug, Clone, PartialEq)]
pub struct TypedRule {
    pub name: String,
    pub condition: TExpr,
    pub consequence: TExpr,
    pub span: Span,
}

/// Invariant or implication from a varpoint body.
#[derive(Debug, Clone, PartialEq)]
pub struct TypedConstraint {
    pub name: String,
    pub owner: usize,
    pub guard: Option<TExpr>,
    pub relation: TExpr,
    pub span: Span,
}

#[derive(Debug, Clone, PartialEq)]
pub struct TypedFunction {
    pub name: String,
    /// Slots of the parameters, in the order written.
    pub params: Vec<usize>,
    pub body: TExpr,
    pub span: Span,
}

#[derive(Debug, Clone, PartialEq)]
pub struct TypedProperty {
    pub name: String,
    pub direction: Option<Direction>,
    pub priorities: Vec<TypedFunction>,
    pub definitions: Vec<TypedFunction>,
    pub span: Span,
}

/// A resolved model. Every variable has a slot (its index in `symbols`);
/// expressions refer to slots.
#[derive(Debug, Clone, PartialEq)]
pub struct TypedModel {
    pub model: Model,
    pub types: Vec<ValueType>,
    pub type_index: HashMap<String, usize>,
    pub symbols: Vec<Symbol>,
    pub symbol_index: HashMap<String, usize>,
    /// Enum literal name → (type index, code).
    pub literals: HashMap<String, (usize, i64)>,
    /// General vars in dependency order.
    pub generals: Vec<TypedGeneral>,
    pub rules: Vec<TypedRule>,
    pub varpoint_constraints: Vec<TypedConstraint>,
    pub properties: Vec<TypedProperty>,
    unit_diagnostics: Vec<Diagnostic>,
}

/// Resolves names and computes expression types and units. Unit problems
/// are not fatal here; they are reported by [`check_units`].
pub fn resolve_and_typecheck(model: &Model) -> Result<TypedModel, Vec<Diagnostic>> {
    check::check_model(model)
}

/// Unit diagnostics of an analyzed model.
pub fn check_units(tm: &TypedModel) -> Vec<Diagnostic> {
    tm.unit_diagnostics.clone()
}

/// Parses and fully checks `source`, failing on any error diagnostic.
pub fn analyze(source: &str) -> Result<TypedModel, Vec<Diagnostic>> {
    let model = parse_model(source)?;
    analyze_model(&model)
}

pub fn analyze_model(model: &Model) -> Result<TypedModel, Vec<Diagnostic>> {
    let tm = resolve_and_typecheck(model)?;
    let units = check_units(&tm);
    if !units.is_empty() {
        return Err(units);
    }
    Ok(tm)
}

impl TypedModel {
    pub fn slot(&self, name: &str) -> Option<usize> {
        self.symbol_index.get(name).copied()
    }

    pub fn symbol(&self, name: &str) -> Option<&Symbol> {
        self.slot(name).map(|s| &self.symbols[s])
    }

    pub fn slots_of(&self, kind: SymbolKind) -> impl Iterator<Item = usize> + '_ {
        self.symbols.iter().enumerate().filter(move |(_, s)| s.kind == kind).map(|(i, _)| i)
    }

    pub fn contexts(&self) -> impl Iterator<Item = &Symbol> {
        self.symbols.iter().filter(|s| s.kind == SymbolKind::Context)
    }

    pub fn varpoints(&self) -> impl Iterator<Item = &Symbol> {
        self.symbols.iter().filter(|s| s.kind == SymbolKind::VarPoint)
    }

    /// Declared type of a context or varpoint slot.
    pub fn value_type(&self, slot: usize) -> Option<&ValueType> {
        self.symbols[slot].declared_type.map(|t| &self.types[t])
    }

    pub fn slot_name(&self, slot: usize) -> &str {
        &self.symbols[slot].name
    }

    /// Fills in general vars of `env` from the values already present.
    /// Generals whose inputs are NaN (unbound) stay NaN.
    pub fn compute_generals(&self, env: &mut [f64]) -> Result<(), EvalError> {
        for g in &self.generals {
            let reads = g.expr.slots();
            env[g.slot] = if reads.iter().any(|&s| env[s].is_nan()) {
                f64::NAN
            } else {
                g.expr.eval(env)?
            };
        }
        Ok(())
    }

    /// Builds a slot environment from named values; unbound slots are NaN.
    pub fn environment<'a>(
        &self,
        values: impl IntoIterator<Item = (&'a str, f64)>,
    ) -> Result<Vec<f64>, EvalError> {
        let mut env = vec![f64::NAN; self.symbols.len()];
        for (name, v) in values {
            let slot = self.slot(name).ok_or_else(|| EvalError::Unbound(name.to_string()))?;
            if self.symbols[slot].kind == SymbolKind::General {
                return Err(EvalError::Invalid(format!("`{name}` is computed, it cannot be set")));
            }
            env[slot] = v;
        }
        self.compute_generals(&mut env)?;
        Ok(env)
    }

    /// Type-checks `e` against this model's declarations.
    pub fn check_expr(&self, e: &Expr) -> Result<(TExpr, ExprType), Vec<Diagnostic>> {
        let mut checker = check::Checker::new(&self.model);
        checker.types = self.types.clone();
        checker.type_index = self.type_index.clone();
        checker.symbols = self.symbols.clone();
        checker.symbol_index = self.symbol_index.clone();
        checker.literals = self.literals.clone();
        let (t, ty) = checker.check_expr(e);
        let mut diags = checker.errors;
        diags.extend(checker.unit_diags);
        if diags.is_empty() {
            Ok((t, ty))
        } else {
            Err(diags)
        }
    }

    /// Evaluates a source expression with contexts and varpoints taken from
    /// `values`; general vars are derived. Booleans come back as 0/1 and
    /// enum values as their codes.
    pub fn eval_expr<'a>(
        &self,
        e: &Expr,
        values: impl IntoIterator<Item = (&'a str, f64)>,
    ) -> Result<f64, EvalError> {
        let (t, _) = self.check_expr(e).map_err(|d| EvalError::Invalid(d[0].message.clone()))?;
        let env = self.environment(values)?;
        if let Some(&s) = t.slots().iter().find(|&&s| env[s].is_nan()) {
            return Err(EvalError::Unbound(self.symbols[s].name.clone()));
        }
        t.eval(&env)
    }

    /// Whether the property enters the objective and has a direction.
    pub fn direction_of(&self, property: &str) -> Option<Direction> {
        self.properties.iter().find(|p| p.name == property).and_then(|p| p.direction)
    }
}
