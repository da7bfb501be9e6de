//! Name resolution and type/unit checking.

use std::collections::HashMap;

use crate::diagnostic::{Code, Diagnostic};
use crate::domain::{EnumType, NumericType, ValueType};
use crate::expr::{BinaryOp, Expr, ExprKind, Span, UnaryOp};
use crate::syntax::ast::{self, Constraint, Item, Model, TypeDef, VarDef};
use crate::units::Unit;

use super::typed::{Func, TExpr};
use super::{
    ExprType, Symbol, SymbolKind, TypedConstraint, TypedFunction, TypedGeneral, TypedModel,
    TypedProperty, TypedRule,
};

pub(super) struct Checker<'m> {
    model: &'m Model,
    pub types: Vec<ValueType>,
    pub type_index: HashMap<String, usize>,
    pub symbols: Vec<Symbol>,
    pub symbol_index: HashMap<String, usize>,
    pub literals: HashMap<String, (usize, i64)>,
    properties: HashMap<String, Span>,
    pub errors: Vec<Diagnostic>,
    pub unit_diags: Vec<Diagnostic>,
}

fn wrap_scale(e: TExpr, factor: f64) -> TExpr {
    if factor == 1.0 {
        e
    } else {
        TExpr::Scale(factor, Box::new(e))
    }
}

impl<'m> Checker<'m> {
    pub fn new(model: &'m Model) -> Self {
        Checker {
            model,
            types: Vec::new(),
            type_index: HashMap::new(),
            symbols: Vec::new(),
            symbol_index: HashMap::new(),
            literals: HashMap::new(),
            properties: HashMap::new(),
            errors: Vec::new(),
            unit_diags: Vec::new(),
        }
    }

    fn error(&mut self, code: Code, span: Span, msg: impl Into<String>) {
        self.errors.push(Diagnostic::error(code, span, msg));
    }

    fn unit_error(&mut self, span: Span, msg: impl Into<String>) {
        self.unit_diags.push(Diagnostic::error(Code::UnitMismatch, span, msg));
    }

    pub fn run(mut self) -> Result<TypedModel, Vec<Diagnostic>> {
        self.declare_types();
        self.declare_symbols();
        let generals = self.check_generals();
        let rules = self.check_rules();
        let varpoint_constraints = self.check_varpoint_bodies();
        let properties = self.check_properties();

        if !self.errors.is_empty() {
            let mut errs = self.errors;
            errs.extend(self.unit_diags);
            errs.sort_by_key(|d| (d.span.offset, d.code.as_str()));
            return Err(errs);
        }
        Ok(TypedModel {
            model: self.model.clone(),
            types: self.types,
            type_index: self.type_index,
            symbols: self.symbols,
            symbol_index: self.symbol_index,
            literals: self.literals,
            generals,
            rules,
            varpoint_constraints,
            properties,
            unit_diagnostics: self.unit_diags,
        })
    }

    fn declare_types(&mut self) {
        for def in self.model.types() {
            let name = def.name();
            if self.type_index.contains_key(&name.name) {
                self.error(
                    Code::DuplicateDeclaration,
                    name.span,
                    format!("type `{}` is declared twice", name.name),
                );
                continue;
            }
            let built = match def {
                TypeDef::Number(n) => NumericType::new(
                    n.name.name.clone(),
                    n.lo.value,
                    n.hi.value,
                    n.precision.value,
                    n.unit.clone(),
                )
                .map(ValueType::Numeric),
                TypeDef::Enum(e) => EnumType::new(
                    e.name.name.clone(),
                    e.literals.iter().map(|l| (l.name.name.clone(), l.code)),
                )
                .map(ValueType::Enum),
                TypeDef::Boolean(b) => {
                    Ok(ValueType::Bool(crate::domain::BoolType { name: b.name.name.clone() }))
                }
            };
            match built {
                Ok(t) => {
                    let idx = self.types.len();
                    if let ValueType::Enum(e) = &t {
                        for lit in &e.literals {
                            if self.literals.insert(lit.name.clone(), (idx, lit.code)).is_some() {
                                self.error(
                                    Code::DuplicateDeclaration,
                                    name.span,
                                    format!("enum literal `{}` is declared twice", lit.name),
                                );
                            }
                        }
                    }
                    self.type_index.insert(name.name.clone(), idx);
                    self.types.push(t);
                }
                Err(e) => self.error(Code::InvalidType, name.span, e.to_string()),
            }
        }
    }

    fn resolve_type(&mut self, ty: &ast::Ident) -> Option<usize> {
        match self.type_index.get(&ty.name) {
            Some(i) => Some(*i),
            None => {
                self.error(Code::UndeclaredType, ty.span, format!("undeclared type `{}`", ty.name));
                None
            }
        }
    }

    fn expr_type_of(&self, ty: usize) -> ExprType {
        match &self.types[ty] {
            ValueType::Numeric(n) => ExprType::Num(n.unit()),
            ValueType::Enum(_) => ExprType::Enum(ty),
            ValueType::Bool(_) => ExprType::Bool,
        }
    }

    fn declare_symbols(&mut self) {
        for var in self.model.vars() {
            let name = var.name();
            if self.symbol_index.contains_key(&name.name)
                || self.properties.contains_key(&name.name)
                || self.literals.contains_key(&name.name)
            {
                self.error(
                    Code::DuplicateDeclaration,
                    name.span,
                    format!("`{}` is already declared", name.name),
                );
                continue;
            }
            let (kind, ty_ref) = match var {
                VarDef::Context(c) => (SymbolKind::Context, Some(&c.ty)),
                VarDef::VarPoint(v) => (SymbolKind::VarPoint, Some(&v.ty)),
                VarDef::General(g) => (SymbolKind::General, g.ty.as_ref()),
                VarDef::Property(p) => {
                    self.resolve_type(&p.ty);
                    self.properties.insert(name.name.clone(), name.span);
                    continue;
                }
            };
            let (declared, ty) = match ty_ref.map(|t| self.resolve_type(t)) {
                Some(Some(idx)) => (Some(idx), self.expr_type_of(idx)),
                Some(None) => (None, ExprType::Error),
                // inferred later
                None => (None, ExprType::Error),
            };
            self.symbol_index.insert(name.name.clone(), self.symbols.len());
            self.symbols.push(Symbol {
                name: name.name.clone(),
                kind,
                declared_type: declared,
                ty,
                span: name.span,
            });
        }
    }

    /// General vars in dependency order; cycles are reported.
    fn check_generals(&mut self) -> Vec<TypedGeneral> {
        let generals: Vec<&ast::GeneralVar> = self.model.general_vars().collect();
        let by_name: HashMap<&str, usize> =
            generals.iter().enumerate().map(|(i, g)| (g.name.name.as_str(), i)).collect();
        let deps: Vec<Vec<usize>> = generals
            .iter()
            .map(|g| g.value.identifiers().iter().filter_map(|n| by_name.get(n).copied()).collect())
            .collect();

        // 0 = unvisited, 1 = on stack, 2 = done
        let mut state = vec![0u8; generals.len()];
        let mut order = Vec::new();
        let mut cyclic = vec![false; generals.len()];
        fn visit(
            i: usize,
            deps: &[Vec<usize>],
            state: &mut [u8],
            order: &mut Vec<usize>,
            cyclic: &mut [bool],
        ) {
            state[i] = 1;
            for &d in &deps[i] {
                match state[d] {
                    0 => visit(d, deps, state, order, cyclic),
                    1 => {
                        cyclic[d] = true;
                        cyclic[i] = true;
                    }
                    _ => {}
                }
            }
            state[i] = 2;
            order.push(i);
        }
        for i in 0..generals.len() {
            if state[i] == 0 {
                visit(i, &deps, &mut state, &mut order, &mut cyclic);
            }
        }
        for (i, g) in generals.iter().enumerate() {
            if cyclic[i] {
                self.error(
                    Code::CyclicDefinition,
                    g.name.span,
                    format!("`{}` depends on itself", g.name.name),
                );
            }
        }

        let mut out = Vec::new();
        for i in order {
            if cyclic[i] {
                continue;
            }
            let g = generals[i];
            let Some(&slot) = self.symbol_index.get(&g.name.name) else { continue };
            if self.symbols[slot].kind != SymbolKind::General {
                continue;
            }
            let (mut expr, mut ty) = self.check_expr(&g.value);
            self.forbid_kind(&g.value, SymbolKind::VarPoint, "an auxiliary variable");
            if let Some(declared) = self.symbols[slot].declared_type {
                let target = self.expr_type_of(declared);
                match (ty, target) {
                    (ExprType::Error, _) => {}
                    (ExprType::Num(from), ExprType::Num(to)) => {
                        if from.is_dimensionless() || to.is_dimensionless() {
                        } else if from.dimension != to.dimension {
                            self.unit_error(
                                g.value.span,
                                format!("`{}` is declared in {to} but its value is in {from}", g.name.name),
                            );
                        } else {
                            expr = wrap_scale(expr, from.scale / to.scale);
                        }
                    }
                    (ExprType::Enum(_), ExprType::Num(_)) => {}
                    (a, b) if a == b => {}
                    (a, b) => self.error(
                        Code::TypeMismatch,
                        g.value.span,
                        format!("`{}` is declared as {} but its value is {}", g.name.name, self.describe(b), self.describe(a)),
                    ),
                }
                ty = target;
            }
            self.symbols[slot].ty = ty;
            out.push(TypedGeneral { slot, expr });
        }
        out
    }

    fn check_rules(&mut self) -> Vec<TypedRule> {
        let mut out = Vec::new();
        for rule in self.model.rules() {
            let imp = &rule.implication;
            let condition = self.check_bool(&imp.condition);
            self.forbid_kind(&imp.condition, SymbolKind::VarPoint, "a rule condition");
            let consequence = self.check_bool(&imp.consequence);
            self.require_varpoint(&imp.consequence, "a rule consequence");
            out.push(TypedRule { name: rule.name.name.clone(), condition, consequence, span: rule.span });
        }
        out
    }

    fn check_varpoint_bodies(&mut self) -> Vec<TypedConstraint> {
        let mut out = Vec::new();
        for vp in self.model.varpoints() {
            let Some(&owner) = self.symbol_index.get(&vp.name.name) else { continue };
            for (i, c) in vp.body.iter().enumerate() {
                let name = format!("{}#{}", vp.name.name, i + 1);
                match c {
                    Constraint::Invariant(e) => {
                        let relation = self.check_bool(e);
                        self.require_varpoint(e, "a varpoint invariant");
                        out.push(TypedConstraint { name, owner, guard: None, relation, span: e.span });
                    }
                    Constraint::Implication(imp) => {
                        let guard = self.check_bool(&imp.condition);
                        let relation = self.check_bool(&imp.consequence);
                        self.require_varpoint(&imp.consequence, "a varpoint implication");
                        out.push(TypedConstraint {
                            name,
                            owner,
                            guard: Some(guard),
                            relation,
                            span: imp.condition.span.to(imp.consequence.span),
                        });
                    }
                }
            }
        }
        out
    }

    fn check_properties(&mut self) -> Vec<TypedProperty> {
        let mut out = Vec::new();
        for p in self.model.properties() {
            let priorities = p
                .priorities
                .iter()
                .map(|f| self.check_function(f, SymbolKind::Context, "priority"))
                .collect();
            let definitions = p
                .definitions
                .iter()
                .map(|f| self.check_function(f, SymbolKind::VarPoint, "definition"))
                .collect();
            out.push(TypedProperty {
                name: p.name.name.clone(),
                direction: p.direction,
                priorities,
                definitions,
                span: p.span,
            });
        }
        out
    }

    fn check_function(&mut self, f: &ast::FunctionDef, kind: SymbolKind, role: &str) -> TypedFunction {
        let mut params = Vec::new();
        for p in &f.params {
            match self.symbol_index.get(&p.name) {
                None => self.error(
                    Code::UndeclaredVariable,
                    p.span,
                    format!("undeclared variable `{}`", p.name),
                ),
                Some(&slot) if self.symbols[slot].kind != kind => self.error(
                    Code::TaxonomyViolation,
                    p.span,
                    format!(
                        "{role} functions depend on {}, but `{}` is a {}",
                        kind.plural(),
                        p.name,
                        self.symbols[slot].kind
                    ),
                ),
                Some(&slot) => params.push(slot),
            }
        }
        for name in f.body.identifiers() {
            if self.literals.contains_key(name) || f.params.iter().any(|p| p.name == name) {
                continue;
            }
            if let Some(&slot) = self.symbol_index.get(name) {
                let sym = &self.symbols[slot];
                let msg = if sym.kind != kind {
                    format!("{role} functions depend on {}, but `{name}` is a {}", kind.plural(), sym.kind)
                } else {
                    format!("`{name}` is used in the body but is not a parameter of `{}`", f.name.name)
                };
                self.error(Code::TaxonomyViolation, f.body.span, msg);
            }
        }
        let (body, ty) = self.check_expr(&f.body);
        if matches!(ty, ExprType::Bool) {
            self.error(Code::TypeMismatch, f.body.span, format!("{role} function must be numeric"));
        }
        TypedFunction { name: f.name.name.clone(), params, body, span: f.span }
    }

    fn describe(&self, ty: ExprType) -> String {
        match ty {
            ExprType::Num(u) if u.is_dimensionless() => "a number".into(),
            ExprType::Num(u) => format!("a number in {u}"),
            ExprType::Enum(i) => format!("a `{}` value", self.types[i].name()),
            ExprType::Bool => "a boolean".into(),
            ExprType::Error => "invalid".into(),
        }
    }

    fn check_bool(&mut self, e: &Expr) -> TExpr {
        let (t, ty) = self.check_expr(e);
        if !matches!(ty, ExprType::Bool | ExprType::Error) {
            let msg = format!("expected a condition, found {}", self.describe(ty));
            self.error(Code::TypeMismatch, e.span, msg);
        }
        t
    }

    fn referenced_symbols(&self, e: &Expr) -> Vec<usize> {
        e.identifiers().iter().filter_map(|n| self.symbol_index.get(*n).copied()).collect()
    }

    fn forbid_kind(&mut self, e: &Expr, kind: SymbolKind, role: &str) {
        for slot in self.referenced_symbols(e) {
            if self.symbols[slot].kind == kind {
                let msg = format!("{role} cannot reference the {} `{}`", kind, self.symbols[slot].name);
                self.error(Code::TaxonomyViolation, e.span, msg);
            }
        }
    }

    fn require_varpoint(&mut self, e: &Expr, role: &str) {
        let refs = self.referenced_symbols(e);
        if !refs.iter().any(|&s| self.symbols[s].kind == SymbolKind::VarPoint) {
            self.error(
                Code::TaxonomyViolation,
                e.span,
                format!("{role} must constrain at least one variation point"),
            );
        }
    }

    /// Brings two numeric operands of an additive or comparison operator to
    /// a common unit.
    fn unify_additive(
        &mut self,
        span: Span,
        op: BinaryOp,
        (a, ua): (TExpr, Unit),
        (b, ub): (TExpr, Unit),
    ) -> (TExpr, TExpr, Unit) {
        if ua.is_dimensionless() {
            return (a, b, ub);
        }
        if ub.is_dimensionless() || ua == ub {
            return (a, b, ua);
        }
        if ua.dimension == ub.dimension {
            let si = Unit::si(ua.dimension);
            return (wrap_scale(a, ua.scale), wrap_scale(b, ub.scale), si);
        }
        self.unit_error(span, format!("`{}` mixes {} and {}", op.symbol(), ua.dimension, ub.dimension));
        (a, b, ua)
    }

    fn unify_multiplicative(
        &mut self,
        span: Span,
        op: BinaryOp,
        (a, ua): (TExpr, Unit),
        (b, ub): (TExpr, Unit),
    ) -> (TExpr, TExpr, Unit) {
        if ub.is_dimensionless() {
            return (a, b, ua);
        }
        if ua.is_dimensionless() && op == BinaryOp::Mul {
            return (a, b, ub);
        }
        let a = wrap_scale(a, ua.scale);
        let b = wrap_scale(b, ub.scale);
        let unit = if op == BinaryOp::Mul { Unit::product(ua, ub) } else { Unit::quotient(ua, ub) };
        match unit {
            Some(u) => (a, b, u),
            None => {
                self.unit_error(
                    span,
                    format!("`{}` of {} and {} gives an unsupported unit", op.symbol(), ua.dimension, ub.dimension),
                );
                (a, b, Unit::DIMENSIONLESS)
            }
        }
    }

    pub fn check_expr(&mut self, e: &Expr) -> (TExpr, ExprType) {
        match &e.kind {
            ExprKind::Number(lit) => (TExpr::Const(lit.value), ExprType::Num(Unit::DIMENSIONLESS)),
            ExprKind::Bool(b) => (TExpr::Const(if *b { 1.0 } else { 0.0 }), ExprType::Bool),
            ExprKind::Ident(name) => {
                if let Some(&slot) = self.symbol_index.get(name) {
                    return (TExpr::Var(slot), self.symbols[slot].ty);
                }
                if let Some(&(ty, code)) = self.literals.get(name) {
                    return (TExpr::Const(code as f64), ExprType::Enum(ty));
                }
                if self.properties.contains_key(name) {
                    self.error(
                        Code::TypeMismatch,
                        e.span,
                        format!("property `{name}` has no value and cannot be used in an expression"),
                    );
                } else {
                    self.error(Code::UndeclaredVariable, e.span, format!("undeclared variable `{name}`"));
                }
                (TExpr::Const(0.0), ExprType::Error)
            }
            ExprKind::Unary(UnaryOp::Neg, inner) => {
                let (t, ty) = self.check_expr(inner);
                let ty = match ty {
                    ExprType::Num(_) | ExprType::Error => ty,
                    ExprType::Enum(_) => ExprType::Num(Unit::DIMENSIONLESS),
                    ExprType::Bool => {
                        self.error(Code::TypeMismatch, e.span, "cannot negate a boolean");
                        ExprType::Error
                    }
                };
                (TExpr::Neg(Box::new(t)), ty)
            }
            ExprKind::Unary(UnaryOp::Not, inner) => {
                let (t, ty) = self.check_expr(inner);
                if !matches!(ty, ExprType::Bool | ExprType::Error) {
                    let msg = format!("`!` needs a boolean, found {}", self.describe(ty));
                    self.error(Code::TypeMismatch, e.span, msg);
                }
                (TExpr::Not(Box::new(t)), ExprType::Bool)
            }
            ExprKind::Binary(op, lhs, rhs) => self.check_binary(e.span, *op, lhs, rhs),
            ExprKind::Call(name, args) => self.check_call(e.span, name, args),
        }
    }

    fn numeric_unit(&mut self, ty: ExprType, span: Span, op: &str) -> Option<Unit> {
        match ty {
            ExprType::Num(u) => Some(u),
            ExprType::Enum(_) => Some(Unit::DIMENSIONLESS),
            ExprType::Error => None,
            ExprType::Bool => {
                self.error(Code::TypeMismatch, span, format!("`{op}` needs numbers, found a boolean"));
                None
            }
        }
    }

    fn check_binary(&mut self, span: Span, op: BinaryOp, lhs: &Expr, rhs: &Expr) -> (TExpr, ExprType) {
        let (a, ta) = self.check_expr(lhs);
        let (b, tb) = self.check_expr(rhs);
        let build = |a: TExpr, b: TExpr| TExpr::Binary(op, Box::new(a), Box::new(b));

        if op.is_logical() {
            for (ty, side) in [(ta, lhs), (tb, rhs)] {
                if !matches!(ty, ExprType::Bool | ExprType::Error) {
                    let msg = format!("`{}` needs booleans, found {}", op.symbol(), self.describe(ty));
                    self.error(Code::TypeMismatch, side.span, msg);
                }
            }
            return (build(a, b), ExprType::Bool);
        }

        if matches!(op, BinaryOp::Eq | BinaryOp::Ne) {
            match (ta, tb) {
                (ExprType::Error, _) | (_, ExprType::Error) => return (build(a, b), ExprType::Bool),
                (ExprType::Bool, ExprType::Bool) => return (build(a, b), ExprType::Bool),
                (ExprType::Enum(x), ExprType::Enum(y)) if x != y => {
                    let msg = format!("cannot compare {} with {}", self.describe(ta), self.describe(tb));
                    self.error(Code::TypeMismatch, span, msg);
                    return (build(a, b), ExprType::Bool);
                }
                (ExprType::Bool, _) | (_, ExprType::Bool) => {
                    let msg = format!("cannot compare {} with {}", self.describe(ta), self.describe(tb));
                    self.error(Code::TypeMismatch, span, msg);
                    return (build(a, b), ExprType::Bool);
                }
                _ => {}
            }
        }

        let ua = self.numeric_unit(ta, lhs.span, op.symbol());
        let ub = self.numeric_unit(tb, rhs.span, op.symbol());
        let result_is_bool = op.is_comparison();
        let (Some(ua), Some(ub)) = (ua, ub) else {
            let ty = if result_is_bool { ExprType::Bool } else { ExprType::Error };
            return (build(a, b), ty);
        };
        match op {
            BinaryOp::Mul | BinaryOp::Div => {
                let (a, b, u) = self.unify_multiplicative(span, op, (a, ua), (b, ub));
                (build(a, b), ExprType::Num(u))
            }
            _ => {
                let (a, b, u) = self.unify_additive(span, op, (a, ua), (b, ub));
                let ty = if result_is_bool { ExprType::Bool } else { ExprType::Num(u) };
                (build(a, b), ty)
            }
        }
    }

    fn check_call(&mut self, span: Span, name: &str, args: &[Expr]) -> (TExpr, ExprType) {
        let Some(func) = Func::lookup(name) else {
            self.error(Code::UnknownFunction, span, format!("unknown function `{name}`"));
            return (TExpr::Const(0.0), ExprType::Error);
        };
        if matches!(func, Func::Min | Func::Max) && args.len() == 1 {
            return self.check_extremum(span, func == Func::Max, &args[0]);
        }
        let arity_ok = match func {
            Func::Exp | Func::Abs => args.len() == 1,
            Func::Min | Func::Max => args.len() >= 2,
        };
        if !arity_ok {
            self.error(
                Code::TypeMismatch,
                span,
                format!("wrong number of arguments to `{name}`: {}", args.len()),
            );
            return (TExpr::Const(0.0), ExprType::Error);
        }
        let mut checked = Vec::new();
        let mut units = Vec::new();
        for a in args {
            let (t, ty) = self.check_expr(a);
            units.push(self.numeric_unit(ty, a.span, name));
            checked.push(t);
        }
        if units.iter().any(Option::is_none) {
            return (TExpr::Call(func, checked), ExprType::Error);
        }
        let units: Vec<Unit> = units.into_iter().map(Option::unwrap).collect();
        match func {
            Func::Exp => (TExpr::Call(func, checked), ExprType::Num(Unit::DIMENSIONLESS)),
            Func::Abs => (TExpr::Call(func, checked), ExprType::Num(units[0])),
            Func::Min | Func::Max => {
                let dimensioned: Vec<Unit> =
                    units.iter().copied().filter(|u| !u.is_dimensionless()).collect();
                let Some(&first) = dimensioned.first() else {
                    return (TExpr::Call(func, checked), ExprType::Num(Unit::DIMENSIONLESS));
                };
                if dimensioned.iter().all(|u| *u == first) {
                    return (TExpr::Call(func, checked), ExprType::Num(first));
                }
                if dimensioned.iter().any(|u| u.dimension != first.dimension) {
                    self.unit_error(span, format!("arguments of `{name}` have different dimensions"));
                    return (TExpr::Call(func, checked), ExprType::Num(first));
                }
                let args = checked
                    .into_iter()
                    .zip(&units)
                    .map(|(t, u)| if u.is_dimensionless() { t } else { wrap_scale(t, u.scale) })
                    .collect();
                (TExpr::Call(func, args), ExprType::Num(Unit::si(first.dimension)))
            }
        }
    }

    fn check_extremum(&mut self, span: Span, max: bool, arg: &Expr) -> (TExpr, ExprType) {
        let (body, ty) = self.check_expr(arg);
        let Some(unit) = self.numeric_unit(ty, arg.span, if max { "max" } else { "min" }) else {
            return (TExpr::Const(0.0), ExprType::Error);
        };
        let slots = body.slots();
        let var = match slots.as_slice() {
            [s] if self.symbols[*s].kind == SymbolKind::Context => *s,
            _ => {
                self.error(
                    Code::InvalidExtremum,
                    span,
                    "a one-argument max/min must range over exactly one context variable",
                );
                return (TExpr::Const(0.0), ExprType::Error);
            }
        };
        let Some(declared) = self.symbols[var].declared_type else {
            return (TExpr::Const(0.0), ExprType::Error);
        };
        let domain = self.types[declared].domain();
        let mut env = vec![0.0; self.symbols.len()];
        let mut best: Option<f64> = None;
        for &v in domain.values() {
            env[var] = v;
            match body.eval(&env) {
                Ok(y) => {
                    best = Some(match best {
                        None => y,
                        Some(b) if max => b.max(y),
                        Some(b) => b.min(y),
                    })
                }
                Err(err) => {
                    self.error(Code::InvalidExtremum, span, format!("cannot evaluate extremum: {err}"));
                    return (TExpr::Const(0.0), ExprType::Error);
                }
            }
        }
        let value = best.unwrap_or(0.0);
        (TExpr::Extremum { max, var, body: Box::new(body), value }, ExprType::Num(unit))
    }
}

/// Shared by the public analyzer entry point.
pub(super) fn check_model(model: &Model) -> Result<TypedModel, Vec<Diagnostic>> {
    // items are already in declaration order; nothing else to prepare
    debug_assert!(model.items.iter().all(|i| matches!(i, Item::Type(_) | Item::Var(_) | Item::Rule(_))));
    Checker::new(model).run()
}
