//! Lowering a typed model to a weighted constraint optimization problem.
//!
//! The objective is `Σ sign_i · w_i(ctx) · p_i(vp)`: `sign` is +1 for
//! minimized and −1 for maximized properties, `w_i` is the mean of the
//! property's priorities normalized to [0, 1] and `p_i` the mean of its
//! definitions normalized to [0, 100].

mod linearize;
mod minizinc;

use thiserror::Error;

use crate::analysis::{
    Extrema, ExprType, NormalizationInfo, SymbolKind, TExpr, TypedFunction, TypedModel,
};
use crate::diagnostic::{Code, Diagnostic};
use crate::domain::{Domain, ValueType};
use crate::syntax::ast::Direction;

pub use linearize::{piecewise_linearize, PiecewiseLinear};
pub use minizinc::{emit_minizinc, EmitError};

/// Default number of chord segments per nonlinear definition.
pub const DEFAULT_SEGMENTS: usize = 5;

#[derive(Debug, Clone, PartialEq)]
pub struct Parameter {
    pub name: String,
    pub slot: usize,
    pub ty: ValueType,
}

/// A general var, computed from parameters (and other auxiliaries).
#[derive(Debug, Clone, PartialEq)]
pub struct Auxiliary {
    pub name: String,
    pub slot: usize,
    pub ty: ExprType,
    pub expr: TExpr,
}

#[derive(Debug, Clone, PartialEq)]
pub struct DecisionVar {
    pub name: String,
    pub slot: usize,
    pub ty: ValueType,
    pub domain: Domain,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ConstraintKind {
    /// An adaptation rule.
    Rule,
    /// From a varpoint body.
    Dependency,
}

/// `guard -> relation`, or just `relation` when there is no guard.
#[derive(Debug, Clone, PartialEq)]
pub struct ProblemConstraint {
    pub name: String,
    pub kind: ConstraintKind,
    pub guard: Option<TExpr>,
    pub relation: TExpr,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Sign {
    Plus,
    Minus,
}

impl Sign {
    pub fn from_direction(d: Direction) -> Sign {
        match d {
            Direction::Minimized => Sign::Plus,
            Direction::Maximized => Sign::Minus,
        }
    }

    pub fn value(self) -> f64 {
        match self {
            Sign::Plus => 1.0,
            Sign::Minus => -1.0,
        }
    }
}

/// A function rescaled so its extrema map to 0 and `top`.
#[derive(Debug, Clone, PartialEq)]
pub struct NormalizedFn {
    pub function: TypedFunction,
    pub extrema: Extrema,
    pub top: f64,
}

impl NormalizedFn {
    pub fn eval(&self, env: &[f64]) -> f64 {
        let raw = self.function.body.eval(env).unwrap_or(f64::NAN);
        self.extrema.scale(raw, self.top)
    }
}

/// Which form of nonlinear definitions the objective uses.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum ObjectiveMode {
    /// Chord surrogates, as emitted to MiniZinc.
    #[default]
    Linearized,
    /// The normalized definitions themselves.
    Exact,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ObjectiveTerm {
    pub property: String,
    pub sign: Sign,
    /// Normalized to [0, 1].
    pub weights: Vec<NormalizedFn>,
    /// Normalized to [0, 100].
    pub values: Vec<NormalizedFn>,
    /// Chord surrogate per value, for nonlinear single-variable definitions.
    pub surrogates: Vec<Option<PiecewiseLinear>>,
}

fn mean(xs: impl ExactSizeIterator<Item = f64>) -> f64 {
    let n = xs.len() as f64;
    xs.sum::<f64>() / n
}

impl ObjectiveTerm {
    /// `w_i(ctx)`; reads only parameter and auxiliary slots.
    pub fn weight(&self, env: &[f64]) -> f64 {
        mean(self.weights.iter().map(|w| w.eval(env)))
    }

    /// `p_i(vp)`; reads only decision slots.
    pub fn value(&self, env: &[f64], mode: ObjectiveMode) -> f64 {
        mean(self.values.iter().zip(&self.surrogates).map(|(v, s)| match (mode, s) {
            (ObjectiveMode::Linearized, Some(pl)) => pl.eval(env[pl.slot]).clamp(0.0, v.top),
            _ => v.eval(env),
        }))
    }

    /// Decision slots the value depends on.
    pub fn decision_slots(&self) -> Vec<usize> {
        let mut out: Vec<usize> = self.values.iter().flat_map(|v| v.function.params.clone()).collect();
        out.sort_unstable();
        out.dedup();
        out
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ConstraintProblem {
    /// Variable name per slot, shared with the expressions.
    pub slot_names: Vec<String>,
    pub parameters: Vec<Parameter>,
    /// In dependency order.
    pub auxiliaries: Vec<Auxiliary>,
    pub variables: Vec<DecisionVar>,
    pub constraints: Vec<ProblemConstraint>,
    pub objective: Vec<ObjectiveTerm>,
    pub warnings: Vec<Diagnostic>,
}

impl ConstraintProblem {
    pub fn slot_count(&self) -> usize {
        self.slot_names.len()
    }

    pub fn parameter(&self, name: &str) -> Option<&Parameter> {
        self.parameters.iter().find(|p| p.name == name)
    }

    pub fn variable(&self, name: &str) -> Option<&DecisionVar> {
        self.variables.iter().find(|v| v.name == name)
    }

    /// Fills auxiliary slots of `env` from the parameters already in it.
    pub fn compute_auxiliaries(&self, env: &mut [f64]) {
        for a in &self.auxiliaries {
            env[a.slot] = a.expr.eval(env).unwrap_or(f64::NAN);
        }
    }
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum LowerError {
    #[error("property `{0}` is neither minimized nor maximized")]
    MissingDirection(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct LowerOptions {
    /// Chord segments per nonlinear definition.
    pub segments: usize,
}

impl Default for LowerOptions {
    fn default() -> Self {
        LowerOptions { segments: DEFAULT_SEGMENTS }
    }
}

pub fn lower(tm: &TypedModel, ni: &NormalizationInfo) -> Result<ConstraintProblem, Vec<Diagnostic>> {
    lower_with(tm, ni, LowerOptions::default())
}

pub fn lower_with(
    tm: &TypedModel,
    ni: &NormalizationInfo,
    options: LowerOptions,
) -> Result<ConstraintProblem, Vec<Diagnostic>> {
    let segments = options.segments.max(1);
    let typed = |slot: usize| tm.value_type(slot).cloned().expect("analyzed symbols are typed");

    let parameters = tm
        .slots_of(SymbolKind::Context)
        .map(|slot| Parameter { name: tm.slot_name(slot).to_string(), slot, ty: typed(slot) })
        .collect();
    let variables: Vec<DecisionVar> = tm
        .slots_of(SymbolKind::VarPoint)
        .map(|slot| {
            let ty = typed(slot);
            DecisionVar { name: tm.slot_name(slot).to_string(), slot, domain: ty.domain(), ty }
        })
        .collect();
    let auxiliaries = tm
        .generals
        .iter()
        .map(|g| Auxiliary {
            name: tm.slot_name(g.slot).to_string(),
            slot: g.slot,
            ty: tm.symbols[g.slot].ty,
            expr: g.expr.clone(),
        })
        .collect();

    let mut constraints: Vec<ProblemConstraint> = tm
        .rules
        .iter()
        .map(|r| ProblemConstraint {
            name: r.name.clone(),
            kind: ConstraintKind::Rule,
            guard: Some(r.condition.clone()),
            relation: r.consequence.clone(),
        })
        .collect();
    constraints.extend(tm.varpoint_constraints.iter().map(|c| ProblemConstraint {
        name: c.name.clone(),
        kind: ConstraintKind::Dependency,
        guard: c.guard.clone(),
        relation: c.relation.clone(),
    }));

    let mut errors = Vec::new();
    let mut objective = Vec::new();
    for (i, p) in tm.properties.iter().enumerate() {
        let Some(direction) = p.direction else {
            errors.push(Diagnostic::error(
                Code::MissingDirection,
                p.span,
                LowerError::MissingDirection(p.name.clone()).to_string(),
            ));
            continue;
        };
        let weights = p
            .priorities
            .iter()
            .zip(&ni.priorities[i])
            .map(|(f, e)| NormalizedFn { function: f.clone(), extrema: *e, top: 1.0 })
            .collect();
        let values: Vec<NormalizedFn> = p
            .definitions
            .iter()
            .zip(&ni.definitions[i])
            .map(|(f, e)| NormalizedFn { function: f.clone(), extrema: *e, top: 100.0 })
            .collect();
        let surrogates = values
            .iter()
            .map(|v| match v.function.params.as_slice() {
                [slot] if !v.function.body.is_affine_in(*slot) => {
                    let domain = typed(*slot).domain();
                    Some(piecewise_linearize(v, *slot, &domain, segments))
                }
                _ => None,
            })
            .collect();
        objective.push(ObjectiveTerm {
            property: p.name.clone(),
            sign: Sign::from_direction(direction),
            weights,
            values,
            surrogates,
        });
    }
    if !errors.is_empty() {
        return Err(errors);
    }

    let mut warnings = Vec::new();
    for v in &variables {
        let in_constraint = constraints.iter().any(|c| {
            c.relation.slots().contains(&v.slot)
                || c.guard.as_ref().is_some_and(|g| g.slots().contains(&v.slot))
        });
        let in_objective = objective.iter().any(|t| t.decision_slots().contains(&v.slot));
        if !in_constraint && !in_objective {
            warnings.push(Diagnostic::warning(
                Code::UnboundVarpoint,
                tm.symbols[v.slot].span,
                format!("variation point `{}` is not constrained by anything; its value is arbitrary", v.name),
            ));
        }
    }

    Ok(ConstraintProblem {
        slot_names: tm.symbols.iter().map(|s| s.name.clone()).collect(),
        parameters,
        auxiliaries,
        variables,
        constraints,
        objective,
        warnings,
    })
}

/// Parses, analyzes, normalizes and lowers `source` in one go.
pub fn compile_source(source: &str, options: LowerOptions) -> Result<ConstraintProblem, Vec<Diagnostic>> {
    let tm = crate::analysis::analyze(source)?;
    let ni = crate::analysis::compute_normalization(&tm)?;
    lower_with(&tm, &ni, options)
}
