//! Finding variation-point bindings that minimize the cost function under
//! the triggered constraints.

mod search;
mod sweep;

use std::collections::BTreeMap;
use std::time::Duration;

use thiserror::Error;

use crate::analysis::EvalError;
use crate::compile::ConstraintProblem;
use crate::diagnostic::{Code, Diagnostic};
use crate::expr::Span;

pub use crate::compile::ObjectiveMode;
pub use search::{brute_force, brute_force_with, solve, solve_with, BRUTE_FORCE_LIMIT};
pub use sweep::{sweep, write_sweep_csv, SweepRow};

/// Context values by name. Names the problem does not declare are ignored,
/// so one snapshot can serve several models.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct ContextSnapshot {
    values: BTreeMap<String, f64>,
}

impl ContextSnapshot {
    pub fn new() -> Self {
        ContextSnapshot::default()
    }

    pub fn with(mut self, name: &str, value: f64) -> Self {
        self.set(name, value);
        self
    }

    pub fn set(&mut self, name: &str, value: f64) {
        self.values.insert(name.to_string(), value);
    }

    pub fn get(&self, name: &str) -> Option<f64> {
        self.values.get(name).copied()
    }

    pub fn iter(&self) -> impl Iterator<Item = (&str, f64)> {
        self.values.iter().map(|(k, v)| (k.as_str(), *v))
    }

    /// Parses `name=value`; values may be enum literals or booleans when
    /// the context has such a type.
    pub fn assign(&mut self, cp: &ConstraintProblem, text: &str) -> Result<(), SolveError> {
        let (name, value) = text
            .split_once('=')
            .ok_or_else(|| SolveError::BadAssignment(text.to_string()))?;
        let (name, value) = (name.trim(), value.trim());
        let param = cp.parameter(name).ok_or_else(|| SolveError::UnknownContext(name.to_string()))?;
        let v = param.ty.parse_value(value).ok_or_else(|| SolveError::BadAssignment(text.to_string()))?;
        self.set(name, v);
        Ok(())
    }
}

impl<'a> FromIterator<(&'a str, f64)> for ContextSnapshot {
    fn from_iter<T: IntoIterator<Item = (&'a str, f64)>>(iter: T) -> Self {
        let mut s = ContextSnapshot::new();
        for (k, v) in iter {
            s.set(k, v);
        }
        s
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SolveStatus {
    Optimal,
    Infeasible,
}

impl SolveStatus {
    pub fn as_str(self) -> &'static str {
        match self {
            SolveStatus::Optimal => "optimal",
            SolveStatus::Infeasible => "infeasible",
        }
    }
}

#[derive(Debug, Clone, Copy, Default)]
pub struct SolveStats {
    /// Search nodes (partial or full assignments) visited.
    pub nodes: u64,
    pub elapsed: Duration,
}

#[derive(Debug, Clone)]
pub struct Solution {
    pub status: SolveStatus,
    /// Variation point values in declaration order; empty when infeasible.
    pub bindings: Vec<(String, f64)>,
    /// `None` when infeasible.
    pub objective: Option<f64>,
    /// Constraints whose guards held for the snapshot.
    pub triggered: Vec<String>,
    pub stats: SolveStats,
    pub warnings: Vec<Diagnostic>,
}

impl Solution {
    pub fn binding(&self, name: &str) -> Option<f64> {
        self.bindings.iter().find(|(n, _)| n == name).map(|(_, v)| *v)
    }

    pub fn is_optimal(&self) -> bool {
        self.status == SolveStatus::Optimal
    }

    /// Same status, bindings and bit-identical objective; statistics and
    /// warnings are ignored.
    pub fn same_outcome(&self, other: &Solution) -> bool {
        self.status == other.status
            && self.bindings == other.bindings
            && self.objective.map(f64::to_bits) == other.objective.map(f64::to_bits)
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct SolveOptions {
    pub mode: ObjectiveMode,
}

impl SolveOptions {
    pub fn exact() -> Self {
        SolveOptions { mode: ObjectiveMode::Exact }
    }
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum SolveError {
    #[error("no value for context `{0}`")]
    MissingContext(String),
    #[error("unknown context `{0}`")]
    UnknownContext(String),
    #[error("expected `name=value`, got `{0}`")]
    BadAssignment(String),
    #[error("no value for variation point `{0}`")]
    IncompleteBinding(String),
    #[error("joint domain has {0} points, more than the exhaustive search limit")]
    DomainTooLarge(u128),
    #[error(transparent)]
    Eval(#[from] EvalError),
}

/// Slot environment for a snapshot: parameters clamped and snapped onto
/// their grids, auxiliaries computed, decision slots NaN.
pub(crate) fn prepare(cp: &ConstraintProblem, ctx: &ContextSnapshot) -> Result<(Vec<f64>, Vec<Diagnostic>), SolveError> {
    let mut env = vec![f64::NAN; cp.slot_count()];
    let mut warnings = Vec::new();
    for p in &cp.parameters {
        let given = ctx.get(&p.name).ok_or_else(|| SolveError::MissingContext(p.name.clone()))?;
        let (value, clamped) = p.ty.snap(given);
        if clamped {
            warnings.push(Diagnostic::warning(
                Code::ClampedValue,
                Span::default(),
                format!("value {given} of `{}` is outside its range; using {value}", p.name),
            ));
        }
        env[p.slot] = value;
    }
    cp.compute_auxiliaries(&mut env);
    Ok((env, warnings))
}

/// Σ sign·w·p over the objective terms, in declaration order. Every cost
/// reported by this module is computed by this one expression.
pub(crate) fn cost_of(cp: &ConstraintProblem, weights: &[f64], values: impl Iterator<Item = f64>) -> f64 {
    let mut total = 0.0;
    for ((term, w), p) in cp.objective.iter().zip(weights).zip(values) {
        total += term.sign.value() * w * p;
    }
    total
}

/// The cost function at `ctx` and the given bindings.
pub fn evaluate_cost<'a>(
    cp: &ConstraintProblem,
    ctx: &ContextSnapshot,
    bindings: impl IntoIterator<Item = (&'a str, f64)>,
    mode: ObjectiveMode,
) -> Result<f64, SolveError> {
    let (mut env, _) = prepare(cp, ctx)?;
    let given: BTreeMap<&str, f64> = bindings.into_iter().collect();
    for v in &cp.variables {
        env[v.slot] = *given.get(v.name.as_str()).ok_or_else(|| SolveError::IncompleteBinding(v.name.clone()))?;
    }
    let weights: Vec<f64> = cp.objective.iter().map(|t| t.weight(&env)).collect();
    Ok(cost_of(cp, &weights, cp.objective.iter().map(|t| t.value(&env, mode))))
}
