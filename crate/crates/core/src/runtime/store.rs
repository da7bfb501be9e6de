//! Current context values and edge-triggered subscriptions.

use std::collections::BTreeMap;

use serde::Deserialize;

use crate::analysis::{ExprType, SymbolKind, TExpr, TypedModel};
use crate::domain::ValueType;
use crate::syntax::parse_expr;

use super::RuntimeError;

/// What happens when a subscription fires.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum TriggerMode {
    /// Re-solve the models that depend on the updated context.
    #[default]
    Push,
    /// Only report the event.
    Silent,
}

/// A boolean condition over contexts of one model.
#[derive(Debug, Clone)]
pub struct Predicate {
    source: String,
    expr: TExpr,
    /// Slot and name of every context read.
    reads: Vec<(usize, String)>,
    width: usize,
}

impl Predicate {
    pub fn compile(tm: &TypedModel, text: &str) -> Result<Predicate, RuntimeError> {
        let fail = |message: String| RuntimeError::Predicate { predicate: text.to_string(), message };
        let e = parse_expr(text).map_err(|d| fail(d[0].message.clone()))?;
        let (expr, ty) = tm.check_expr(&e).map_err(|d| fail(d[0].message.clone()))?;
        if ty != ExprType::Bool {
            return Err(fail("a predicate must be a condition".into()));
        }
        let mut reads = Vec::new();
        for s in expr.slots() {
            let sym = &tm.symbols[s];
            if sym.kind != SymbolKind::Context {
                return Err(fail(format!("`{}` is not a context", sym.name)));
            }
            reads.push((s, sym.name.clone()));
        }
        Ok(Predicate { source: text.to_string(), expr, reads, width: tm.symbols.len() })
    }

    pub fn source(&self) -> &str {
        &self.source
    }

    pub fn reads(&self, context: &str) -> bool {
        self.reads.iter().any(|(_, n)| n == context)
    }

    /// False while any context it reads is unset.
    fn holds(&self, values: &BTreeMap<String, f64>) -> bool {
        let mut env = vec![f64::NAN; self.width];
        for (slot, name) in &self.reads {
            match values.get(name) {
                Some(&v) => env[*slot] = v,
                None => return false,
            }
        }
        matches!(self.expr.eval(&env), Ok(v) if v != 0.0)
    }
}

#[derive(Debug, Clone)]
pub struct Subscription {
    pub id: usize,
    pub context: String,
    pub predicate: Predicate,
    pub mode: TriggerMode,
    state: bool,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Fired {
    pub subscription: usize,
    pub context: String,
    pub predicate: String,
    pub mode: TriggerMode,
}

#[derive(Debug, Clone, Default)]
pub struct ContextStore {
    types: BTreeMap<String, ValueType>,
    values: BTreeMap<String, f64>,
    subscriptions: Vec<Subscription>,
}

impl ContextStore {
    /// A store for the given contexts; the first type given for a name wins.
    pub fn new<'a>(contexts: impl IntoIterator<Item = (&'a str, &'a ValueType)>) -> ContextStore {
        let mut types = BTreeMap::new();
        for (name, ty) in contexts {
            types.entry(name.to_string()).or_insert_with(|| ty.clone());
        }
        ContextStore { types, ..ContextStore::default() }
    }

    pub fn declares(&self, name: &str) -> bool {
        self.types.contains_key(name)
    }

    pub fn value_type(&self, name: &str) -> Option<&ValueType> {
        self.types.get(name)
    }

    pub fn get(&self, name: &str) -> Option<f64> {
        self.values.get(name).copied()
    }

    pub fn values(&self) -> impl Iterator<Item = (&str, f64)> {
        self.values.iter().map(|(k, v)| (k.as_str(), *v))
    }

    pub fn subscriptions(&self) -> &[Subscription] {
        &self.subscriptions
    }

    pub fn subscribe(&mut self, context: &str, predicate: Predicate, mode: TriggerMode) -> Result<usize, RuntimeError> {
        if !self.declares(context) {
            return Err(RuntimeError::UnknownContext(context.to_string()));
        }
        let id = self.subscriptions.len();
        let state = predicate.holds(&self.values);
        self.subscriptions.push(Subscription { id, context: context.to_string(), predicate, mode, state });
        Ok(id)
    }

    /// Stores `value` clamped and snapped onto the context's grid, then
    /// re-evaluates the predicates reading it. A subscription fires only
    /// when its predicate goes from false to true.
    pub fn update_context(&mut self, name: &str, value: f64) -> Result<Vec<Fired>, RuntimeError> {
        let ty = self.types.get(name).ok_or_else(|| RuntimeError::UnknownContext(name.to_string()))?;
        let (v, _) = ty.snap(value);
        self.values.insert(name.to_string(), v);
        let mut fired = Vec::new();
        for s in &mut self.subscriptions {
            if s.context != name && !s.predicate.reads(name) {
                continue;
            }
            let now = s.predicate.holds(&self.values);
            if now && !s.state {
                fired.push(Fired {
                    subscription: s.id,
                    context: s.context.clone(),
                    predicate: s.predicate.source.clone(),
                    mode: s.mode,
                });
            }
            s.state = now;
        }
        Ok(fired)
    }
}
