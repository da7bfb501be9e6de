//! Chaining models: one model's variation point feeds another's context.

use std::fmt;
use std::str::FromStr;

use thiserror::Error;

use crate::domain::ValueType;
use crate::units::Unit;

use super::{SymbolKind, TypedModel};

/// `producer.varpoint -> consumer.context`, by name.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct LinkSpec {
    pub from_model: String,
    pub from_varpoint: String,
    pub to_model: String,
    pub to_context: String,
}

fn split_qualified(s: &str) -> Result<(String, String), LinkError> {
    match s.trim().split_once('.') {
        Some((m, v)) if !m.is_empty() && !v.is_empty() => Ok((m.to_string(), v.to_string())),
        _ => Err(LinkError::Malformed(s.to_string())),
    }
}

impl LinkSpec {
    /// From `"model.varpoint"` and `"model.context"`.
    pub fn new(from: &str, to: &str) -> Result<LinkSpec, LinkError> {
        let (from_model, from_varpoint) = split_qualified(from)?;
        let (to_model, to_context) = split_qualified(to)?;
        Ok(LinkSpec { from_model, from_varpoint, to_model, to_context })
    }
}

impl FromStr for LinkSpec {
    type Err = LinkError;

    /// Parses `a.x -> b.y`.
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let (from, to) = s.split_once("->").ok_or_else(|| LinkError::Malformed(s.to_string()))?;
        LinkSpec::new(from, to)
    }
}

impl fmt::Display for LinkSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}.{} -> {}.{}", self.from_model, self.from_varpoint, self.to_model, self.to_context)
    }
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum LinkError {
    #[error("malformed link endpoint `{0}`, expected `model.variable`")]
    Malformed(String),
    #[error("model `{0}` is listed twice")]
    DuplicateModel(String),
    #[error("unknown model `{0}`")]
    UnknownModel(String),
    #[error("model `{model}` has no variation point `{name}`")]
    NotAVarpoint { model: String, name: String },
    #[error("model `{model}` has no context variable `{name}`")]
    NotAContext { model: String, name: String },
    #[error("context `{0}` is fed by more than one link")]
    DuplicateTarget(String),
    #[error("links form a cycle through model `{0}`")]
    LinkCycle(String),
    #[error("link {link}: value ranges differ ({detail})")]
    RangeMismatch { link: String, detail: String },
    #[error("link {link}: cannot connect {from} to {to}")]
    UnitMismatch { link: String, from: String, to: String },
}

/// A resolved link.
#[derive(Debug, Clone, PartialEq)]
pub struct Link {
    pub spec: LinkSpec,
    pub producer: usize,
    pub varpoint: usize,
    pub consumer: usize,
    pub context: usize,
    pub from_unit: Unit,
    pub to_unit: Unit,
}

#[derive(Debug, Clone, PartialEq)]
pub struct AdaptationPipeline {
    pub models: Vec<(String, TypedModel)>,
    pub links: Vec<Link>,
    /// Model indices, producers before consumers; ties keep listing order.
    pub order: Vec<usize>,
}

impl AdaptationPipeline {
    pub fn model_index(&self, name: &str) -> Option<usize> {
        self.models.iter().position(|(n, _)| n == name)
    }

    /// Models that `model` transitively depends on, in solve order.
    pub fn upstream_of(&self, model: usize) -> Vec<usize> {
        let mut needed = vec![false; self.models.len()];
        let mut stack = vec![model];
        while let Some(m) = stack.pop() {
            for l in self.links.iter().filter(|l| l.consumer == m) {
                if !needed[l.producer] {
                    needed[l.producer] = true;
                    stack.push(l.producer);
                }
            }
        }
        self.order.iter().copied().filter(|&m| needed[m]).collect()
    }

    /// Models transitively fed by `model`, in solve order.
    pub fn downstream_of(&self, model: usize) -> Vec<usize> {
        let mut reached = vec![false; self.models.len()];
        let mut stack = vec![model];
        while let Some(m) = stack.pop() {
            for l in self.links.iter().filter(|l| l.producer == m) {
                if !reached[l.consumer] {
                    reached[l.consumer] = true;
                    stack.push(l.consumer);
                }
            }
        }
        self.order.iter().copied().filter(|&m| reached[m]).collect()
    }
}

fn close(a: f64, b: f64) -> bool {
    (a - b).abs() <= 1e-9 * a.abs().max(b.abs()).max(1.0)
}

fn check_compatible(link: &str, from: &ValueType, to: &ValueType) -> Result<(Unit, Unit), LinkError> {
    match (from, to) {
        (ValueType::Numeric(a), ValueType::Numeric(b)) => {
            let (ua, ub) = (a.unit(), b.unit());
            if ua.dimension != ub.dimension {
                return Err(LinkError::UnitMismatch {
                    link: link.to_string(),
                    from: ua.to_string(),
                    to: ub.to_string(),
                });
            }
            let last = |t: &crate::domain::NumericType| t.grid_value(t.cardinality() - 1);
            let (lo_a, hi_a) = (a.lo * ua.scale, last(a) * ua.scale);
            let (lo_b, hi_b) = (b.lo * ub.scale, last(b) * ub.scale);
            if !close(lo_a, lo_b) || !close(hi_a, hi_b) {
                return Err(LinkError::RangeMismatch {
                    link: link.to_string(),
                    detail: format!("[{}, {}] {ua} vs [{}, {}] {ub}", a.lo, last(a), b.lo, last(b)),
                });
            }
            Ok((ua, ub))
        }
        (ValueType::Enum(a), ValueType::Enum(b)) => {
            if a.literals != b.literals {
                return Err(LinkError::RangeMismatch {
                    link: link.to_string(),
                    detail: format!("enum `{}` vs enum `{}`", a.name, b.name),
                });
            }
            Ok((Unit::DIMENSIONLESS, Unit::DIMENSIONLESS))
        }
        (ValueType::Bool(_), ValueType::Bool(_)) => Ok((Unit::DIMENSIONLESS, Unit::DIMENSIONLESS)),
        _ => Err(LinkError::RangeMismatch {
            link: link.to_string(),
            detail: format!("`{}` and `{}` are different kinds of type", from.name(), to.name()),
        }),
    }
}

/// Resolves links and orders the models so every producer is solved
/// before its consumers.
pub fn link_models(
    models: Vec<(String, TypedModel)>,
    specs: &[LinkSpec],
) -> Result<AdaptationPipeline, LinkError> {
    for (i, (name, _)) in models.iter().enumerate() {
        if models[..i].iter().any(|(n, _)| n == name) {
            return Err(LinkError::DuplicateModel(name.clone()));
        }
    }
    let find = |name: &str| {
        models
            .iter()
            .position(|(n, _)| n == name)
            .ok_or_else(|| LinkError::UnknownModel(name.to_string()))
    };
    let mut links: Vec<Link> = Vec::new();
    for spec in specs {
        let producer = find(&spec.from_model)?;
        let consumer = find(&spec.to_model)?;
        let (_, ptm) = &models[producer];
        let (_, ctm) = &models[consumer];
        let varpoint = ptm
            .slot(&spec.from_varpoint)
            .filter(|&s| ptm.symbols[s].kind == SymbolKind::VarPoint)
            .ok_or_else(|| LinkError::NotAVarpoint {
                model: spec.from_model.clone(),
                name: spec.from_varpoint.clone(),
            })?;
        let context = ctm
            .slot(&spec.to_context)
            .filter(|&s| ctm.symbols[s].kind == SymbolKind::Context)
            .ok_or_else(|| LinkError::NotAContext {
                model: spec.to_model.clone(),
                name: spec.to_context.clone(),
            })?;
        if links.iter().any(|l| l.consumer == consumer && l.context == context) {
            return Err(LinkError::DuplicateTarget(spec.to_string()));
        }
        if producer == consumer {
            return Err(LinkError::LinkCycle(spec.from_model.clone()));
        }
        let (Some(from), Some(to)) = (ptm.value_type(varpoint), ctm.value_type(context)) else {
            return Err(LinkError::RangeMismatch { link: spec.to_string(), detail: "untyped".into() });
        };
        let (from_unit, to_unit) = check_compatible(&spec.to_string(), from, to)?;
        links.push(Link { spec: spec.clone(), producer, varpoint, consumer, context, from_unit, to_unit });
    }

    // Kahn's algorithm, always taking the earliest listed ready model
    let n = models.len();
    let mut indegree = vec![0usize; n];
    for l in &links {
        indegree[l.consumer] += 1;
    }
    let mut done = vec![false; n];
    let mut order = Vec::with_capacity(n);
    while order.len() < n {
        let Some(next) = (0..n).find(|&m| !done[m] && indegree[m] == 0) else {
            let stuck = (0..n).find(|&m| !done[m]).unwrap();
            return Err(LinkError::LinkCycle(models[stuck].0.clone()));
        };
        done[next] = true;
        order.push(next);
        for l in links.iter().filter(|l| l.producer == next) {
            indegree[l.consumer] -= 1;
        }
    }
    Ok(AdaptationPipeline { models, links, order })
}
