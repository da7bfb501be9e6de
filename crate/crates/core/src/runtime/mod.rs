//! Event-driven adaptation: a pipeline of models, the shared context store,
//! query and push triggers, and scripted scenario replay.

mod manifest;
mod script;
mod store;

use std::io::Write;
use std::path::{Path, PathBuf};

use thiserror::Error;

use crate::analysis::{analyze, compute_normalization, link_models, AdaptationPipeline, LinkError, LinkSpec, SymbolKind};
use crate::compile::{lower_with, ConstraintProblem, LowerOptions};
use crate::diagnostic::Diagnostic;
use crate::solve::{solve_with, ContextSnapshot, SolveError, SolveOptions, Solution};
use crate::units::convert_unit;

pub use manifest::{LinkEntry, Manifest, ModelEntry, SubscriptionEntry};
pub use script::{Action, ScenarioScript, ScriptEntry};
pub use store::{ContextStore, Fired, Predicate, Subscription, TriggerMode};

#[derive(Debug, Error)]
pub enum RuntimeError {
    #[error("{path}: {message}")]
    Io { path: PathBuf, message: String },
    #[error("manifest: {0}")]
    Manifest(String),
    #[error("model `{model}` has {} error(s)", diagnostics.len())]
    Diagnostics { model: String, diagnostics: Vec<Diagnostic> },
    #[error(transparent)]
    Link(#[from] LinkError),
    #[error("predicate `{predicate}`: {message}")]
    Predicate { predicate: String, message: String },
    #[error("script line {line}: {message}")]
    Script { line: usize, message: String },
    #[error("unknown context `{0}`")]
    UnknownContext(String),
    #[error("unknown model `{0}`")]
    UnknownModel(String),
    #[error("`{value}` is not a value of context `{context}`")]
    BadValue { context: String, value: String },
    #[error("model `{model}`: {source}")]
    Solve { model: String, source: SolveError },
}

pub(crate) fn read(path: &Path) -> Result<String, RuntimeError> {
    std::fs::read_to_string(path).map_err(|e| RuntimeError::Io { path: path.to_path_buf(), message: e.to_string() })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Trigger {
    Query,
    Event,
}

impl Trigger {
    pub fn as_str(self) -> &'static str {
        match self {
            Trigger::Query => "query",
            Trigger::Event => "event",
        }
    }
}

/// One solver invocation.
#[derive(Debug, Clone)]
pub struct TimelineRow {
    pub tick: u64,
    pub trigger: Trigger,
    pub model: String,
    /// Varpoint values as written in models (enum literals by name).
    pub bindings: Vec<(String, String)>,
    pub solution: Solution,
}

#[derive(Debug, Clone, Default)]
pub struct BindingTimeline {
    pub rows: Vec<TimelineRow>,
}

impl BindingTimeline {
    /// Rows for `model`, in order.
    pub fn of<'a>(&'a self, model: &'a str) -> impl Iterator<Item = &'a TimelineRow> {
        self.rows.iter().filter(move |r| r.model == model)
    }

    /// `tick,trigger,model,bindings,objective,status` with bindings as
    /// `name=value` joined by `;`.
    pub fn write_csv(&self, out: impl Write) -> csv::Result<()> {
        let mut w = csv::Writer::from_writer(out);
        w.write_record(["tick", "trigger", "model", "bindings", "objective", "status"])?;
        for r in &self.rows {
            let bindings: Vec<String> = r.bindings.iter().map(|(n, v)| format!("{n}={v}")).collect();
            w.write_record([
                r.tick.to_string(),
                r.trigger.as_str().to_string(),
                r.model.clone(),
                bindings.join(";"),
                r.solution.objective.map(|o| o.to_string()).unwrap_or_default(),
                r.solution.status.as_str().to_string(),
            ])?;
        }
        w.flush()?;
        Ok(())
    }
}

pub struct Engine {
    pub pipeline: AdaptationPipeline,
    pub problems: Vec<ConstraintProblem>,
    pub store: ContextStore,
    options: SolveOptions,
}

impl Engine {
    pub fn new(pipeline: AdaptationPipeline, lower: LowerOptions, options: SolveOptions) -> Result<Engine, RuntimeError> {
        let mut problems = Vec::new();
        for (name, tm) in &pipeline.models {
            let fail = |diagnostics| RuntimeError::Diagnostics { model: name.clone(), diagnostics };
            let ni = compute_normalization(tm).map_err(fail)?;
            problems.push(lower_with(tm, &ni, lower).map_err(fail)?);
        }
        let store = {
            let contexts = pipeline.models.iter().flat_map(|(_, tm)| {
                tm.slots_of(SymbolKind::Context).map(move |s| (tm.slot_name(s), tm.value_type(s).expect("typed context")))
            });
            ContextStore::new(contexts)
        };
        Ok(Engine { pipeline, problems, store, options })
    }

    pub fn from_manifest(manifest: &Manifest) -> Result<Engine, RuntimeError> {
        let mut models = Vec::new();
        for m in &manifest.models {
            let tm = analyze(&read(&m.path)?)
                .map_err(|diagnostics| RuntimeError::Diagnostics { model: m.name.clone(), diagnostics })?;
            models.push((m.name.clone(), tm));
        }
        let specs = manifest
            .links
            .iter()
            .map(|l| LinkSpec::new(&l.from, &l.to))
            .collect::<Result<Vec<_>, _>>()?;
        let pipeline = link_models(models, &specs)?;
        let mut lower = LowerOptions::default();
        if let Some(k) = manifest.segments {
            lower.segments = k;
        }
        let options = if manifest.exact_objective { SolveOptions::exact() } else { SolveOptions::default() };
        let mut engine = Engine::new(pipeline, lower, options)?;
        for s in &manifest.subscriptions {
            engine.subscribe(&s.context, &s.predicate, s.mode)?;
        }
        Ok(engine)
    }

    pub fn load(manifest: &Path) -> Result<Engine, RuntimeError> {
        Engine::from_manifest(&Manifest::load(manifest)?)
    }

    /// Subscribes to `context`; the predicate is checked against the first
    /// model declaring it.
    pub fn subscribe(&mut self, context: &str, predicate: &str, mode: TriggerMode) -> Result<usize, RuntimeError> {
        let (_, tm) = self
            .pipeline
            .models
            .iter()
            .find(|(_, tm)| tm.symbol(context).is_some_and(|s| s.kind == SymbolKind::Context))
            .ok_or_else(|| RuntimeError::UnknownContext(context.to_string()))?;
        let p = Predicate::compile(tm, predicate)?;
        self.store.subscribe(context, p, mode)
    }

    pub fn update_context(&mut self, name: &str, value: f64) -> Result<Vec<Fired>, RuntimeError> {
        self.store.update_context(name, value)
    }

    fn model(&self, name: &str) -> Result<usize, RuntimeError> {
        self.pipeline.model_index(name).ok_or_else(|| RuntimeError::UnknownModel(name.to_string()))
    }

    /// Solves one model against the store and feeds its bindings to the
    /// contexts it is linked to. Infeasible solutions leave them untouched.
    fn solve_model(&mut self, m: usize) -> Result<Solution, RuntimeError> {
        let ctx: ContextSnapshot = self.store.values().collect();
        let name = &self.pipeline.models[m].0;
        let solution = solve_with(&self.problems[m], &ctx, self.options)
            .map_err(|source| RuntimeError::Solve { model: name.clone(), source })?;
        if solution.is_optimal() {
            for l in self.pipeline.links.iter().filter(|l| l.producer == m) {
                let (_, ptm) = &self.pipeline.models[m];
                let x = solution.binding(ptm.slot_name(l.varpoint)).expect("optimal solutions bind every varpoint");
                let y = convert_unit(x, l.from_unit, l.to_unit).expect("links are checked for dimension");
                let (_, ctm) = &self.pipeline.models[l.consumer];
                // events raised by propagation are not re-dispatched: the
                // consumers are solved next anyway
                self.store.update_context(ctm.slot_name(l.context), y)?;
            }
        }
        Ok(solution)
    }

    fn run(&mut self, models: &[usize], tick: u64, trigger: Trigger, log: &mut BindingTimeline) -> Result<(), RuntimeError> {
        for &m in models {
            let solution = self.solve_model(m)?;
            let cp = &self.problems[m];
            let bindings = cp
                .variables
                .iter()
                .filter_map(|v| solution.binding(&v.name).map(|x| (v.name.clone(), v.ty.format_value(x))))
                .collect();
            log.rows.push(TimelineRow { tick, trigger, model: self.pipeline.models[m].0.clone(), bindings, solution });
        }
        Ok(())
    }

    /// Solves `model` after every model upstream of it, in pipeline order.
    pub fn trigger_query(&mut self, model: &str) -> Result<Solution, RuntimeError> {
        let mut log = BindingTimeline::default();
        self.query(model, 0, &mut log)?;
        Ok(log.rows.pop().expect("the queried model is solved last").solution)
    }

    fn query(&mut self, model: &str, tick: u64, log: &mut BindingTimeline) -> Result<(), RuntimeError> {
        let m = self.model(model)?;
        let mut chain = self.pipeline.upstream_of(m);
        chain.push(m);
        self.run(&chain, tick, Trigger::Query, log)
    }

    /// Models to re-solve after `contexts` changed: those declaring one of
    /// them and everything downstream, in pipeline order.
    pub fn affected_by(&self, contexts: &[&str]) -> Vec<usize> {
        let mut hit = vec![false; self.pipeline.models.len()];
        for (m, (_, tm)) in self.pipeline.models.iter().enumerate() {
            let declares = contexts.iter().any(|c| tm.symbol(c).is_some_and(|s| s.kind == SymbolKind::Context));
            if declares && !hit[m] {
                hit[m] = true;
                for d in self.pipeline.downstream_of(m) {
                    hit[d] = true;
                }
            }
        }
        self.pipeline.order.iter().copied().filter(|&m| hit[m]).collect()
    }

    pub fn run_scenario(&mut self, script: &ScenarioScript) -> Result<BindingTimeline, RuntimeError> {
        let mut log = BindingTimeline::default();
        for entry in &script.entries {
            match &entry.action {
                Action::Query(model) => self.query(model, entry.tick, &mut log)?,
                Action::Set(pairs) => {
                    let mut pushed: Vec<&str> = Vec::new();
                    for (name, text) in pairs {
                        let ty = self
                            .store
                            .value_type(name)
                            .ok_or_else(|| RuntimeError::UnknownContext(name.clone()))?;
                        let value = ty
                            .parse_value(text)
                            .ok_or_else(|| RuntimeError::BadValue { context: name.clone(), value: text.clone() })?;
                        let fired = self.store.update_context(name, value)?;
                        if fired.iter().any(|f| f.mode == TriggerMode::Push) && !pushed.contains(&name.as_str()) {
                            pushed.push(name);
                        }
                    }
                    if !pushed.is_empty() {
                        let models = self.affected_by(&pushed);
                        self.run(&models, entry.tick, Trigger::Event, &mut log)?;
                    }
                }
            }
        }
        Ok(log)
    }
}
