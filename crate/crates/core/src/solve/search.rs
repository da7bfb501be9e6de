//! Branch-and-bound search and the exhaustive oracle.
//!
//! Both enumerate variables in declaration order and values in ascending
//! order, and only replace the incumbent on a strictly smaller cost, so
//! among equal optima the lexicographically smallest binding wins.

use std::time::Instant;

use crate::compile::{ConstraintProblem, ProblemConstraint};
use crate::diagnostic::Diagnostic;

use super::{cost_of, prepare, ContextSnapshot, SolveError, SolveOptions, SolveStats, SolveStatus, Solution};

/// Largest joint domain [`brute_force`] will enumerate.
pub const BRUTE_FORCE_LIMIT: u128 = 10_000_000;

/// Joint size up to which a multi-variable term's best value is computed
/// exactly for the bound; above it the term is bounded by its normalized
/// range.
const EXACT_BOUND_LIMIT: u128 = 100_000;

struct Active<'a> {
    c: &'a ProblemConstraint,
    /// Whether the guard still has to be evaluated (it reads decisions).
    guard_pending: bool,
    /// Variable indices read.
    vars: Vec<usize>,
}

impl Active<'_> {
    fn holds(&self, env: &[f64]) -> bool {
        if self.guard_pending {
            if let Some(g) = &self.c.guard {
                if !matches!(g.eval(env), Ok(v) if v != 0.0) {
                    return true;
                }
            }
        }
        matches!(self.c.relation.eval(env), Ok(v) if v != 0.0)
    }
}

/// Everything fixed by the snapshot.
struct Setup<'a> {
    cp: &'a ConstraintProblem,
    env: Vec<f64>,
    warnings: Vec<Diagnostic>,
    weights: Vec<f64>,
    active: Vec<Active<'a>>,
    triggered: Vec<String>,
    /// Per term: the variable indices it reads.
    term_vars: Vec<Vec<usize>>,
    /// Per single-variable term: its value at every point of that
    /// variable's full domain.
    tables: Vec<Option<Vec<f64>>>,
}

impl<'a> Setup<'a> {
    fn new(cp: &'a ConstraintProblem, ctx: &ContextSnapshot, options: SolveOptions) -> Result<Self, SolveError> {
        let (mut env, warnings) = prepare(cp, ctx)?;
        let var_of_slot = |slot: usize| cp.variables.iter().position(|v| v.slot == slot);
        let weights = cp.objective.iter().map(|t| t.weight(&env)).collect();

        let mut active = Vec::new();
        let mut triggered = Vec::new();
        for c in &cp.constraints {
            let guard_vars: Vec<usize> =
                c.guard.as_ref().map(|g| g.slots().into_iter().filter_map(var_of_slot).collect()).unwrap_or_default();
            let guard_pending = !guard_vars.is_empty();
            if !guard_pending {
                if let Some(g) = &c.guard {
                    if !matches!(g.eval(&env), Ok(v) if v != 0.0) {
                        continue;
                    }
                }
                triggered.push(c.name.clone());
            }
            let mut vars: Vec<usize> = c.relation.slots().into_iter().filter_map(var_of_slot).collect();
            vars.extend(guard_vars);
            vars.sort_unstable();
            vars.dedup();
            active.push(Active { c, guard_pending, vars });
        }

        let term_vars: Vec<Vec<usize>> = cp
            .objective
            .iter()
            .map(|t| t.decision_slots().into_iter().filter_map(var_of_slot).collect())
            .collect();
        let tables = cp
            .objective
            .iter()
            .zip(&term_vars)
            .map(|(t, vars)| match vars.as_slice() {
                [i] => {
                    let v = &cp.variables[*i];
                    let table = v
                        .domain
                        .values()
                        .iter()
                        .map(|&x| {
                            env[v.slot] = x;
                            t.value(&env, options.mode)
                        })
                        .collect();
                    env[v.slot] = f64::NAN;
                    Some(table)
                }
                _ => None,
            })
            .collect();
        Ok(Setup { cp, env, warnings, weights, active, triggered, term_vars, tables })
    }

    /// p_i at the current assignment.
    fn term_value(&self, i: usize, idx: &[usize], env: &[f64], options: SolveOptions) -> f64 {
        match &self.tables[i] {
            Some(table) => table[idx[self.term_vars[i][0]]],
            None => self.cp.objective[i].value(env, options.mode),
        }
    }

    fn leaf_cost(&self, idx: &[usize], env: &[f64], options: SolveOptions) -> f64 {
        let values = (0..self.cp.objective.len()).map(|i| self.term_value(i, idx, env, options));
        cost_of(self.cp, &self.weights, values)
    }

    fn solution(&self, best: Option<(Vec<usize>, f64)>, stats: SolveStats) -> Solution {
        let (status, bindings, objective) = match best {
            Some((idx, cost)) => {
                let bindings = self
                    .cp
                    .variables
                    .iter()
                    .zip(&idx)
                    .map(|(v, &i)| (v.name.clone(), v.domain.values()[i]))
                    .collect();
                (SolveStatus::Optimal, bindings, Some(cost))
            }
            None => (SolveStatus::Infeasible, Vec::new(), None),
        };
        Solution {
            status,
            bindings,
            objective,
            triggered: self.triggered.clone(),
            stats,
            warnings: self.warnings.clone(),
        }
    }
}

pub fn solve(cp: &ConstraintProblem, ctx: &ContextSnapshot) -> Result<Solution, SolveError> {
    solve_with(cp, ctx, SolveOptions::default())
}

/// Branch and bound: constraints whose guard is decided by the snapshot and
/// which read a single variable prune its domain up front; the others are
/// checked as soon as their last variable is assigned. The bound adds each
/// unfinished term's best possible contribution.
pub fn solve_with(cp: &ConstraintProblem, ctx: &ContextSnapshot, options: SolveOptions) -> Result<Solution, SolveError> {
    let start = Instant::now();
    let setup = Setup::new(cp, ctx, options)?;
    let n = cp.variables.len();
    let mut env = setup.env.clone();

    // filtered domains, as indices into the full domains
    let mut domains: Vec<Vec<usize>> = cp.variables.iter().map(|v| (0..v.domain.len()).collect()).collect();
    let mut checks: Vec<Vec<&Active>> = vec![Vec::new(); n];
    for a in &setup.active {
        match a.vars.as_slice() {
            [i] if !a.guard_pending => {
                let v = &cp.variables[*i];
                domains[*i].retain(|&k| {
                    env[v.slot] = v.domain.values()[k];
                    a.holds(&env)
                });
                env[v.slot] = f64::NAN;
            }
            [.., last] => checks[*last].push(a),
            [] => {}
        }
    }

    let m = cp.objective.len();
    let mut contribution_min = vec![f64::NEG_INFINITY; m];
    for (t, term) in cp.objective.iter().enumerate() {
        let coef = term.sign.value() * setup.weights[t];
        let vars = &setup.term_vars[t];
        if let Some(table) = &setup.tables[t] {
            contribution_min[t] =
                domains[vars[0]].iter().map(|&k| coef * table[k]).fold(f64::INFINITY, f64::min);
            continue;
        }
        let joint: u128 = vars.iter().map(|&i| domains[i].len() as u128).product();
        if joint <= EXACT_BOUND_LIMIT {
            let mut scratch = env.clone();
            let mut best = f64::INFINITY;
            let mut pos = vec![0usize; vars.len()];
            if vars.iter().all(|&i| !domains[i].is_empty()) {
                'odometer: loop {
                    for (j, &i) in vars.iter().enumerate() {
                        scratch[cp.variables[i].slot] = cp.variables[i].domain.values()[domains[i][pos[j]]];
                    }
                    best = best.min(coef * term.value(&scratch, options.mode));
                    let mut d = vars.len();
                    loop {
                        if d == 0 {
                            break 'odometer;
                        }
                        d -= 1;
                        pos[d] += 1;
                        if pos[d] < domains[vars[d]].len() {
                            break;
                        }
                        pos[d] = 0;
                    }
                }
            }
            contribution_min[t] = best;
        } else if term.values.iter().all(|v| !v.extrema.coarsened) {
            // normalized values stay within [0, 100] on the grid
            contribution_min[t] = coef.min(0.0) * 100.0;
        }
    }
    let term_last: Vec<Option<usize>> = setup.term_vars.iter().map(|v| v.last().copied()).collect();

    struct Search<'s, 'a> {
        setup: &'s Setup<'a>,
        options: SolveOptions,
        domains: Vec<Vec<usize>>,
        checks: Vec<Vec<&'s Active<'a>>>,
        contribution_min: Vec<f64>,
        term_last: Vec<Option<usize>>,
        idx: Vec<usize>,
        env: Vec<f64>,
        best: Option<(Vec<usize>, f64)>,
        nodes: u64,
    }

    impl Search<'_, '_> {
        fn bound(&self, assigned: usize) -> f64 {
            let mut total = 0.0;
            for t in 0..self.term_last.len() {
                let done = self.term_last[t].is_none_or(|last| last < assigned);
                total += if done {
                    let term = &self.setup.cp.objective[t];
                    term.sign.value()
                        * self.setup.weights[t]
                        * self.setup.term_value(t, &self.idx, &self.env, self.options)
                } else {
                    self.contribution_min[t]
                };
            }
            total
        }

        fn dfs(&mut self, depth: usize) {
            let cp = self.setup.cp;
            if depth == cp.variables.len() {
                let cost = self.setup.leaf_cost(&self.idx, &self.env, self.options);
                if self.best.as_ref().is_none_or(|(_, b)| cost < *b) {
                    self.best = Some((self.idx.clone(), cost));
                }
                return;
            }
            let slot = cp.variables[depth].slot;
            for pos in 0..self.domains[depth].len() {
                let k = self.domains[depth][pos];
                self.idx[depth] = k;
                self.env[slot] = cp.variables[depth].domain.values()[k];
                self.nodes += 1;
                if !self.checks[depth].iter().all(|a| a.holds(&self.env)) {
                    continue;
                }
                if let Some((_, best)) = &self.best {
                    let bound = self.bound(depth + 1);
                    // once every term is decided the bound is summed exactly
                    // like a leaf cost, so ties cannot improve either
                    let decided = self.term_last.iter().all(|l| l.is_none_or(|last| last <= depth));
                    let tol = 1e-9 * best.abs().max(1.0);
                    if (decided && bound >= *best) || bound > best + tol {
                        continue;
                    }
                }
                self.dfs(depth + 1);
            }
            self.env[slot] = f64::NAN;
        }
    }

    let mut search = Search {
        setup: &setup,
        options,
        domains,
        checks,
        contribution_min,
        term_last,
        idx: vec![0; n],
        env,
        best: None,
        nodes: 0,
    };
    search.dfs(0);
    let best = search.best.take();
    let nodes = search.nodes;
    let best = best.map(|(idx, _)| {
        let cost = final_cost(&setup, &idx, options);
        (idx, cost)
    });
    Ok(setup.solution(best, SolveStats { nodes, elapsed: start.elapsed() }))
}

/// Cost of a full assignment, computed directly rather than from tables.
fn final_cost(setup: &Setup, idx: &[usize], options: SolveOptions) -> f64 {
    let mut env = setup.env.clone();
    for (v, &k) in setup.cp.variables.iter().zip(idx) {
        env[v.slot] = v.domain.values()[k];
    }
    let values = setup.cp.objective.iter().map(|t| t.value(&env, options.mode));
    cost_of(setup.cp, &setup.weights, values)
}

pub fn brute_force(cp: &ConstraintProblem, ctx: &ContextSnapshot) -> Result<Solution, SolveError> {
    brute_force_with(cp, ctx, SolveOptions::default())
}

/// Evaluates every point of the unfiltered joint domain.
pub fn brute_force_with(cp: &ConstraintProblem, ctx: &ContextSnapshot, options: SolveOptions) -> Result<Solution, SolveError> {
    let joint: u128 = cp.variables.iter().map(|v| v.domain.len() as u128).product();
    if joint > BRUTE_FORCE_LIMIT {
        return Err(SolveError::DomainTooLarge(joint));
    }
    let start = Instant::now();
    let setup = Setup::new(cp, ctx, options)?;
    let n = cp.variables.len();
    let mut env = setup.env.clone();
    let mut idx = vec![0usize; n];
    let mut best: Option<(Vec<usize>, f64)> = None;
    let mut nodes = 0u64;
    if cp.variables.iter().all(|v| !v.domain.is_empty()) {
        for (v, _) in cp.variables.iter().zip(&idx) {
            env[v.slot] = v.domain.values()[0];
        }
        loop {
            nodes += 1;
            if setup.active.iter().all(|a| a.holds(&env)) {
                let cost = setup.leaf_cost(&idx, &env, options);
                if best.as_ref().is_none_or(|(_, b)| cost < *b) {
                    best = Some((idx.clone(), cost));
                }
            }
            let mut d = n;
            loop {
                if d == 0 {
                    let best = best.map(|(idx, _)| {
                        let cost = final_cost(&setup, &idx, options);
                        (idx, cost)
                    });
                    return Ok(setup.solution(best, SolveStats { nodes, elapsed: start.elapsed() }));
                }
                d -= 1;
                let v = &cp.variables[d];
                idx[d] += 1;
                if idx[d] < v.domain.len() {
                    env[v.slot] = v.domain.values()[idx[d]];
                    break;
                }
                idx[d] = 0;
                env[v.slot] = v.domain.values()[0];
            }
        }
    }
    Ok(setup.solution(None, SolveStats { nodes, elapsed: start.elapsed() }))
}
