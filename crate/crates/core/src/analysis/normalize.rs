//! Extrema of priority and definition functions over their parameter grids.

use crate::diagnostic::{Code, Diagnostic};

use super::{TypedFunction, TypedModel};

/// Largest joint grid scanned exhaustively; larger grids are coarsened.
pub const GRID_CAP: usize = 1_000_000;

/// Observed range of one function.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Extrema {
    pub min: f64,
    pub max: f64,
    /// Grid points evaluated.
    pub points: usize,
    /// Whether the joint grid had to be thinned to stay under [`GRID_CAP`].
    pub coarsened: bool,
}

impl Extrema {
    /// Maps `x` linearly so that `min → 0` and `max → top`. The result is
    /// clamped to `[0, top]`, which only absorbs rounding (and points a
    /// coarsened scan missed).
    pub fn scale(&self, x: f64, top: f64) -> f64 {
        (top * (x - self.min) / (self.max - self.min)).clamp(0.0, top)
    }
}

/// Extrema per property (in declaration order), per function.
#[derive(Debug, Clone, PartialEq)]
pub struct NormalizationInfo {
    pub priorities: Vec<Vec<Extrema>>,
    pub definitions: Vec<Vec<Extrema>>,
}

/// Per-parameter grids to scan, thinned evenly (endpoints kept) when the
/// joint size exceeds the cap.
fn scan_grids(grids: Vec<Vec<f64>>) -> (Vec<Vec<f64>>, bool) {
    let total = grids.iter().fold(1f64, |acc, g| acc * g.len() as f64);
    if total <= GRID_CAP as f64 {
        return (grids, false);
    }
    let factor = (GRID_CAP as f64 / total).powf(1.0 / grids.len() as f64);
    let thinned = grids
        .into_iter()
        .map(|g| {
            let keep = ((g.len() as f64 * factor).floor() as usize).clamp(2, g.len());
            (0..keep)
                .map(|i| g[(i * (g.len() - 1) + (keep - 1) / 2) / (keep - 1)])
                .collect::<Vec<f64>>()
        })
        .collect();
    (thinned, true)
}

/// Calls `visit` with every point of the Cartesian product of `grids`
/// written into `env` at `slots`.
pub(crate) fn for_each_point(
    slots: &[usize],
    grids: &[Vec<f64>],
    env: &mut [f64],
    mut visit: impl FnMut(&[f64]),
) {
    if grids.iter().any(|g| g.is_empty()) {
        return;
    }
    let mut idx = vec![0usize; grids.len()];
    for (s, g) in slots.iter().zip(grids) {
        env[*s] = g[0];
    }
    loop {
        visit(env);
        let mut d = grids.len();
        loop {
            if d == 0 {
                return;
            }
            d -= 1;
            idx[d] += 1;
            if idx[d] < grids[d].len() {
                env[slots[d]] = grids[d][idx[d]];
                break;
            }
            idx[d] = 0;
            env[slots[d]] = grids[d][0];
        }
    }
}

fn function_extrema(tm: &TypedModel, f: &TypedFunction, role: &str) -> Result<Extrema, Diagnostic> {
    let grids = f
        .params
        .iter()
        .map(|&s| tm.value_type(s).map(|t| t.domain().values().to_vec()).unwrap_or_default())
        .collect();
    let (grids, coarsened) = scan_grids(grids);
    let mut env = vec![0.0; tm.symbols.len()];
    let (mut min, mut max) = (f64::INFINITY, f64::NEG_INFINITY);
    let mut points = 0;
    let mut failure = None;
    for_each_point(&f.params, &grids, &mut env, |env| {
        if failure.is_some() {
            return;
        }
        match f.body.eval(env) {
            Ok(y) if y.is_finite() => {
                min = min.min(y);
                max = max.max(y);
                points += 1;
            }
            Ok(y) => failure = Some(format!("evaluates to {y}")),
            Err(e) => failure = Some(e.to_string()),
        }
    });
    if let Some(why) = failure {
        return Err(Diagnostic::error(
            Code::ConstantFunction,
            f.span,
            format!("{role} function `{}` cannot be normalized: {why}", f.name),
        ));
    }
    if points == 0 || max - min <= 1e-12 * max.abs().max(1.0) {
        return Err(Diagnostic::error(
            Code::ConstantFunction,
            f.span,
            format!("{role} function `{}` is constant over its domain and cannot be normalized", f.name),
        ));
    }
    Ok(Extrema { min, max, points, coarsened })
}

/// Scans every priority and definition function over its parameters' grids.
pub fn compute_normalization(tm: &TypedModel) -> Result<NormalizationInfo, Vec<Diagnostic>> {
    let mut errors = Vec::new();
    let mut info = NormalizationInfo { priorities: Vec::new(), definitions: Vec::new() };
    for p in &tm.properties {
        let mut scan = |fs: &[TypedFunction], role: &str| -> Vec<Extrema> {
            fs.iter()
                .filter_map(|f| function_extrema(tm, f, role).map_err(|d| errors.push(d)).ok())
                .collect()
        };
        let pr = scan(&p.priorities, "priority");
        let de = scan(&p.definitions, "definition");
        info.priorities.push(pr);
        info.definitions.push(de);
    }
    if errors.is_empty() {
        Ok(info)
    } else {
        Err(errors)
    }
}
