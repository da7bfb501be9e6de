//! Chord (secant) surrogates for nonlinear single-variable definitions.

use crate::domain::Domain;

use super::NormalizedFn;

/// `y = slopes[j] * x + intercepts[j]` on segment j. Segments are
/// half-open, `[b_j, b_{j+1})`, except the last one which is closed.
#[derive(Debug, Clone, PartialEq)]
pub struct PiecewiseLinear {
    pub slot: usize,
    pub breakpoints: Vec<f64>,
    pub slopes: Vec<f64>,
    pub intercepts: Vec<f64>,
}

impl PiecewiseLinear {
    pub fn segments(&self) -> usize {
        self.slopes.len()
    }

    pub fn segment_of(&self, x: f64) -> usize {
        let inner = &self.breakpoints[1..self.breakpoints.len() - 1];
        inner.partition_point(|&b| b <= x)
    }

    pub fn eval(&self, x: f64) -> f64 {
        let j = self.segment_of(x);
        self.slopes[j] * x + self.intercepts[j]
    }
}

/// Interpolates the normalized function `f` of `slot` with `k` chords over
/// equally spaced breakpoints spanning `domain`. Breakpoints are snapped to
/// the domain so the surrogate is exact on grid values it passes through
/// and never leaves the normalized range there.
pub fn piecewise_linearize(f: &NormalizedFn, slot: usize, domain: &Domain, k: usize) -> PiecewiseLinear {
    let k = k.max(1);
    let (lo, hi) = (domain.first().unwrap_or(0.0), domain.last().unwrap_or(0.0));
    let mut breakpoints: Vec<f64> = (0..=k)
        .map(|j| domain.nearest(lo + (hi - lo) * j as f64 / k as f64))
        .collect();
    breakpoints.dedup();
    if breakpoints.len() < 2 {
        breakpoints = vec![lo, hi];
    }
    let mut env = vec![0.0; slot + 1];
    let mut at = |x: f64| {
        env[slot] = x;
        f.eval(&env)
    };
    let ys: Vec<f64> = breakpoints.iter().map(|&b| at(b)).collect();
    let mut slopes = Vec::new();
    let mut intercepts = Vec::new();
    for j in 0..breakpoints.len() - 1 {
        let (x0, x1) = (breakpoints[j], breakpoints[j + 1]);
        let slope = (ys[j + 1] - ys[j]) / (x1 - x0);
        slopes.push(slope);
        intercepts.push(ys[j] - slope * x0);
    }
    PiecewiseLinear { slot, breakpoints, slopes, intercepts }
}
