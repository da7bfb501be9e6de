//! Shared test support: fixtures, independent oracles and a small
//! evaluator for the MiniZinc subset the emitter produces.
#![allow(dead_code)]

pub mod mzn;

use std::path::PathBuf;

use rand::rngs::StdRng;
use rand::Rng;

use vml::compile::{compile_source, ConstraintProblem, LowerOptions};
use vml::domain::ValueType;
use vml::solve::ContextSnapshot;

pub fn fixture_path(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("fixtures").join(name)
}

pub fn fixture(name: &str) -> String {
    std::fs::read_to_string(fixture_path(name)).unwrap()
}

pub fn problem(name: &str) -> ConstraintProblem {
    compile_source(&fixture(name), LowerOptions::default()).unwrap()
}

pub fn problem_src(src: &str) -> ConstraintProblem {
    compile_source(src, LowerOptions::default()).unwrap()
}

/// Every parameter at a uniformly drawn grid value.
pub fn random_snapshot(cp: &ConstraintProblem, rng: &mut StdRng) -> ContextSnapshot {
    let mut ctx = ContextSnapshot::new();
    for p in &cp.parameters {
        let d = p.ty.domain();
        ctx.set(&p.name, d.values()[rng.gen_range(0..d.len())]);
    }
    ctx
}

pub fn grid(ty: &ValueType) -> Vec<f64> {
    ty.domain().values().to_vec()
}

/// The velocity model's cost written out by hand: priorities are
/// exp(-b/15) shapes normalized over b in [5,100], the performance value
/// is the velocity scaled onto [0,100] and maximized, the energy value is
/// exp(v/150) scaled onto [0,100], optionally replaced by its 5 chords.
pub mod velocity {
    pub const V_LO: f64 = 100.0;
    pub const V_HI: f64 = 600.0;

    fn e(b: f64) -> f64 {
        (-b / 15.0).exp()
    }

    pub fn weights(b: f64) -> (f64, f64) {
        let span = e(5.0) - e(100.0);
        ((e(5.0) - e(b)) / span, (e(b) - e(100.0)) / span)
    }

    pub fn energy_exact(v: f64) -> f64 {
        let (lo, hi) = ((V_LO / 150.0).exp(), (V_HI / 150.0).exp());
        100.0 * ((v / 150.0).exp() - lo) / (hi - lo)
    }

    pub fn energy_chord(v: f64) -> f64 {
        let j = (((v - V_LO) / 100.0).floor() as usize).min(4);
        let (x0, x1) = (V_LO + 100.0 * j as f64, V_LO + 100.0 * (j + 1) as f64);
        let (y0, y1) = (energy_exact(x0), energy_exact(x1));
        y0 + (y1 - y0) * (v - x0) / (x1 - x0)
    }

    pub fn cost(b: f64, v: f64, chord: bool) -> f64 {
        let (wp, we) = weights(b);
        let perf = 100.0 * (v - V_LO) / (V_HI - V_LO);
        let energy = if chord { energy_chord(v) } else { energy_exact(v) };
        -wp * perf + we * energy
    }

    pub fn velocity_grid() -> Vec<f64> {
        (0..=5000).map(|i| V_LO + i as f64 * 0.1).collect()
    }

    /// Velocity minimizing the cost, first one on ties.
    pub fn argmin(b: f64, chord: bool) -> f64 {
        let mut best = (f64::INFINITY, f64::NAN);
        for v in velocity_grid() {
            let c = cost(b, v, chord);
            if c < best.0 {
                best = (c, v);
            }
        }
        best.1
    }

    /// Smallest integer battery level from which 600 is optimal.
    pub fn threshold(chord: bool) -> f64 {
        let mut t = f64::NAN;
        for b in (5..=100).rev() {
            if argmin(b as f64, chord) == V_HI {
                t = b as f64;
            } else {
                break;
            }
        }
        t
    }
}

/// The coffee decision written out from the rules' intent.
pub mod coffee {
    pub const A: f64 = 0.0;
    pub const B: f64 = 1.0;

    pub fn nearer(dist_a: f64, dist_b: f64) -> f64 {
        if dist_a < dist_b {
            A
        } else {
            B
        }
    }

    /// Total time in seconds; distances in m, velocity in mm/s.
    pub fn total_time(wait: f64, dist: f64, velocity: f64) -> f64 {
        wait + dist / (velocity / 1000.0)
    }
}
