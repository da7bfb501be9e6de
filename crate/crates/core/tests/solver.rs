mod common;

use proptest::prelude::*;
use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};

use vml::analysis::analyze;
use vml::compile::{compile_source, ConstraintProblem, LowerOptions};
use vml::solve::{brute_force_with, solve_with, ContextSnapshot, SolveOptions, SolveStatus};

const MODES: [fn() -> SolveOptions; 2] = [SolveOptions::default, SolveOptions::exact];

fn assert_parity(cp: &ConstraintProblem, ctx: &ContextSnapshot) {
    for mode in MODES {
        let fast = solve_with(cp, ctx, mode()).unwrap();
        let slow = brute_force_with(cp, ctx, mode()).unwrap();
        assert!(fast.same_outcome(&slow), "{ctx:?}\n{fast:?}\n{slow:?}");
        assert_eq!(fast.triggered, slow.triggered);
    }
}

#[test]
fn parity_on_fixtures() {
    for name in ["velocity.vml", "velocity_verbatim.vml", "coffee.vml", "coffee_prose.vml"] {
        let cp = common::problem(name);
        let mut rng = StdRng::seed_from_u64(name.len() as u64);
        for _ in 0..200 {
            assert_parity(&cp, &common::random_snapshot(&cp, &mut rng));
        }
    }
}

/// A random small model: two contexts, three varpoints, a few rules and
/// properties with single- and multi-variable definitions.
fn random_model() -> impl Strategy<Value = String> {
    let guard = prop_oneof![
        (0i32..6).prop_map(|k| format!("c > {k}")),
        (-3i32..3).prop_map(|k| format!("d <= {k} | c = 2")),
        Just("c >= 0".to_string()),
        (0i32..6).prop_map(|k| format!("!(c < {k}) & d > -2")),
    ];
    let relation = prop_oneof![
        Just("x >= y".to_string()),
        (0i32..8).prop_map(|k| format!("x + z = {k}")),
        (-3i32..3).prop_map(|k| format!("y < {k}")),
        Just("x != z".to_string()),
        Just("z <= x | y > 1".to_string()),
    ];
    let definition = prop_oneof![
        Just("f(x) = x".to_string()),
        Just("f(x) = exp(x / 3)".to_string()),
        Just("f(x, y) = x * y".to_string()),
        Just("f(y, z) = (y - z) * (y - z)".to_string()),
        Just("f(x, y, z) = x + 2 * y - z".to_string()),
        Just("f(z) = abs(z - 2)".to_string()),
    ];
    let priority = prop_oneof![
        Just("w(c) = c + 1".to_string()),
        Just("w(d) = d * d".to_string()),
        Just("w(c, d) = c - d".to_string()),
    ];
    let property = (any::<bool>(), priority, proptest::collection::vec(definition, 1..3));
    (
        3u32..7,
        proptest::collection::vec((guard, relation), 0..4),
        proptest::collection::vec(property, 0..3),
    )
        .prop_map(|(n, rules, props)| {
            let mut s = format!(
                "number t {{ range: [0,{n}]; precision: 1; }}\nnumber u {{ range: [-3,3]; precision: 0.5; }}\n\
                 context c : t;\ncontext d : u;\nvarpoint x : t;\nvarpoint y : u;\nvarpoint z : t;\n"
            );
            for (i, (g, r)) in rules.iter().enumerate() {
                s += &format!("rule r{i} : {g} => {r};\n");
            }
            for (i, (max, w, defs)) in props.iter().enumerate() {
                let dir = if *max { "maximized" } else { "minimized" };
                s += &format!("property p{i} : t {dir} {{ priorities: {w}; definitions: {}; }}\n", defs.join(", "));
            }
            s
        })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn parity_on_random_models(src in random_model(), seed in any::<u64>()) {
        let cp = compile_source(&src, LowerOptions::default());
        let cp = match cp {
            Ok(cp) => cp,
            // a property may normalize to a constant on a tiny grid
            Err(d) => {
                prop_assert!(d.iter().all(|d| d.code == vml::Code::ConstantFunction), "{src}\n{d:?}");
                return Ok(());
            }
        };
        let mut rng = StdRng::seed_from_u64(seed);
        for _ in 0..5 {
            assert_parity(&cp, &common::random_snapshot(&cp, &mut rng));
        }
    }
}

/// Evaluates a source condition of `model` at a snapshot plus bindings.
fn holds(tm: &vml::TypedModel, expr: &vml::expr::Expr, values: &[(&str, f64)]) -> bool {
    tm.eval_expr(expr, values.iter().copied()).unwrap() != 0.0
}

#[test]
fn triggered_rules_hold_in_the_solution() {
    for name in ["velocity.vml", "coffee.vml", "coffee_prose.vml"] {
        let src = common::fixture(name);
        let model = vml::parse_model(&src).unwrap();
        let tm = analyze(&src).unwrap();
        let cp = common::problem(name);
        let mut rng = StdRng::seed_from_u64(3);
        for _ in 0..200 {
            let ctx = common::random_snapshot(&cp, &mut rng);
            let s = solve_with(&cp, &ctx, SolveOptions::default()).unwrap();
            assert!(s.is_optimal(), "{name} {ctx:?}");
            let mut values: Vec<(&str, f64)> = ctx.iter().collect();
            values.extend(s.bindings.iter().map(|(n, v)| (n.as_str(), *v)));
            for rule in model.rules() {
                if holds(&tm, &rule.implication.condition, &values) {
                    assert!(s.triggered.contains(&rule.name.name), "{}", rule.name.name);
                    assert!(holds(&tm, &rule.implication.consequence, &values), "{name}: {} violated", rule.name.name);
                }
            }
        }
    }
}

#[test]
fn clamped_inputs_solve_like_their_clamped_values() {
    let cp = common::problem("velocity.vml");
    let mut rng = StdRng::seed_from_u64(5);
    for _ in 0..50 {
        let noise = rng.gen_range(0..=100) as f64;
        let (raw, clamped) = if rng.gen() { (rng.gen_range(101.0..500.0), 100.0) } else { (rng.gen_range(-50.0..4.5), 5.0) };
        let a = solve_with(&cp, &ContextSnapshot::new().with("ctx_battery", raw).with("ctx_noise", noise), SolveOptions::default()).unwrap();
        let b = solve_with(&cp, &ContextSnapshot::new().with("ctx_battery", clamped).with("ctx_noise", noise), SolveOptions::default()).unwrap();
        assert!(a.same_outcome(&b));
        assert_eq!(a.warnings.len(), 1);
        assert_eq!(a.warnings[0].code, vml::Code::ClampedValue);
        assert!(b.warnings.is_empty());
    }
}

#[test]
fn positive_affine_rescaling_keeps_the_argmin() {
    let src = common::fixture("velocity.vml");
    let scaled = src
        .replace("f(maximumVelocity) = maximumVelocity;", "f(maximumVelocity) = 3 * maximumVelocity + 7;")
        .replace("exp(maximumVelocity / 150);", "2.5 * exp(maximumVelocity / 150) - 4;")
        .replace("exp(-1 * ctx_battery / 15);", "0.5 * exp(-1 * ctx_battery / 15) + 2;");
    assert_ne!(src, scaled);
    let a = common::problem("velocity.vml");
    let b = compile_source(&scaled, LowerOptions::default()).unwrap();
    let mut rng = StdRng::seed_from_u64(9);
    for _ in 0..50 {
        let ctx = common::random_snapshot(&a, &mut rng);
        for mode in MODES {
            let sa = solve_with(&a, &ctx, mode()).unwrap();
            let sb = solve_with(&b, &ctx, mode()).unwrap();
            assert_eq!(sa.bindings, sb.bindings, "{ctx:?}");
            assert!((sa.objective.unwrap() - sb.objective.unwrap()).abs() < 1e-9);
        }
    }
}

#[test]
fn velocity_is_non_decreasing_in_battery() {
    let cp = common::problem("velocity.vml");
    for mode in MODES {
        let mut last = 0.0;
        for b in 5..=100 {
            let ctx = ContextSnapshot::new().with("ctx_battery", b as f64).with("ctx_noise", 50.0);
            let s = solve_with(&cp, &ctx, mode()).unwrap();
            let v = s.binding("maximumVelocity").unwrap();
            assert!(v >= last, "battery {b}: {v} < {last}");
            last = v;
        }
    }
}

#[test]
fn weights_and_values_stay_in_their_intervals() {
    let cp = common::problem("velocity.vml");
    let v = cp.variable("maximumVelocity").unwrap();
    let b = cp.parameter("ctx_battery").unwrap();
    let mut env = vec![f64::NAN; cp.slot_count()];
    for &battery in b.ty.domain().values() {
        env[b.slot] = battery;
        for t in &cp.objective {
            let w = t.weight(&env);
            assert!((0.0..=1.0).contains(&w), "{w}");
        }
    }
    for &x in v.domain.values() {
        env[v.slot] = x;
        for t in &cp.objective {
            for mode in [vml::compile::ObjectiveMode::Linearized, vml::compile::ObjectiveMode::Exact] {
                let p = t.value(&env, mode);
                assert!((0.0..=100.0).contains(&p), "{p}");
            }
        }
    }
}

#[test]
fn contradictory_rules_report_the_triggered_set() {
    let src = "number t { range: [0,3]; precision: 1; }\ncontext c : t;\nvarpoint x : t;\n\
               rule a : c >= 0 => x = 1;\nrule b : c > 1 => x = 2;\nrule q : c > 2 => x >= 0;";
    let cp = common::problem_src(src);
    let s = solve_with(&cp, &ContextSnapshot::new().with("c", 2.0), SolveOptions::default()).unwrap();
    assert_eq!(s.status, SolveStatus::Infeasible);
    assert_eq!(s.triggered, ["a", "b"]);
    assert_parity(&cp, &ContextSnapshot::new().with("c", 2.0));
}

#[test]
fn repeated_solves_are_identical() {
    let cp = common::problem("coffee_prose.vml");
    let mut rng = StdRng::seed_from_u64(1);
    let ctx = common::random_snapshot(&cp, &mut rng);
    let a = solve_with(&cp, &ctx, SolveOptions::default()).unwrap();
    let b = solve_with(&cp, &ctx, SolveOptions::default()).unwrap();
    assert!(a.same_outcome(&b));
}
