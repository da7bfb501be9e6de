//! Acceptance checks, one line per criterion. Runs as a plain binary so the
//! report is always printed; exits non-zero if any criterion fails.

mod common;

use std::panic::{catch_unwind, AssertUnwindSafe};
use std::time::{Duration, Instant};

use rand::rngs::StdRng;
use rand::SeedableRng;

use vml::compile::{compile_source, emit_minizinc, piecewise_linearize, LowerOptions, ObjectiveMode, Sign};
use vml::domain::Domain;
use vml::runtime::{BindingTimeline, Engine, ScenarioScript, Trigger};
use vml::solve::{brute_force_with, solve_with, sweep, ContextSnapshot, SolveOptions, SweepRow};
use vml::{analyze, parse_model, pretty_print, Code};

type Check = Result<String, String>;

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn within(elapsed: Duration, limit_s: f64, what: &str) -> Result<(), String> {
    ensure(elapsed.as_secs_f64() < limit_s, || format!("{what} took {:.2} s (limit {limit_s} s)", elapsed.as_secs_f64()))
}

fn grammar_fidelity() -> Check {
    let start = Instant::now();
    for name in ["velocity_verbatim.vml", "velocity.vml", "coffee.vml", "coffee_prose.vml"] {
        let cp = compile_source(&common::fixture(name), LowerOptions::default())
            .map_err(|d| format!("{name}: {} diagnostics", d.len()))?;
        ensure(cp.warnings.is_empty(), || format!("{name}: {} warnings", cp.warnings.len()))?;
    }
    let errs = analyze(&common::fixture("coffee_verbatim.vml")).err().ok_or("verbatim listing analyzed cleanly")?;
    let got: Vec<(Code, String)> = errs.iter().map(|d| (d.code, d.message.clone())).collect();
    let want = vec![
        (Code::UndeclaredType, "undeclared type `batteryLevelType`".to_string()),
        (Code::UndeclaredVariable, "undeclared variable `ctx_distanceCM_A`".to_string()),
        (Code::UndeclaredVariable, "undeclared variable `ctx_distanceCM_B`".to_string()),
    ];
    ensure(got == want, || format!("verbatim listing errors: {got:?}"))?;
    let corpus = ["velocity_verbatim.vml", "velocity.vml", "coffee_verbatim.vml", "coffee.vml", "coffee_prose.vml"];
    for name in corpus {
        let m = parse_model(&common::fixture(name)).map_err(|d| format!("{name}: {d:?}"))?;
        let again = parse_model(&pretty_print(&m)).map_err(|d| format!("{name} reprint: {d:?}"))?;
        ensure(m == again, || format!("{name}: round trip differs"))?;
    }
    within(start.elapsed(), 1.0, "grammar checks")?;
    Ok(format!("4 clean listings, 3 expected errors, {} files round-trip", corpus.len()))
}

fn speaker_volume() -> Check {
    let cp = common::problem("velocity.vml");
    let expected = [(0.0, 35.0), (19.0, 35.0), (20.0, 55.0), (69.0, 55.0), (70.0, 85.0), (100.0, 85.0)];
    for mode in [SolveOptions::default(), SolveOptions::exact()] {
        for battery in [5.0, 50.0, 100.0] {
            for (noise, volume) in expected {
                let ctx = ContextSnapshot::new().with("ctx_battery", battery).with("ctx_noise", noise);
                let got = solve_with(&cp, &ctx, mode).map_err(|e| e.to_string())?.binding("speakerVolume");
                ensure(got == Some(volume), || format!("noise {noise}: {got:?}, expected {volume}"))?;
            }
        }
    }
    Ok("35/35/55/55/85/85 at every battery level and objective mode".into())
}

fn threshold_of(rows: &[(f64, f64)]) -> f64 {
    let mut t = f64::NAN;
    for &(b, v) in rows.iter().rev() {
        if v == 600.0 {
            t = b;
        } else {
            break;
        }
    }
    t
}

fn velocity_curve() -> Check {
    let cp = common::problem("velocity.vml");
    let grid = Domain::from_values((5..=100).map(f64::from).collect(), 1e-6);
    let fixed = ContextSnapshot::new().with("ctx_noise", 10.0);
    let mut report = Vec::new();
    for (label, mode, chord) in [("chord", SolveOptions::default(), true), ("exact", SolveOptions::exact(), false)] {
        let start = Instant::now();
        let rows: Vec<SweepRow> = sweep(&cp, "ctx_battery", &grid, &fixed, mode).map_err(|e| e.to_string())?;
        within(start.elapsed(), 10.0, "battery sweep")?;
        let curve: Vec<(f64, f64)> =
            rows.iter().map(|r| (r.context_value, r.solution.binding("maximumVelocity").unwrap())).collect();
        for &(b, v) in &curve {
            ensure(b < 30.0 || v == 600.0, || format!("{label}: battery {b} gives {v}"))?;
        }
        ensure(curve.windows(2).all(|w| w[0].1 <= w[1].1), || format!("{label}: velocity decreases somewhere"))?;
        ensure(curve[0] == (5.0, 100.0), || format!("{label}: battery 5 gives {}", curve[0].1))?;

        let oracle: Vec<(f64, f64)> = (5..=100)
            .map(|b| {
                let ctx = fixed.clone().with("ctx_battery", b as f64);
                let s = brute_force_with(&cp, &ctx, mode).unwrap();
                (b as f64, s.binding("maximumVelocity").unwrap())
            })
            .collect();
        let t = threshold_of(&curve);
        let t_oracle = threshold_of(&oracle);
        let t_hand = common::velocity::threshold(chord);
        ensure(t == t_oracle && t == t_hand, || format!("{label}: threshold {t}, oracle {t_oracle}, by hand {t_hand}"))?;
        ensure((20.0..=30.0).contains(&t), || format!("{label}: threshold {t} outside [20, 30]"))?;
        report.push(format!("{label} threshold {t} ({:.2} s)", start.elapsed().as_secs_f64()));
    }
    Ok(report.join(", "))
}

fn snap(x: f64) -> f64 {
    (x * 10.0).round() / 10.0
}

/// The machine the model's rules force at `ctx`, read straight off the rule
/// conditions and consequences.
fn ruled_machine(tm: &vml::TypedModel, ctx: &ContextSnapshot) -> Option<f64> {
    let values: Vec<(&str, f64)> = ctx.iter().collect();
    let mut forced = None;
    for rule in tm.model.rules() {
        if tm.eval_expr(&rule.implication.condition, values.iter().copied()).ok()? != 0.0 {
            for machine in [common::coffee::A, common::coffee::B] {
                let with: Vec<(&str, f64)> = values.iter().copied().chain([("coffeeMachine", machine)]).collect();
                if tm.eval_expr(&rule.implication.consequence, with).ok()? != 0.0 {
                    forced = Some(machine);
                }
            }
        }
    }
    forced
}

fn coffee_map() -> Check {
    let start = Instant::now();
    let cp = common::problem("coffee_prose.vml");
    let tm = analyze(&common::fixture("coffee_prose.vml")).map_err(|d| format!("{d:?}"))?;
    let base = ContextSnapshot::new()
        .with("ctx_waitingTimeMachine_A", 60.0)
        .with("ctx_waitingTimeMachine_B", 60.0)
        .with("ctx_maxAllowedVelocity", 300.0);
    let mut cases = 0;
    for battery in [5.0, 10.0, 14.0] {
        for i in 0..20 {
            for j in 0..20 {
                let (da, db) = (snap(i as f64 * 20.0 / 19.0), snap(j as f64 * 20.0 / 19.0));
                let ctx = base
                    .clone()
                    .with("ctx_battery", battery)
                    .with("ctx_distanceMachine_A", da)
                    .with("ctx_distanceMachine_B", db);
                let got = solve_with(&cp, &ctx, SolveOptions::default()).map_err(|e| e.to_string())?.binding("coffeeMachine");
                let want = common::coffee::nearer(da, db);
                ensure(got == Some(want), || format!("battery {battery}, distances {da}/{db}: {got:?}"))?;
                ensure(ruled_machine(&tm, &ctx) == got, || format!("rules disagree at {ctx:?}"))?;
                cases += 1;
            }
        }
    }
    let waits = [10.0, 45.0, 60.0, 150.0, 300.0];
    let dists = [0.0, 2.5, 7.5, 20.0];
    for battery in [15.0, 50.0, 100.0] {
        for velocity in [100.0, 350.0, 600.0] {
            for &wa in &waits {
                for &wb in &waits {
                    for &da in &dists {
                        for &db in &dists {
                            let ctx = ContextSnapshot::new()
                                .with("ctx_battery", battery)
                                .with("ctx_maxAllowedVelocity", velocity)
                                .with("ctx_waitingTimeMachine_A", wa)
                                .with("ctx_waitingTimeMachine_B", wb)
                                .with("ctx_distanceMachine_A", da)
                                .with("ctx_distanceMachine_B", db);
                            let s = solve_with(&cp, &ctx, SolveOptions::default()).map_err(|e| e.to_string())?;
                            let ta = common::coffee::total_time(wa, da, velocity);
                            let tb = common::coffee::total_time(wb, db, velocity);
                            let want = if ta <= tb { common::coffee::A } else { common::coffee::B };
                            let got = s.binding("coffeeMachine");
                            ensure(got == Some(want), || format!("{ctx:?}: {got:?}, times {ta}/{tb}"))?;
                            ensure(ruled_machine(&tm, &ctx) == got, || format!("rules disagree at {ctx:?}"))?;
                            cases += 1;
                        }
                    }
                }
            }
        }
    }
    within(start.elapsed(), 5.0, "decision map")?;
    Ok(format!("{cases} snapshots agree with the rules and with total-time arithmetic"))
}

fn oracle_parity() -> Check {
    let mut total = 0;
    for name in ["velocity.vml", "velocity_verbatim.vml", "coffee.vml", "coffee_prose.vml"] {
        let cp = common::problem(name);
        let mut rng = StdRng::seed_from_u64(0xC0FFEE);
        for _ in 0..200 {
            let ctx = common::random_snapshot(&cp, &mut rng);
            for mode in [SolveOptions::default(), SolveOptions::exact()] {
                let a = solve_with(&cp, &ctx, mode).map_err(|e| e.to_string())?;
                let b = brute_force_with(&cp, &ctx, mode).map_err(|e| e.to_string())?;
                ensure(a.same_outcome(&b), || format!("{name} {ctx:?}: {a:?} vs {b:?}"))?;
            }
            total += 1;
        }
    }
    Ok(format!("{total} snapshots x 2 objective modes, bit-equal objectives"))
}

fn cost_function_properties() -> Check {
    let src = common::fixture("velocity.vml");
    let base = common::problem("velocity.vml");

    let flipped = compile_source(&src.replacen("percentType maximized", "percentType minimized", 1), LowerOptions::default())
        .map_err(|d| format!("{d:?}"))?;
    let changed: Vec<usize> =
        (0..base.objective.len()).filter(|&i| base.objective[i].sign != flipped.objective[i].sign).collect();
    ensure(changed == [0] && flipped.objective[0].sign == Sign::Plus, || format!("signs changed at {changed:?}"))?;
    let mut restored = flipped.clone();
    restored.objective[0].sign = base.objective[0].sign;
    ensure(restored == base, || "flipping changed more than the sign".into())?;

    let scaled = src
        .replace("f(maximumVelocity) = maximumVelocity;", "f(maximumVelocity) = 3 * maximumVelocity + 7;")
        .replace("exp(maximumVelocity / 150);", "2.5 * exp(maximumVelocity / 150) - 4;");
    let affine = compile_source(&scaled, LowerOptions::default()).map_err(|d| format!("{d:?}"))?;
    let mut rng = StdRng::seed_from_u64(50);
    for _ in 0..50 {
        let ctx = common::random_snapshot(&base, &mut rng);
        for mode in [SolveOptions::default(), SolveOptions::exact()] {
            let a = solve_with(&base, &ctx, mode).map_err(|e| e.to_string())?;
            let b = solve_with(&affine, &ctx, mode).map_err(|e| e.to_string())?;
            ensure(a.bindings == b.bindings, || format!("{ctx:?}: argmin moved under a*f+b"))?;
        }
    }

    let mut env = vec![f64::NAN; base.slot_count()];
    let battery = base.parameter("ctx_battery").unwrap();
    let velocity = base.variable("maximumVelocity").unwrap();
    let mut evaluations = 0;
    for &b in battery.ty.domain().values() {
        env[battery.slot] = b;
        for t in &base.objective {
            let w = t.weight(&env);
            ensure((0.0..=1.0).contains(&w), || format!("w = {w} at battery {b}"))?;
            evaluations += 1;
        }
    }
    for &v in velocity.domain.values() {
        env[velocity.slot] = v;
        for t in &base.objective {
            for mode in [ObjectiveMode::Linearized, ObjectiveMode::Exact] {
                let p = t.value(&env, mode);
                ensure((0.0..=100.0).contains(&p), || format!("p = {p} at velocity {v}"))?;
                evaluations += 1;
            }
        }
    }
    Ok(format!("one sign flips, argmin stable on 50 snapshots, {evaluations} w/p evaluations in range"))
}

fn linearization() -> Check {
    let cp = common::problem("velocity.vml");
    let v = cp.variable("maximumVelocity").unwrap();
    let pl = piecewise_linearize(&cp.objective[1].values[0], v.slot, &v.domain, 5);
    for &b in &pl.breakpoints {
        let err = (pl.eval(b) - common::velocity::energy_exact(b)).abs();
        ensure(err <= 1e-9, || format!("error {err} at breakpoint {b}"))?;
    }
    // the bound is the largest grid error of chords drawn by hand
    let bound = v
        .domain
        .values()
        .iter()
        .map(|&x| (common::velocity::energy_chord(x) - common::velocity::energy_exact(x)).abs())
        .fold(0.0, f64::max);
    let worst = v.domain.values().iter().map(|&x| (pl.eval(x) - common::velocity::energy_exact(x)).abs()).fold(0.0, f64::max);
    ensure(worst <= bound + 1e-9 && bound <= 6.0, || format!("max error {worst}, bound {bound}"))?;

    let text = emit_minizinc(&cp).map_err(|e| e.to_string())?;
    let slopes: Vec<f64> = text
        .lines()
        .filter_map(|l| l.split("-> aux_energyConsumption = ").nth(1))
        .map(|rhs| rhs.split(" * ").next().unwrap().parse().unwrap())
        .collect();
    let published = [3.444 / 100.0, 6.708 / 100.0, 13.07 / 100.0, 25.44 / 100.0, 49.57 / 100.0];
    ensure(slopes.len() == 5, || format!("{} segments emitted", slopes.len()))?;
    let mut dev: f64 = 0.0;
    for (s, p) in slopes.iter().zip(published) {
        dev = dev.max((s - p).abs() / p);
    }
    ensure(dev <= 0.05, || format!("slope deviation {:.2}%", dev * 100.0))?;
    Ok(format!("max grid error {worst:.3} (hand-drawn chords {bound:.3}, limit 6.0), slopes within {:.2}% of the published ones", dev * 100.0))
}

fn minizinc_emission() -> Check {
    let text = emit_minizinc(&common::problem("velocity.vml")).map_err(|e| e.to_string())?;
    let golden = std::fs::read_to_string(std::path::Path::new(env!("CARGO_MANIFEST_DIR")).join("tests/golden/velocity.mzn"))
        .map_err(|e| e.to_string())?;
    ensure(text == golden, || "output differs from the golden file".into())?;
    let landmarks = [
        "int: ctx_battery;",
        "int: ctx_noise;",
        "var 100.0..600.0: maximumVelocity;",
        "constraint ctx_noise < 20 -> speakerVolume = 35;",
        "constraint ctx_noise >= 20 /\\ ctx_noise < 70 -> speakerVolume = 55;",
        "constraint ctx_noise >= 70 -> speakerVolume = 85;",
    ];
    for l in landmarks {
        ensure(text.contains(l), || format!("missing `{l}`"))?;
    }
    let solve = text.lines().find(|l| l.starts_with("solve minimize")).ok_or("no solve item")?;
    ensure(solve.contains("priority_performance *") && solve.contains("+ priority_energyConsumption * aux_energyConsumption"), || {
        format!("objective: {solve}")
    })?;
    Ok("golden file matches; contexts, velocity range, noise rules and weighted objective present".into())
}

fn runtime_semantics() -> Check {
    let manifest = common::fixture_path("pipeline.toml");
    let script: ScenarioScript = common::fixture("battery_drain.scn").parse().map_err(|e| format!("{e}"))?;
    let mut csvs = Vec::new();
    for _ in 0..2 {
        let mut e = Engine::load(&manifest).map_err(|e| e.to_string())?;
        let t = e.run_scenario(&script).map_err(|e| e.to_string())?;
        let mut buf = Vec::new();
        t.write_csv(&mut buf).map_err(|e| e.to_string())?;
        csvs.push(buf);
    }
    ensure(csvs[0] == csvs[1], || "replays differ".into())?;

    let mut e = Engine::load(&manifest).map_err(|e| e.to_string())?;
    let mut fired = Vec::new();
    for b in [50.0, 14.0, 12.0, 40.0, 10.0, 9.0] {
        fired.push(e.update_context("ctx_battery", b).map_err(|e| e.to_string())?.len());
    }
    // `< 30` and `< 15` both cross on the way down, twice
    ensure(fired == [0, 2, 0, 0, 2, 0], || format!("fired per update: {fired:?}"))?;

    let mut e = Engine::load(&manifest).map_err(|e| e.to_string())?;
    // one entry: the battery crossing pushes only after every value is in
    let setup: ScenarioScript = "0 set ctx_waitingTimeMachine_A=10 ctx_waitingTimeMachine_B=20 ctx_distanceMachine_A=3 \
        ctx_distanceMachine_B=1 ctx_noise=10 ctx_battery=20\n1 query coffee"
        .parse()
        .map_err(|e| format!("{e}"))?;
    let t = e.run_scenario(&setup).map_err(|e| e.to_string())?;
    let order: Vec<(&str, Trigger)> = t.rows.iter().map(|r| (r.model.as_str(), r.trigger)).collect();
    let want = [("velocity", Trigger::Event), ("coffee", Trigger::Event), ("velocity", Trigger::Query), ("coffee", Trigger::Query)];
    ensure(order == want, || format!("solve order {order:?}"))?;
    let t = BindingTimeline { rows: t.rows[2..].to_vec() };
    let v = t.rows[0].solution.binding("maximumVelocity").ok_or("velocity unsolved")?;
    ensure(e.store.get("ctx_maxAllowedVelocity") == Some(v), || "link not propagated".into())?;
    // 3 m at the propagated velocity decides between the machines
    let ta = common::coffee::total_time(10.0, 3.0, v);
    let tb = common::coffee::total_time(20.0, 1.0, v);
    let want = if ta <= tb { common::coffee::A } else { common::coffee::B };
    ensure(t.rows[1].solution.binding("coffeeMachine") == Some(want), || format!("coffee ignored velocity {v}"))?;
    Ok(format!("replay byte-identical ({} bytes), edges fire once, velocity {v} reaches coffee first", csvs[0].len()))
}

fn main() {
    let criteria: [(&str, &str, fn() -> Check); 9] = [
        ("AC1", "grammar fidelity", grammar_fidelity),
        ("AC2", "speaker-volume rules", speaker_volume),
        ("AC3", "velocity over battery", velocity_curve),
        ("AC4", "coffee-machine decision map", coffee_map),
        ("AC5", "oracle parity", oracle_parity),
        ("AC6", "cost function properties", cost_function_properties),
        ("AC7", "linearization", linearization),
        ("AC8", "MiniZinc emission", minizinc_emission),
        ("AC9", "runtime semantics", runtime_semantics),
    ];
    let mut failed = 0;
    for (id, title, check) in criteria {
        let start = Instant::now();
        let outcome = catch_unwind(AssertUnwindSafe(check)).unwrap_or_else(|_| Err("panicked".into()));
        let secs = start.elapsed().as_secs_f64();
        match outcome {
            Ok(detail) => println!("[PASS] {id} {title}: {detail} ({secs:.2} s)"),
            Err(why) => {
                failed += 1;
                println!("[FAIL] {id} {title}: {why} ({secs:.2} s)");
            }
        }
    }
    println!("acceptance: {} passed, {failed} failed", criteria.len() - failed);
    if failed > 0 {
        std::process::exit(1);
    }
}
