use std::fs;
use std::io::{self, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use vml::compile::{compile_source, emit_minizinc, ConstraintProblem, LowerOptions, DEFAULT_SEGMENTS};
use vml::domain::Domain;
use vml::runtime::{Engine, RuntimeError, ScenarioScript};
use vml::solve::{solve_with, sweep, write_sweep_csv, ContextSnapshot, SolveOptions};
use vml::Diagnostic;

/// Variability models: check, compile to MiniZinc, solve, sweep, simulate.
#[derive(Parser)]
#[command(name = "vml", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Parse and analyze models and print their diagnostics.
    Check {
        #[arg(required = true)]
        files: Vec<PathBuf>,
    },
    /// Emit a MiniZinc model.
    Compile {
        file: PathBuf,
        #[arg(short, long)]
        output: Option<PathBuf>,
        /// Chords per nonlinear definition.
        #[arg(long, default_value_t = DEFAULT_SEGMENTS)]
        segments: usize,
    },
    /// Solve a model for one context snapshot.
    Solve {
        file: PathBuf,
        #[command(flatten)]
        solve: SolveArgs,
    },
    /// Solve once per value of one context and write a CSV.
    Sweep {
        file: PathBuf,
        #[arg(long)]
        vary: String,
        #[arg(long, allow_negative_numbers = true)]
        from: f64,
        #[arg(long, allow_negative_numbers = true)]
        to: f64,
        #[arg(long)]
        step: f64,
        #[command(flatten)]
        solve: SolveArgs,
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
    /// Replay a scenario script through a pipeline manifest.
    Simulate {
        manifest: PathBuf,
        script: PathBuf,
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
}

#[derive(Args)]
struct SolveArgs {
    /// Context values, `name=value`.
    #[arg(long = "ctx", num_args = 1..)]
    ctx: Vec<String>,
    #[arg(long, default_value_t = DEFAULT_SEGMENTS)]
    segments: usize,
    /// Use the nonlinear objective instead of its chord surrogate.
    #[arg(long)]
    exact_objective: bool,
}

enum Failure {
    Diagnostics,
    Infeasible,
    Usage(String),
}

impl From<io::Error> for Failure {
    fn from(e: io::Error) -> Self {
        Failure::Usage(e.to_string())
    }
}

fn read(path: &Path) -> Result<String, Failure> {
    fs::read_to_string(path).map_err(|e| Failure::Usage(format!("{}: {e}", path.display())))
}

fn write_out(path: Option<&Path>, bytes: &[u8]) -> Result<(), Failure> {
    match path {
        Some(p) => fs::write(p, bytes).map_err(|e| Failure::Usage(format!("{}: {e}", p.display()))),
        None => Ok(io::stdout().write_all(bytes)?),
    }
}

fn report(file: &Path, diags: &[Diagnostic]) {
    for d in diags {
        eprintln!("{}", d.render(&file.display().to_string()));
    }
}

fn load(file: &Path, segments: usize) -> Result<ConstraintProblem, Failure> {
    match compile_source(&read(file)?, LowerOptions { segments }) {
        Ok(cp) => {
            report(file, &cp.warnings);
            Ok(cp)
        }
        Err(diags) => {
            report(file, &diags);
            Err(Failure::Diagnostics)
        }
    }
}

fn snapshot(cp: &ConstraintProblem, args: &[String]) -> Result<ContextSnapshot, Failure> {
    let mut ctx = ContextSnapshot::new();
    for a in args {
        ctx.assign(cp, a).map_err(|e| Failure::Usage(e.to_string()))?;
    }
    Ok(ctx)
}

fn options(args: &SolveArgs) -> SolveOptions {
    if args.exact_objective {
        SolveOptions::exact()
    } else {
        SolveOptions::default()
    }
}

fn run(cli: Cli) -> Result<(), Failure> {
    match cli.command {
        Command::Check { files } => {
            let mut failed = false;
            for f in &files {
                match compile_source(&read(f)?, LowerOptions::default()) {
                    Ok(cp) => {
                        report(f, &cp.warnings);
                        println!("{}: ok", f.display());
                    }
                    Err(diags) => {
                        report(f, &diags);
                        failed = true;
                    }
                }
            }
            if failed {
                return Err(Failure::Diagnostics);
            }
        }
        Command::Compile { file, output, segments } => {
            let cp = load(&file, segments)?;
            let text = emit_minizinc(&cp).map_err(|e| {
                eprintln!("{}: {e}", file.display());
                Failure::Diagnostics
            })?;
            write_out(output.as_deref(), text.as_bytes())?;
        }
        Command::Solve { file, solve } => {
            let cp = load(&file, solve.segments)?;
            let ctx = snapshot(&cp, &solve.ctx)?;
            let s = solve_with(&cp, &ctx, options(&solve)).map_err(|e| Failure::Usage(e.to_string()))?;
            report(&file, &s.warnings);
            if !s.is_optimal() {
                println!("infeasible; triggered: {}", s.triggered.join(", "));
                return Err(Failure::Infeasible);
            }
            for v in &cp.variables {
                if let Some(x) = s.binding(&v.name) {
                    println!("{} = {}", v.name, v.ty.format_value(x));
                }
            }
            println!("objective = {}", s.objective.unwrap_or(f64::NAN));
            println!("triggered: {}", s.triggered.join(", "));
        }
        Command::Sweep { file, vary, from, to, step, solve, output } => {
            if !(step > 0.0) || to < from {
                return Err(Failure::Usage("expected --from <= --to and a positive --step".into()));
            }
            let cp = load(&file, solve.segments)?;
            let fixed = snapshot(&cp, &solve.ctx)?;
            let n = ((to - from) / step + 1e-9).floor() as usize;
            let grid = Domain::from_values((0..=n).map(|i| from + i as f64 * step).collect(), step * 1e-6);
            let rows = sweep(&cp, &vary, &grid, &fixed, options(&solve)).map_err(|e| Failure::Usage(e.to_string()))?;
            let mut buf = Vec::new();
            write_sweep_csv(&cp, &rows, &mut buf).map_err(|e| Failure::Usage(e.to_string()))?;
            write_out(output.as_deref(), &buf)?;
        }
        Command::Simulate { manifest, script, output } => {
            let fail = |e: RuntimeError| match e {
                RuntimeError::Diagnostics { model, diagnostics } => {
                    report(Path::new(&model), &diagnostics);
                    Failure::Diagnostics
                }
                other => Failure::Usage(other.to_string()),
            };
            let mut engine = Engine::load(&manifest).map_err(fail)?;
            let script: ScenarioScript = read(&script)?.parse().map_err(fail)?;
            let timeline = engine.run_scenario(&script).map_err(fail)?;
            let mut buf = Vec::new();
            timeline.write_csv(&mut buf).map_err(|e| Failure::Usage(e.to_string()))?;
            write_out(output.as_deref(), &buf)?;
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { ExitCode::from(3) } else { ExitCode::SUCCESS };
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Diagnostics) => ExitCode::from(1),
        Err(Failure::Infeasible) => ExitCode::from(2),
        Err(Failure::Usage(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(3)
        }
    }
}
