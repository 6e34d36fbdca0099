use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use rcg_cli::commands::{cmd_compare, cmd_gradcheck, cmd_run, EXIT_CONFIG};
use rcg_cli::config::{ConfigError, PartialConfig, RunConfig};

#[derive(Parser)]
#[command(
    name = "rcg",
    version,
    about = "Riemannian conjugate gradient benchmarks"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Solve one problem; write the trace CSV and print a summary line.
    Run(RunArgs),
    /// Compare analytic and finite-difference gradients at 20 seeded points.
    Gradcheck(GradcheckArgs),
    /// Run scaled_dy, fr_scaled and steepest_descent from the same start.
    Compare(CompareArgs),
}

#[derive(Args)]
struct ProblemArgs {
    /// Flat `key = value` config file; flags override its entries.
    #[arg(long)]
    config: Option<PathBuf>,
    /// rayleigh, brockett or quadratic.
    #[arg(long)]
    problem: Option<String>,
    #[arg(long)]
    n: Option<usize>,
    /// Number of columns (brockett only).
    #[arg(long)]
    p: Option<usize>,
    #[arg(long)]
    seed: Option<u64>,
    /// Diagonal of A for a hand-written quadratic, comma separated.
    #[arg(long, value_delimiter = ',', allow_negative_numbers = true)]
    a_diag: Option<Vec<f64>>,
    /// Right-hand side for a hand-written quadratic, comma separated.
    #[arg(long, value_delimiter = ',', allow_negative_numbers = true)]
    b: Option<Vec<f64>>,
}

#[derive(Args)]
struct SolverArgs {
    #[arg(long)]
    c1: Option<f64>,
    #[arg(long)]
    c2: Option<f64>,
    #[arg(long)]
    grad_tol: Option<f64>,
    #[arg(long)]
    max_iters: Option<usize>,
    /// Trace CSV path (compare inserts the method tag before the extension).
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long)]
    no_invariant_checks: bool,
}

#[derive(Args)]
struct RunArgs {
    #[command(flatten)]
    problem: ProblemArgs,
    /// scaled_dy, scaled_dy_bar, fr_scaled, steepest_descent or euclidean_dy_reference.
    #[arg(long)]
    method: Option<String>,
    #[command(flatten)]
    solver: SolverArgs,
}

#[derive(Args)]
struct CompareArgs {
    #[command(flatten)]
    problem: ProblemArgs,
    #[command(flatten)]
    solver: SolverArgs,
}

#[derive(Args)]
struct GradcheckArgs {
    #[command(flatten)]
    problem: ProblemArgs,
    /// Finite-difference step.
    #[arg(long, default_value_t = rcg::problems::DEFAULT_FD_STEP)]
    h: f64,
}

fn problem_part(a: &ProblemArgs) -> Result<PartialConfig, ConfigError> {
    let mut cfg = PartialConfig::default();
    if let Some(v) = &a.problem {
        cfg.set("problem", v)?;
    }
    cfg.n = a.n;
    cfg.p = a.p;
    cfg.seed = a.seed;
    cfg.a_diag = a.a_diag.clone();
    cfg.b = a.b.clone();
    Ok(cfg)
}

fn solver_part(mut cfg: PartialConfig, a: &SolverArgs) -> PartialConfig {
    cfg.c1 = a.c1;
    cfg.c2 = a.c2;
    cfg.grad_tol = a.grad_tol;
    cfg.max_iters = a.max_iters;
    cfg.output_path = a.out.clone();
    if a.no_invariant_checks {
        cfg.check_invariants = Some(false);
    }
    cfg
}

fn load(a: &ProblemArgs, flags: PartialConfig) -> Result<RunConfig, ConfigError> {
    let base = match &a.config {
        Some(path) => {
            let text = std::fs::read_to_string(path)
                .map_err(|e| ConfigError(format!("cannot read {}: {e}", path.display())))?;
            PartialConfig::parse_file_contents(&text)?
        }
        None => PartialConfig::default(),
    };
    base.merge(flags).resolve()
}

fn dispatch(command: Command) -> Result<u8, ConfigError> {
    Ok(match command {
        Command::Run(a) => {
            let mut flags = solver_part(problem_part(&a.problem)?, &a.solver);
            if let Some(m) = &a.method {
                flags.set("method", m)?;
            }
            cmd_run(&load(&a.problem, flags)?)
        }
        Command::Gradcheck(a) => cmd_gradcheck(&load(&a.problem, problem_part(&a.problem)?)?, a.h),
        Command::Compare(a) => {
            let flags = solver_part(problem_part(&a.problem)?, &a.solver);
            cmd_compare(&load(&a.problem, flags)?)
        }
    })
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_CONFIG } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match dispatch(cli.command) {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(EXIT_CONFIG)
        }
    }
}
