//! The `run`, `gradcheck` and `compare` verbs.

use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};

use rcg::batch::{gradient_check, map_seeds};
use rcg::linalg::{random_spd_system, random_symmetric};
use rcg::manifold::Manifold;
use rcg::problems::{brockett_problem, quadratic_problem, rayleigh_problem};
use rcg::{solve, Error, ManifoldPoint, Method, Problem, SolveResult, SymmetricMatrix};

use crate::config::{ConfigError, ProblemKind, RunConfig};
use crate::trace_csv::{real, write_trace};

pub const EXIT_OK: u8 = 0;
pub const EXIT_GRADCHECK_FAILED: u8 = 1;
pub const EXIT_NOT_CONVERGED: u8 = 2;
pub const EXIT_INVARIANT: u8 = 3;
pub const EXIT_CONFIG: u8 = 4;

pub const GRADCHECK_POINTS: u64 = 20;
pub const GRADCHECK_THRESHOLD: f64 = 1e-5;

/// Exit code for a solver error.
pub fn exit_code_for(e: &Error) -> u8 {
    match e {
        Error::InvariantViolation { .. }
        | Error::NotDescent { .. }
        | Error::DegenerateDenominator { .. } => EXIT_INVARIANT,
        Error::InvalidOptions(_)
        | Error::InvalidDimensions(_)
        | Error::BadWeights
        | Error::AsymmetricInput(_)
        | Error::NotPositiveDefinite(_) => EXIT_CONFIG,
        _ => EXIT_NOT_CONVERGED,
    }
}

/// Brockett weights `1, 2, …, p`.
pub fn brockett_weights(p: usize) -> Vec<f64> {
    (1..=p).map(|i| i as f64).collect()
}

/// The seeded problem. Data are drawn from `seed`.
pub fn build_problem(cfg: &RunConfig) -> Result<Problem, ConfigError> {
    let p = match cfg.problem {
        ProblemKind::Rayleigh => {
            rayleigh_problem(&SymmetricMatrix::new(random_symmetric(cfg.n, cfg.seed))?)?
        }
        ProblemKind::Brockett => {
            let a = SymmetricMatrix::new(random_symmetric(cfg.n, cfg.seed))?;
            brockett_problem(&a, &brockett_weights(cfg.p.unwrap_or(1)))?
        }
        ProblemKind::Quadratic => match (&cfg.a_diag, &cfg.b) {
            (Some(d), Some(b)) => quadratic_problem(&SymmetricMatrix::from_diagonal(d), b)?,
            _ => {
                let (a, b) = random_spd_system(cfg.n, cfg.seed);
                quadratic_problem(&SymmetricMatrix::new(a)?, b.as_slice())?
            }
        },
    };
    Ok(p)
}

/// Starting point, drawn from `seed + 1` so that it is independent of the data.
pub fn start_point(problem: &Problem, seed: u64) -> ManifoldPoint {
    problem.manifold.random_point(seed.wrapping_add(1))
}

pub fn summary_line(method: Method, r: &SolveResult, oracle: Option<f64>) -> String {
    format!(
        "method={method} iters={} f={} grad_norm={} converged={} oracle_gap={}",
        r.iters,
        real(r.f_final),
        real(r.grad_norm_final),
        r.converged,
        r.oracle_gap(oracle).map_or_else(|| "na".to_string(), real),
    )
}

fn write_csv(path: &Path, r: &SolveResult) -> Result<(), String> {
    let file = File::create(path).map_err(|e| format!("cannot create {}: {e}", path.display()))?;
    let mut w = BufWriter::new(file);
    write_trace(&mut w, &r.trace)
        .and_then(|_| w.flush())
        .map_err(|e| format!("cannot write {}: {e}", path.display()))
}

pub fn cmd_run(cfg: &RunConfig) -> u8 {
    let (problem, opts) =
        match build_problem(cfg).and_then(|p| Ok((p, cfg.solve_options(cfg.method)?))) {
            Ok(v) => v,
            Err(e) => {
                eprintln!("error: {e}");
                return EXIT_CONFIG;
            }
        };
    let x0 = start_point(&problem, cfg.seed);
    let r = match solve(&problem, &x0, &opts) {
        Ok(r) => r,
        Err(e) => {
            eprintln!("error: {e}");
            return exit_code_for(&e);
        }
    };
    if let Err(e) = write_csv(&cfg.output_path, &r) {
        eprintln!("error: {e}");
        return EXIT_CONFIG;
    }
    println!("{}", summary_line(cfg.method, &r, problem.oracle_value));
    if r.converged {
        EXIT_OK
    } else {
        eprintln!("not converged: {:?}", r.termination);
        EXIT_NOT_CONVERGED
    }
}

pub fn cmd_gradcheck(cfg: &RunConfig, h: f64) -> u8 {
    if !(h > 0.0 && h.is_finite()) {
        eprintln!("error: h must be positive and finite, got {h}");
        return EXIT_CONFIG;
    }
    let problem = match build_problem(cfg) {
        Ok(p) => p,
        Err(e) => {
            eprintln!("error: {e}");
            return EXIT_CONFIG;
        }
    };
    let seeds: Vec<u64> = (1..=GRADCHECK_POINTS)
        .map(|i| cfg.seed.wrapping_add(i))
        .collect();
    match gradient_check(&problem, &seeds, h) {
        Ok(e) => {
            println!(
                "problem={} points={} h={} max_rel_error={}",
                problem.name,
                seeds.len(),
                real(h),
                real(e)
            );
            if e <= GRADCHECK_THRESHOLD {
                EXIT_OK
            } else {
                EXIT_GRADCHECK_FAILED
            }
        }
        Err(e) => {
            eprintln!("error: {e}");
            EXIT_GRADCHECK_FAILED
        }
    }
}

/// `trace.csv` becomes `trace_<tag>.csv`.
pub fn method_path(base: &Path, method: Method) -> PathBuf {
    let stem = base
        .file_stem()
        .map_or_else(|| "trace".into(), |s| s.to_string_lossy().into_owned());
    let name = match base.extension() {
        Some(ext) => format!("{stem}_{}.{}", method.tag(), ext.to_string_lossy()),
        None => format!("{stem}_{}", method.tag()),
    };
    base.with_file_name(name)
}

fn max_iterate_gap(a: &SolveResult, b: &SolveResult) -> f64 {
    if a.steps.len() != b.steps.len() {
        return f64::INFINITY;
    }
    let steps = a
        .steps
        .iter()
        .zip(&b.steps)
        .map(|(s, t)| (s.x.coords(), t.x.coords()));
    let last = std::iter::once((a.x_final.coords(), b.x_final.coords()));
    steps
        .chain(last)
        .map(|(x, y)| (x - y).amax())
        .fold(0.0, f64::max)
}

pub fn cmd_compare(cfg: &RunConfig) -> u8 {
    let problem = match build_problem(cfg) {
        Ok(p) => p,
        Err(e) => {
            eprintln!("error: {e}");
            return EXIT_CONFIG;
        }
    };
    let mut methods = vec![
        Method::ScaledDY,
        Method::FletcherReevesScaled,
        Method::SteepestDescent,
    ];
    let euclidean = problem.manifold.is_euclidean();
    if euclidean {
        methods.push(Method::EuclideanDYReference);
    }
    let mut options = Vec::new();
    for &m in &methods {
        match cfg.solve_options(m) {
            Ok(mut o) => {
                o.keep_steps =
                    euclidean && matches!(m, Method::ScaledDY | Method::EuclideanDYReference);
                options.push(o);
            }
            Err(e) => {
                eprintln!("error: {m}: {e}");
                return EXIT_CONFIG;
            }
        }
    }
    let x0 = start_point(&problem, cfg.seed);
    // The solves share only immutable inputs; results come back in order.
    let idx: Vec<u64> = (0..methods.len() as u64).collect();
    let results = map_seeds(&idx, |i| solve(&problem, &x0, &options[i as usize]));

    let mut code = EXIT_OK;
    println!(
        "{:<24} {:>6} {:>8} {:>10} {:>24} {:>24}",
        "method", "iters", "f_evals", "grad_evals", "grad_norm", "oracle_gap"
    );
    for (m, r) in methods.iter().zip(&results) {
        match r {
            Ok(r) => {
                let path = method_path(&cfg.output_path, *m);
                if let Err(e) = write_csv(&path, r) {
                    eprintln!("error: {e}");
                    return EXIT_CONFIG;
                }
                let gap = r
                    .oracle_gap(problem.oracle_value)
                    .map_or_else(|| "na".to_string(), real);
                println!(
                    "{:<24} {:>6} {:>8} {:>10} {:>24} {:>24}",
                    m.tag(),
                    r.iters,
                    r.f_evals,
                    r.grad_evals,
                    real(r.grad_norm_final),
                    gap
                );
                if !r.converged {
                    eprintln!("{m}: not converged ({:?})", r.termination);
                    code = code.max(EXIT_NOT_CONVERGED);
                }
            }
            Err(e) => {
                println!("{:<24} failed: {e}", m.tag());
                code = code.max(exit_code_for(e).min(EXIT_INVARIANT));
            }
        }
    }
    if let (Some(Ok(dy)), Some(Ok(reference))) = (results.first(), results.get(3)) {
        println!(
            "scaled_dy_vs_reference max_coordinate_gap={}",
            real(max_iterate_gap(dy, reference))
        );
    }
    code
}
