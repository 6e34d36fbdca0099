//! Independent solves and checks over many seeds.
//!
//! With the `parallel` feature (on by default) the `*_par` functions fan out
//! over the rayon thread pool and [`map_seeds`] dispatches to them. Without
//! it everything runs on the calling thread. Results are returned in seed
//! order either way, and each item is computed by the same sequential code,
//! so parallel and sequential runs are bit-identical.

use crate::cg::{solve, SolveOptions, SolveResult};
use crate::error::Result;
use crate::manifold::Manifold;
use crate::problems::{fd_gradient, gradient_relative_error, Problem};

pub fn map_seeds_seq<T, F>(seeds: &[u64], f: F) -> Vec<T>
where
    F: Fn(u64) -> T,
{
    seeds.iter().map(|&s| f(s)).collect()
}

#[cfg(feature = "parallel")]
pub fn map_seeds_par<T, F>(seeds: &[u64], f: F) -> Vec<T>
where
    T: Send,
    F: Fn(u64) -> T + Sync + Send,
{
    use rayon::prelude::*;
    seeds.par_iter().map(|&s| f(s)).collect()
}

/// Parallel when the `parallel` feature is enabled, sequential otherwise.
pub fn map_seeds<T, F>(seeds: &[u64], f: F) -> Vec<T>
where
    T: Send,
    F: Fn(u64) -> T + Sync + Send,
{
    #[cfg(feature = "parallel")]
    {
        map_seeds_par(seeds, f)
    }
    #[cfg(not(feature = "parallel"))]
    {
        map_seeds_seq(seeds, f)
    }
}

fn start_and_solve<M: Manifold>(
    problem: &Problem<M>,
    seed: u64,
    opts: &SolveOptions,
) -> Result<SolveResult> {
    let x0 = problem.manifold.random_point(seed);
    solve(problem, &x0, opts)
}

/// One solve per seed, each started from `random_point(seed)`.
pub fn multi_start<M: Manifold>(
    problem: &Problem<M>,
    seeds: &[u64],
    opts: &SolveOptions,
) -> Vec<Result<SolveResult>> {
    map_seeds(seeds, |s| start_and_solve(problem, s, opts))
}

pub fn multi_start_seq<M: Manifold>(
    problem: &Problem<M>,
    seeds: &[u64],
    opts: &SolveOptions,
) -> Vec<Result<SolveResult>> {
    map_seeds_seq(seeds, |s| start_and_solve(problem, s, opts))
}

#[cfg(feature = "parallel")]
pub fn multi_start_par<M: Manifold>(
    problem: &Problem<M>,
    seeds: &[u64],
    opts: &SolveOptions,
) -> Vec<Result<SolveResult>> {
    map_seeds_par(seeds, |s| start_and_solve(problem, s, opts))
}

/// Largest relative gap between the analytic and finite-difference
/// gradients over `random_point(seed)` for each seed.
pub fn gradient_check<M: Manifold>(problem: &Problem<M>, seeds: &[u64], h: f64) -> Result<f64> {
    let errs = map_seeds(seeds, |s| -> Result<f64> {
        let x = problem.manifold.random_point(s);
        let g = problem.eval_grad(&x)?;
        let fd = fd_gradient(problem, &x, h)?;
        Ok(gradient_relative_error(fd.coords(), g.coords()))
    });
    errs.into_iter()
        .try_fold(0.0, |acc, e| e.map(|v| f64::max(acc, v)))
}

/// Largest relative gap between `dretract` and a central difference of
/// `t ↦ R_x(η + tξ)` over seeded triples `(x, η, ξ)`. Each seed draws `x`
/// from `seed`, `η` from `seed + 1` scaled by `eta_scale`, and `ξ` from
/// `seed + 2`.
pub fn dretract_check<M: Manifold>(m: &M, seeds: &[u64], eta_scale: f64, h: f64) -> Result<f64> {
    let errs = map_seeds(seeds, |s| -> Result<f64> {
        let x = m.random_point(s);
        let eta = m.random_tangent(&x, s.wrapping_add(1)).scale(eta_scale);
        let xi = m.random_tangent(&x, s.wrapping_add(2));
        let analytic = m.dretract(&x, &eta, &xi)?;
        let fwd = m.retract_coords(x.coords(), &(eta.coords() + xi.coords() * h));
        let bwd = m.retract_coords(x.coords(), &(eta.coords() - xi.coords() * h));
        let fd = (fwd - bwd) / (2.0 * h);
        Ok(gradient_relative_error(&fd, analytic.coords()))
    });
    errs.into_iter()
        .try_fold(0.0, |acc, e| e.map(|v| f64::max(acc, v)))
}
