//! Step-size selection along retraction curves `α ↦ R_x(α η)`.
//!
//! With `φ(α) = f(R_x(αη))` and `φ'(α) = ⟨grad f(R_x(αη)), D R_x(αη)[η]⟩`:
//!
//! * weak Wolfe: `φ(α) ≤ φ(0) + c1 α φ'(0)` and `φ'(α) ≥ c2 φ'(0)`
//! * strong Wolfe: the same Armijo test and `|φ'(α)| ≤ c2 |φ'(0)|`
//!
//! The weak search is plain bracketing bisection. The strong search is the
//! usual bracket-then-zoom scheme, zooming by bisection.

use crate::error::{Error, LineSearchDiagnostics, Result};
use crate::manifold::{Manifold, ManifoldPoint, TangentVector};
use crate::problems::Problem;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct WolfeParams {
    pub c1: f64,
    pub c2: f64,
    pub alpha_init: f64,
    pub max_bracket_iters: usize,
    pub alpha_max: f64,
}

impl Default for WolfeParams {
    fn default() -> Self {
        Self {
            c1: 1e-4,
            c2: 0.9,
            alpha_init: 1.0,
            max_bracket_iters: 60,
            alpha_max: 1e10,
        }
    }
}

impl WolfeParams {
    /// Defaults for the strong Wolfe search of the Fletcher-Reeves baseline.
    pub fn strong_default() -> Self {
        Self {
            c2: 0.1,
            ..Self::default()
        }
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |msg: String| Err(Error::InvalidOptions(msg));
        if !(self.c1 > 0.0 && self.c1 < 1.0) {
            return bad(format!("c1 must lie in (0, 1), got {}", self.c1));
        }
        if !(self.c2 > self.c1 && self.c2 < 1.0) {
            return bad(format!(
                "c2 must satisfy c1 < c2 < 1, got c1 = {} and c2 = {}",
                self.c1, self.c2
            ));
        }
        if !(self.alpha_init > 0.0) {
            return bad(format!(
                "alpha_init must be positive, got {}",
                self.alpha_init
            ));
        }
        if !(self.alpha_max >= self.alpha_init) {
            return bad(format!(
                "alpha_max ({}) must be at least alpha_init ({})",
                self.alpha_max, self.alpha_init
            ));
        }
        if self.max_bracket_iters == 0 {
            return bad("max_bracket_iters must be positive".into());
        }
        Ok(())
    }
}

#[derive(Clone, Debug)]
pub struct LineSearchOutcome {
    pub alpha: f64,
    pub f_new: f64,
    /// `f_new − f(x)`, resolved below the rounding unit of `f`.
    pub f_change: f64,
    /// Objective evaluations spent by the search.
    pub evals: usize,
    /// Gradient evaluations spent by the search.
    pub grad_evals: usize,
    /// `R_x(α η)`.
    pub point: ManifoldPoint,
    /// Riemannian gradient at `point`.
    pub gradient: TangentVector,
    /// `φ'(α)`.
    pub slope: f64,
}

/// One trial step: the point and `φ(α) − φ(0)`.
struct Trial {
    point: ManifoldPoint,
    df: f64,
}

struct Evaluator<'a, M> {
    problem: &'a Problem<M>,
    x: &'a ManifoldPoint,
    eta: &'a TangentVector,
    evals: usize,
    grad_evals: usize,
}

impl<'a, M: Manifold> Evaluator<'a, M> {
    fn new(problem: &'a Problem<M>, x: &'a ManifoldPoint, eta: &'a TangentVector) -> Self {
        Self {
            problem,
            x,
            eta,
            evals: 0,
            grad_evals: 0,
        }
    }

    fn value(&mut self, alpha: f64) -> Result<Trial> {
        let step = self.eta.scale(alpha);
        let point = self.problem.manifold.retract(self.x, &step)?;
        let df = self.problem.eval_df(self.x, &point)?;
        self.evals += 1;
        Ok(Trial { point, df })
    }

    fn slope(&mut self, alpha: f64, trial: &Trial) -> Result<(TangentVector, f64)> {
        let m = &self.problem.manifold;
        let g = self.problem.eval_grad(&trial.point)?;
        self.grad_evals += 1;
        let t = m.dretract(self.x, &self.eta.scale(alpha), self.eta)?;
        let s = m.inner(&g, &t)?;
        if !s.is_finite() {
            return Err(Error::NonFiniteValue { what: "slope" });
        }
        Ok((g, s))
    }

    fn finish(
        self,
        alpha: f64,
        trial: Trial,
        gradient: TangentVector,
        slope: f64,
    ) -> Result<LineSearchOutcome> {
        Ok(LineSearchOutcome {
            alpha,
            f_new: self.problem.eval_f(&trial.point)?,
            f_change: trial.df,
            evals: self.evals,
            grad_evals: self.grad_evals,
            point: trial.point,
            gradient,
            slope,
        })
    }
}

/// `(φ(α), φ'(α))`.
pub fn phi_and_slope<M: Manifold>(
    problem: &Problem<M>,
    x: &ManifoldPoint,
    eta: &TangentVector,
    alpha: f64,
) -> Result<(f64, f64)> {
    let (df, s) = phi_change_and_slope(problem, x, eta, alpha)?;
    Ok((problem.eval_f(x)? + df, s))
}

/// `(φ(α) − φ(0), φ'(α))`, with the difference resolved below the rounding
/// unit of `φ(0)`.
pub fn phi_change_and_slope<M: Manifold>(
    problem: &Problem<M>,
    x: &ManifoldPoint,
    eta: &TangentVector,
    alpha: f64,
) -> Result<(f64, f64)> {
    if !(alpha >= 0.0) {
        return Err(Error::InvalidOptions(format!(
            "step must be nonnegative, got {alpha}"
        )));
    }
    let mut ev = Evaluator::new(problem, x, eta);
    let trial = ev.value(alpha)?;
    let (_, s) = ev.slope(alpha, &trial)?;
    Ok((trial.df, s))
}

fn initial_slope<M: Manifold>(
    problem: &Problem<M>,
    x: &ManifoldPoint,
    eta: &TangentVector,
) -> Result<f64> {
    let g0 = problem.eval_grad(x)?;
    let d0 = problem.manifold.inner(&g0, eta)?;
    if !(d0 < 0.0) {
        return Err(Error::NotDescent { slope: d0 });
    }
    Ok(d0)
}

fn wolfe_flags<M: Manifold>(
    problem: &Problem<M>,
    x: &ManifoldPoint,
    eta: &TangentVector,
    alpha: f64,
    p: &WolfeParams,
    strong: bool,
) -> Result<(bool, bool)> {
    let d0 = initial_slope(problem, x, eta)?;
    if !(alpha > 0.0) {
        return Err(Error::InvalidOptions(format!(
            "step must be positive, got {alpha}"
        )));
    }
    let (df, s) = phi_change_and_slope(problem, x, eta, alpha)?;
    let armijo = df <= p.c1 * alpha * d0;
    let curvature = if strong {
        s.abs() <= p.c2 * d0.abs()
    } else {
        s >= p.c2 * d0
    };
    Ok((armijo, curvature))
}

/// Evaluates both weak Wolfe conditions at `alpha`, without slack.
pub fn check_weak_wolfe<M: Manifold>(
    problem: &Problem<M>,
    x: &ManifoldPoint,
    eta: &TangentVector,
    alpha: f64,
    p: &WolfeParams,
) -> Result<(bool, bool)> {
    wolfe_flags(problem, x, eta, alpha, p, false)
}

/// Evaluates both strong Wolfe conditions at `alpha`, without slack.
pub fn check_strong_wolfe<M: Manifold>(
    problem: &Problem<M>,
    x: &ManifoldPoint,
    eta: &TangentVector,
    alpha: f64,
    p: &WolfeParams,
) -> Result<(bool, bool)> {
    wolfe_flags(problem, x, eta, alpha, p, true)
}

pub fn find_weak_wolfe_step<M: Manifold>(
    problem: &Problem<M>,
    x: &ManifoldPoint,
    eta: &TangentVector,
    p: &WolfeParams,
) -> Result<LineSearchOutcome> {
    let d0 = initial_slope(problem, x, eta)?;
    weak_wolfe_search(problem, x, eta, d0, p)
}

pub fn find_strong_wolfe_step<M: Manifold>(
    problem: &Problem<M>,
    x: &ManifoldPoint,
    eta: &TangentVector,
    p: &WolfeParams,
) -> Result<LineSearchOutcome> {
    let d0 = initial_slope(problem, x, eta)?;
    strong_wolfe_search(problem, x, eta, d0, p)
}

/// Bracketing bisection for the weak Wolfe conditions, given
/// `φ'(0) = d0 < 0`.
pub(crate) fn weak_wolfe_search<M: Manifold>(
    problem: &Problem<M>,
    x: &ManifoldPoint,
    eta: &TangentVector,
    d0: f64,
    p: &WolfeParams,
) -> Result<LineSearchOutcome> {
    p.validate()?;
    let mut ev = Evaluator::new(problem, x, eta);
    let mut lo = 0.0;
    let mut hi = f64::INFINITY;
    let mut alpha = p.alpha_init.min(p.alpha_max);
    let mut last = LineSearchDiagnostics {
        alpha,
        armijo: false,
        curvature: false,
        iters: 0,
    };
    for it in 1..=p.max_bracket_iters {
        let trial = ev.value(alpha)?;
        last = LineSearchDiagnostics {
            alpha,
            armijo: trial.df <= p.c1 * alpha * d0,
            curvature: false,
            iters: it,
        };
        if !last.armijo {
            hi = alpha;
            alpha = 0.5 * (lo + hi);
            continue;
        }
        let (g, s) = ev.slope(alpha, &trial)?;
        if s >= p.c2 * d0 {
            return ev.finish(alpha, trial, g, s);
        }
        lo = alpha;
        alpha = if hi.is_finite() {
            0.5 * (lo + hi)
        } else {
            (2.0 * alpha).min(p.alpha_max)
        };
        if alpha == lo {
            break;
        }
    }
    Err(Error::LineSearchFailed(last))
}

pub(crate) fn strong_wolfe_search<M: Manifold>(
    problem: &Problem<M>,
    x: &ManifoldPoint,
    eta: &TangentVector,
    d0: f64,
    p: &WolfeParams,
) -> Result<LineSearchOutcome> {
    p.validate()?;
    let mut ev = Evaluator::new(problem, x, eta);
    let armijo = |alpha: f64, df: f64| df <= p.c1 * alpha * d0;
    let curvature = |s: f64| s.abs() <= p.c2 * d0.abs();

    let mut budget = p.max_bracket_iters;
    let mut prev_alpha = 0.0;
    let mut prev_df = 0.0;
    let mut alpha = p.alpha_init.min(p.alpha_max);
    let mut last = LineSearchDiagnostics {
        alpha,
        armijo: false,
        curvature: false,
        iters: 0,
    };

    // Bracketing phase: on exit, [lo, hi] holds a strong Wolfe point and lo
    // satisfies Armijo with the lower value.
    let (mut lo, mut hi, mut df_lo) = loop {
        if budget == 0 {
            return Err(Error::LineSearchFailed(last));
        }
        budget -= 1;
        let trial = ev.value(alpha)?;
        let ok = armijo(alpha, trial.df);
        last = LineSearchDiagnostics {
            alpha,
            armijo: ok,
            curvature: false,
            iters: p.max_bracket_iters - budget,
        };
        let first_trial = prev_alpha == 0.0;
        if !ok || (!first_trial && trial.df >= prev_df) {
            break (prev_alpha, alpha, prev_df);
        }
        let (g, s) = ev.slope(alpha, &trial)?;
        last.curvature = curvature(s);
        if last.curvature {
            return ev.finish(alpha, trial, g, s);
        }
        if s >= 0.0 {
            break (alpha, prev_alpha, trial.df);
        }
        prev_alpha = alpha;
        prev_df = trial.df;
        let next = (2.0 * alpha).min(p.alpha_max);
        if next == alpha {
            return Err(Error::LineSearchFailed(last));
        }
        alpha = next;
    };

    // Zoom by bisection.
    while budget > 0 {
        budget -= 1;
        let alpha = 0.5 * (lo + hi);
        let trial = ev.value(alpha)?;
        let ok = armijo(alpha, trial.df);
        last = LineSearchDiagnostics {
            alpha,
            armijo: ok,
            curvature: false,
            iters: p.max_bracket_iters - budget,
        };
        if !ok || trial.df >= df_lo {
            hi = alpha;
            continue;
        }
        let (g, s) = ev.slope(alpha, &trial)?;
        last.curvature = curvature(s);
        if last.curvature {
            return ev.finish(alpha, trial, g, s);
        }
        if s * (hi - lo) >= 0.0 {
            hi = lo;
        }
        lo = alpha;
        df_lo = trial.df;
    }
    Err(Error::LineSearchFailed(last))
}
