//! Riemannian conjugate gradient solvers.
//!
//! [`solve`] runs the scaled Dai-Yuan method and its relatives:
//!
//! ```text
//! η₀ = −g₀
//! αₖ  : weak Wolfe step along R_{xₖ}(α ηₖ)          (strong Wolfe for FR)
//! xₖ₊₁ = R_{xₖ}(αₖ ηₖ)
//! Tηₖ = cₖ T^R_{αₖηₖ}(ηₖ),  cₖ = min{1, ‖ηₖ‖ / ‖T^R_{αₖηₖ}(ηₖ)‖}
//! βₖ₊₁ = ‖gₖ₊₁‖² / (⟨gₖ₊₁, Tηₖ⟩ − ⟨gₖ, ηₖ⟩)
//! ηₖ₊₁ = −gₖ₊₁ + βₖ₊₁ Tηₖ
//! ```
//!
//! Every iteration is recorded in an [`IterateRecord`]. With
//! `check_invariants` set, the solve aborts with
//! [`Error::InvariantViolation`] as soon as a provable property fails
//! while the gradient is still above tolerance.

mod beta;
mod diagnostics;
mod reference;

use std::fmt;
use std::str::FromStr;

pub use beta::{beta_bar_variant, beta_dy_riemannian, beta_fr_scaled, direction_update, EPS_DEN};
pub use diagnostics::{check_newbeta_identity, check_ratio_identity, NewBetaCheck};
pub use reference::solve_euclidean_dy_reference;

use crate::error::{Error, LineSearchDiagnostics, Result};
use crate::linesearch::{
    check_strong_wolfe, check_weak_wolfe, strong_wolfe_search, weak_wolfe_search, WolfeParams,
};
use crate::manifold::{Manifold, ManifoldPoint, TangentVector};
use crate::problems::Problem;
use crate::transport::{capping_factor, transport_r};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Method {
    /// Dai-Yuan-type coefficient with the capped transport.
    ScaledDY,
    /// Same iteration with the scaling factor folded into the coefficient.
    ScaledDYBarBeta,
    /// Fletcher-Reeves coefficient, capped transport, strong Wolfe steps.
    FletcherReevesScaled,
    SteepestDescent,
    /// Classical Euclidean Dai-Yuan CG; only valid on Euclidean space.
    EuclideanDYReference,
}

impl Method {
    pub const ALL: [Method; 5] = [
        Method::ScaledDY,
        Method::ScaledDYBarBeta,
        Method::FletcherReevesScaled,
        Method::SteepestDescent,
        Method::EuclideanDYReference,
    ];

    pub fn tag(self) -> &'static str {
        match self {
            Method::ScaledDY => "scaled_dy",
            Method::ScaledDYBarBeta => "scaled_dy_bar",
            Method::FletcherReevesScaled => "fr_scaled",
            Method::SteepestDescent => "steepest_descent",
            Method::EuclideanDYReference => "euclidean_dy_reference",
        }
    }

    pub fn uses_strong_wolfe(self) -> bool {
        self == Method::FletcherReevesScaled
    }
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.tag())
    }
}

impl FromStr for Method {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Method::ALL
            .into_iter()
            .find(|m| m.tag() == s)
            .ok_or_else(|| {
                let known: Vec<_> = Method::ALL.iter().map(|m| m.tag()).collect();
                Error::InvalidOptions(format!(
                    "unknown method `{s}` (expected one of {})",
                    known.join(", ")
                ))
            })
    }
}

/// Trial step that opens the line search at iteration `k > 0`.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum WarmStart {
    /// `α_{k-1}`.
    PreviousStep,
    /// `α_{k-1} ⟨g_{k-1}, η_{k-1}⟩ / ⟨g_k, η_k⟩`, so that the first-order
    /// change predicted by the trial matches the previous step.
    SlopeRatio,
    /// `1.01 · 2 (f_k − f_{k-1}) / ⟨g_k, η_k⟩`, the minimizer of the
    /// quadratic through `f_k` with slope `⟨g_k, η_k⟩` that repeats the last
    /// decrease.
    #[default]
    Interpolated,
}

impl WarmStart {
    /// Next `alpha_init`, capped at `alpha_max`. Falls back to `alpha` when
    /// the rule gives no positive finite step.
    pub fn next(self, alpha: f64, f_change: f64, dd_prev: f64, dd: f64, alpha_max: f64) -> f64 {
        let a = match self {
            WarmStart::PreviousStep => alpha,
            WarmStart::SlopeRatio => alpha * (dd_prev / dd),
            WarmStart::Interpolated => 1.01 * (2.0 * f_change / dd),
        };
        let a = if a.is_finite() && a > 0.0 { a } else { alpha };
        a.min(alpha_max)
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct SolveOptions {
    pub method: Method,
    pub wolfe: WolfeParams,
    pub grad_tol: f64,
    pub max_iters: usize,
    pub check_invariants: bool,
    pub record_zoutendijk: bool,
    /// Keep the per-step context needed by [`check_newbeta_identity`].
    pub keep_steps: bool,
    pub warm_start: WarmStart,
}

impl SolveOptions {
    pub fn new(method: Method) -> Self {
        let wolfe = if method.uses_strong_wolfe() {
            WolfeParams::strong_default()
        } else {
            WolfeParams::default()
        };
        Self {
            method,
            wolfe,
            grad_tol: 1e-8,
            max_iters: 5000,
            check_invariants: true,
            record_zoutendijk: true,
            keep_steps: false,
            warm_start: WarmStart::default(),
        }
    }

    pub fn validate(&self) -> Result<()> {
        self.wolfe.validate()?;
        if !(self.grad_tol > 0.0) {
            return Err(Error::InvalidOptions(format!(
                "grad_tol must be positive, got {}",
                self.grad_tol
            )));
        }
        if self.max_iters == 0 {
            return Err(Error::InvalidOptions("max_iters must be positive".into()));
        }
        Ok(())
    }
}

impl Default for SolveOptions {
    fn default() -> Self {
        Self::new(Method::ScaledDY)
    }
}

/// State at iterate `k` and the step that produced it.
///
/// Fields describing the step into `x_k` (`alpha`, `beta`, `c`,
/// `used_scaling`, the Wolfe flags, `ordering_ok`, `transport_norm`) hold
/// neutral values at `k = 0`.
#[derive(Clone, Debug, PartialEq)]
pub struct IterateRecord {
    pub k: usize,
    pub f: f64,
    /// `f_k − f_{k-1}`, resolved below the rounding unit of `f`.
    pub f_change: f64,
    pub grad_norm: f64,
    /// `α_{k-1}`.
    pub alpha: f64,
    /// `β_k`.
    pub beta: f64,
    /// `c_{k-1}`.
    pub c: f64,
    pub used_scaling: bool,
    /// `⟨g_k, η_k⟩`.
    pub dir_deriv: f64,
    pub armijo_ok: bool,
    pub curvature_ok: bool,
    /// `⟨g_k, η_k⟩ < 0`.
    pub descent_ok: bool,
    /// `⟨g_{k-1}, η_{k-1}⟩ < ⟨g_k, T⁽ᵏ⁻¹⁾η_{k-1}⟩`.
    pub ordering_ok: bool,
    pub beta_positive_ok: bool,
    /// `Σ_{i ≤ k} cos²θᵢ ‖gᵢ‖²`.
    pub zoutendijk_partial: f64,
    /// `‖η_k‖`.
    pub eta_norm: f64,
    /// `‖T⁽ᵏ⁻¹⁾η_{k-1}‖`.
    pub transport_norm: f64,
}

impl IterateRecord {
    /// `cos²θ_k ‖g_k‖² = ⟨g_k, η_k⟩² / ‖η_k‖²`.
    pub fn zoutendijk_increment(&self) -> f64 {
        if self.eta_norm > 0.0 {
            (self.dir_deriv / self.eta_norm).powi(2)
        } else {
            0.0
        }
    }

    fn violations(&self) -> Vec<&'static str> {
        let mut v = Vec::new();
        if !self.armijo_ok {
            v.push("Armijo condition");
        }
        if !self.curvature_ok {
            v.push("curvature condition");
        }
        if !self.descent_ok {
            v.push("descent <g_k, eta_k> < 0");
        }
        if !self.ordering_ok {
            v.push("ordering <g_k, eta_k> < <g_k+1, T eta_k>");
        }
        if !self.beta_positive_ok {
            v.push("beta_k > 0");
        }
        v
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Termination {
    GradTol,
    MaxIters,
    LineSearchFailed,
    ZeroGradient,
}

/// Inputs of one step, kept for after-the-fact identity checks.
#[derive(Clone, Debug)]
pub struct StepContext {
    pub x: ManifoldPoint,
    pub eta: TangentVector,
    pub alpha: f64,
    /// `β_{k+1}` as computed by the solver.
    pub beta_next: f64,
}

#[derive(Clone, Debug)]
pub struct SolveResult {
    pub x_final: ManifoldPoint,
    pub f_final: f64,
    pub grad_norm_final: f64,
    pub iters: usize,
    pub converged: bool,
    pub trace: Vec<IterateRecord>,
    pub termination: Termination,
    pub f_evals: usize,
    pub grad_evals: usize,
    pub steps: Vec<StepContext>,
    /// Diagnostics of the failed search when `termination` is `LineSearchFailed`.
    pub line_search_failure: Option<LineSearchDiagnostics>,
}

impl SolveResult {
    pub fn oracle_gap(&self, oracle: Option<f64>) -> Option<f64> {
        oracle.map(|v| (self.f_final - v).abs())
    }
}

pub(crate) fn check_record(opts: &SolveOptions, rec: &IterateRecord) -> Result<()> {
    if !opts.check_invariants || rec.grad_norm <= opts.grad_tol {
        return Ok(());
    }
    let v = rec.violations();
    if v.is_empty() {
        Ok(())
    } else {
        Err(Error::InvariantViolation {
            reason: v.join(", "),
            record: Box::new(rec.clone()),
        })
    }
}

pub fn solve<M: Manifold>(
    problem: &Problem<M>,
    x0: &ManifoldPoint,
    opts: &SolveOptions,
) -> Result<SolveResult> {
    opts.validate()?;
    if opts.method == Method::EuclideanDYReference {
        return solve_euclidean_dy_reference(problem, x0, opts);
    }
    let m = &problem.manifold;
    let x0 = m.point(x0.coords().clone())?;

    let strong = opts.method.uses_strong_wolfe();
    let mut wolfe = opts.wolfe;

    let mut x = x0;
    let mut f = problem.eval_f(&x)?;
    let g = problem.eval_grad(&x)?;
    let mut f_evals = 1;
    let mut grad_evals = 1;
    let mut g_norm = m.norm(&g);
    let mut eta = g.scale(-1.0);
    let mut dd = m.inner(&g, &eta)?;
    let mut eta_norm = m.norm(&eta);

    let mut rec = IterateRecord {
        k: 0,
        f,
        f_change: 0.0,
        grad_norm: g_norm,
        alpha: 0.0,
        beta: 0.0,
        c: 1.0,
        used_scaling: false,
        dir_deriv: dd,
        armijo_ok: true,
        curvature_ok: true,
        descent_ok: dd < 0.0,
        ordering_ok: true,
        beta_positive_ok: true,
        zoutendijk_partial: 0.0,
        eta_norm,
        transport_norm: 0.0,
    };
    if opts.record_zoutendijk {
        rec.zoutendijk_partial = rec.zoutendijk_increment();
    }
    check_record(opts, &rec)?;
    let mut trace = vec![rec];
    let mut steps = Vec::new();
    let mut line_search_failure = None;

    let termination = 'outer: {
        if g_norm == 0.0 {
            break 'outer Termination::ZeroGradient;
        }
        if g_norm <= opts.grad_tol {
            break 'outer Termination::GradTol;
        }
        for k in 0..opts.max_iters {
            let search = if strong {
                strong_wolfe_search(problem, &x, &eta, dd, &wolfe)
            } else {
                weak_wolfe_search(problem, &x, &eta, dd, &wolfe)
            };
            let ls = match search {
                Ok(ls) => ls,
                Err(Error::LineSearchFailed(d)) => {
                    line_search_failure = Some(d);
                    break 'outer Termination::LineSearchFailed;
                }
                Err(e) => return Err(e),
            };
            f_evals += ls.evals;
            grad_evals += ls.grad_evals;
            let alpha = ls.alpha;

            let (armijo_ok, curvature_ok) = if opts.check_invariants {
                if strong {
                    check_strong_wolfe(problem, &x, &eta, alpha, &wolfe)?
                } else {
                    check_weak_wolfe(problem, &x, &eta, alpha, &wolfe)?
                }
            } else {
                (true, true)
            };

            let x_next = ls.point;
            let g_next = ls.gradient;
            let f_next = ls.f_new;
            let g_next_norm = m.norm(&g_next);

            let step = eta.scale(alpha);
            let t_r = transport_r(m, &x, &step, &eta)?;
            let (c, used_scaling) = capping_factor(eta_norm, m.norm(&t_r));
            let t_eta = if used_scaling {
                t_r.scale(c)
            } else {
                t_r.clone()
            };
            let g_dot_t = m.inner(&g_next, &t_eta)?;
            let ordering_ok = dd < g_dot_t;
            let near_converged = g_next_norm <= opts.grad_tol;

            let beta = match opts.method {
                Method::ScaledDY => beta_dy_riemannian(m, &g_next, &t_eta, dd),
                Method::ScaledDYBarBeta => beta_bar_variant(m, &g_next, &t_r, c, dd),
                Method::FletcherReevesScaled => beta_fr_scaled(m, &g_next, g_norm),
                Method::SteepestDescent => Ok(0.0),
                Method::EuclideanDYReference => unreachable!(),
            };
            let (beta, beta_failed) = match beta {
                Ok(b) => (b, None),
                Err(e @ Error::DegenerateDenominator { .. }) => (0.0, Some(e)),
                Err(e) => return Err(e),
            };
            let eta_next = match opts.method {
                Method::ScaledDYBarBeta => direction_update(&g_next, beta, &t_r)?,
                Method::SteepestDescent => g_next.scale(-1.0),
                _ => direction_update(&g_next, beta, &t_eta)?,
            };
            let dd_next = m.inner(&g_next, &eta_next)?;
            let eta_next_norm = m.norm(&eta_next);

            let prev_z = trace.last().map_or(0.0, |r| r.zoutendijk_partial);
            let mut rec = IterateRecord {
                k: k + 1,
                f: f_next,
                f_change: ls.f_change,
                grad_norm: g_next_norm,
                alpha,
                beta,
                c,
                used_scaling,
                dir_deriv: dd_next,
                armijo_ok,
                curvature_ok,
                descent_ok: dd_next < 0.0,
                ordering_ok,
                beta_positive_ok: opts.method == Method::SteepestDescent || beta > 0.0,
                zoutendijk_partial: prev_z,
                eta_norm: eta_next_norm,
                transport_norm: m.norm(&t_eta),
            };
            if opts.record_zoutendijk {
                rec.zoutendijk_partial = prev_z + rec.zoutendijk_increment();
            }
            check_record(opts, &rec)?;
            if let Some(e) = beta_failed {
                if !near_converged {
                    return Err(e);
                }
            }
            trace.push(rec);
            if opts.keep_steps {
                steps.push(StepContext {
                    x: x.clone(),
                    eta: eta.clone(),
                    alpha,
                    beta_next: beta,
                });
            }

            wolfe.alpha_init =
                opts.warm_start
                    .next(alpha, ls.f_change, dd, dd_next, wolfe.alpha_max);
            x = x_next;
            f = f_next;
            g_norm = g_next_norm;
            eta = eta_next;
            dd = dd_next;
            eta_norm = eta_next_norm;

            if g_norm == 0.0 {
                break 'outer Termination::ZeroGradient;
            }
            if near_converged {
                break 'outer Termination::GradTol;
            }
        }
        Termination::MaxIters
    };

    Ok(SolveResult {
        x_final: x,
        f_final: f,
        grad_norm_final: g_norm,
        iters: trace.len() - 1,
        converged: matches!(
            termination,
            Termination::GradTol | Termination::ZeroGradient
        ),
        trace,
        termination,
        f_evals,
        grad_evals,
        steps,
        line_search_failure,
    })
}
