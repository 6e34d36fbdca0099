//! Textbook Euclidean Dai-Yuan CG, written directly on coordinate vectors.
//!
//! This path shares no transport, retraction or coefficient code with the
//! Riemannian solver and serves as its oracle on `R^n`.

use nalgebra::DMatrix;

use super::{
    check_record, IterateRecord, Method, SolveOptions, SolveResult, StepContext, Termination,
    WarmStart,
};
use crate::error::{Error, LineSearchDiagnostics, Result};
use crate::linesearch::WolfeParams;
use crate::manifold::{Manifold, ManifoldPoint, TangentVector};
use crate::problems::Problem;

struct Accepted {
    alpha: f64,
    x: DMatrix<f64>,
    f: f64,
    df: f64,
    g: DMatrix<f64>,
    evals: usize,
    grad_evals: usize,
}

fn finite(v: f64, what: &'static str) -> Result<f64> {
    if v.is_finite() {
        Ok(v)
    } else {
        Err(Error::NonFiniteValue { what })
    }
}

/// Weak Wolfe bracketing bisection on `α ↦ f(x + αd)`.
fn bisection<M: Manifold>(
    problem: &Problem<M>,
    x: &DMatrix<f64>,
    d: &DMatrix<f64>,
    slope0: f64,
    p: &WolfeParams,
) -> std::result::Result<Accepted, Result<LineSearchDiagnostics>> {
    let obj = problem.objective();
    let (mut lo, mut hi) = (0.0, f64::INFINITY);
    let mut alpha = p.alpha_init.min(p.alpha_max);
    let (mut evals, mut grad_evals) = (0, 0);
    let mut last = LineSearchDiagnostics {
        alpha,
        armijo: false,
        curvature: false,
        iters: 0,
    };
    for it in 1..=p.max_bracket_iters {
        let xt = x + d * alpha;
        let dft = finite(obj.value_difference(x, &xt), "objective").map_err(Err)?;
        evals += 1;
        last = LineSearchDiagnostics {
            alpha,
            armijo: dft <= p.c1 * alpha * slope0,
            curvature: false,
            iters: it,
        };
        if !last.armijo {
            hi = alpha;
            alpha = 0.5 * (lo + hi);
            continue;
        }
        let gt = obj.ambient_gradient(&xt);
        grad_evals += 1;
        let st = finite(gt.dot(d), "slope").map_err(Err)?;
        if st >= p.c2 * slope0 {
            let ft = finite(obj.value(&xt), "objective").map_err(Err)?;
            return Ok(Accepted {
                alpha,
                x: xt,
                f: ft,
                df: dft,
                g: gt,
                evals,
                grad_evals,
            });
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
    Err(Ok(last))
}

/// Euclidean CG with `β = ‖g₊‖² / (dᵀ(g₊ − g))` and weak Wolfe steps.
pub fn solve_euclidean_dy_reference<M: Manifold>(
    problem: &Problem<M>,
    x0: &ManifoldPoint,
    opts: &SolveOptions,
) -> Result<SolveResult> {
    opts.validate()?;
    if !problem.manifold.is_euclidean() {
        return Err(Error::InvalidOptions(format!(
            "{} is only defined on Euclidean space",
            Method::EuclideanDYReference
        )));
    }
    problem.manifold.check_shape(x0.coords())?;
    let obj = problem.objective();
    let mut wolfe = opts.wolfe;

    let mut x = x0.coords().clone();
    let mut f = finite(obj.value(&x), "objective")?;
    let g = obj.ambient_gradient(&x);
    let mut g_norm = g.norm();
    let mut d = -&g;
    let mut slope = g.dot(&d);
    let (mut f_evals, mut grad_evals) = (1, 1);

    let mut z = if opts.record_zoutendijk && d.norm() > 0.0 {
        (slope / d.norm()).powi(2)
    } else {
        0.0
    };
    let first = IterateRecord {
        k: 0,
        f,
        f_change: 0.0,
        grad_norm: g_norm,
        alpha: 0.0,
        beta: 0.0,
        c: 1.0,
        used_scaling: false,
        dir_deriv: slope,
        armijo_ok: true,
        curvature_ok: true,
        descent_ok: slope < 0.0,
        ordering_ok: true,
        beta_positive_ok: true,
        zoutendijk_partial: z,
        eta_norm: d.norm(),
        transport_norm: 0.0,
    };
    check_record(opts, &first)?;
    let mut trace = vec![first];
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
            let acc = match bisection(problem, &x, &d, slope, &wolfe) {
                Ok(a) => a,
                Err(Ok(diag)) => {
                    line_search_failure = Some(diag);
                    break 'outer Termination::LineSearchFailed;
                }
                Err(Err(e)) => return Err(e),
            };
            f_evals += acc.evals;
            grad_evals += acc.grad_evals;

            // dᵀ(g₊ − g), expanded as dᵀg₊ − dᵀg
            let den = acc.g.dot(&d) - slope;
            let g_next_norm = acc.g.norm();
            let near_converged = g_next_norm <= opts.grad_tol;
            let beta = if den > super::EPS_DEN {
                acc.g.dot(&acc.g) / den
            } else if near_converged || opts.check_invariants {
                // with checks on, the zero is flagged by the record check below
                0.0
            } else {
                return Err(Error::DegenerateDenominator {
                    formula: "Euclidean Dai-Yuan",
                    value: den,
                });
            };
            let d_next = &d * beta - &acc.g;
            let slope_next = acc.g.dot(&d_next);
            let d_next_norm = d_next.norm();
            if opts.record_zoutendijk && d_next_norm > 0.0 {
                z += (slope_next / d_next_norm).powi(2);
            }
            let rec = IterateRecord {
                k: k + 1,
                f: acc.f,
                f_change: acc.df,
                grad_norm: g_next_norm,
                alpha: acc.alpha,
                beta,
                c: 1.0,
                used_scaling: false,
                dir_deriv: slope_next,
                armijo_ok: true,
                curvature_ok: true,
                descent_ok: slope_next < 0.0,
                ordering_ok: slope < acc.g.dot(&d),
                beta_positive_ok: beta > 0.0,
                zoutendijk_partial: z,
                eta_norm: d_next_norm,
                transport_norm: d.norm(),
            };
            check_record(opts, &rec)?;
            trace.push(rec);
            if opts.keep_steps {
                let foot = ManifoldPoint::from_coords_unchecked(x.clone());
                steps.push(StepContext {
                    eta: TangentVector::from_coords_unchecked(foot.clone(), d.clone()),
                    x: foot,
                    alpha: acc.alpha,
                    beta_next: beta,
                });
            }

            let trial = match opts.warm_start {
                WarmStart::PreviousStep => acc.alpha,
                WarmStart::SlopeRatio => acc.alpha * (slope / slope_next),
                WarmStart::Interpolated => 1.01 * (2.0 * acc.df / slope_next),
            };
            wolfe.alpha_init = if trial.is_finite() && trial > 0.0 {
                trial
            } else {
                acc.alpha
            }
            .min(wolfe.alpha_max);
            x = acc.x;
            f = acc.f;
            g_norm = g_next_norm;
            d = d_next;
            slope = slope_next;

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
        x_final: ManifoldPoint::from_coords_unchecked(x),
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
