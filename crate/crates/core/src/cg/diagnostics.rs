//! After-the-fact checks of the algebraic identities behind the coefficient.

use super::{IterateRecord, StepContext};
use crate::error::Result;
use crate::manifold::Manifold;
use crate::problems::Problem;
use crate::transport::{capping_factor, transport_r};

/// Largest `|⟨g_{k+1}, η_{k+1}⟩ − β_{k+1}⟨g_k, η_k⟩| / (1 + |⟨g_{k+1}, η_{k+1}⟩|)`
/// over a Dai-Yuan trace. Zero for traces with fewer than two records.
pub fn check_ratio_identity(trace: &[IterateRecord]) -> f64 {
    trace
        .windows(2)
        .map(|w| {
            let lhs = w[1].dir_deriv;
            (lhs - w[1].beta * w[0].dir_deriv).abs() / (1.0 + lhs.abs())
        })
        .fold(0.0, f64::max)
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum NewBetaCheck {
    /// Relative difference between the two coefficient formulas.
    Checked(f64),
    /// `⟨T g_k, T η_k⟩` is too close to zero for the alternate formula.
    Skipped,
}

impl NewBetaCheck {
    pub fn error(self) -> Option<f64> {
        match self {
            NewBetaCheck::Checked(e) => Some(e),
            NewBetaCheck::Skipped => None,
        }
    }
}

/// Recomputes `β_{k+1}` as `‖g_{k+1}‖² / ⟨Tη_k, y̌_{k+1}⟩` with
/// `y̌_{k+1} = g_{k+1} − ⟨g_k, η_k⟩ / ⟨T g_k, T η_k⟩ · T g_k`,
/// where `T = c_k T^R_{α_k η_k}`, and compares it with the coefficient the
/// solver used at this step.
pub fn check_newbeta_identity<M: Manifold>(
    problem: &Problem<M>,
    step: &StepContext,
) -> Result<NewBetaCheck> {
    let m = &problem.manifold;
    let x = &step.x;
    let eta = &step.eta;
    let g = problem.eval_grad(x)?;
    let g_dot_eta = m.inner(&g, eta)?;

    let scaled_step = eta.scale(step.alpha);
    let x_next = m.retract(x, &scaled_step)?;
    let g_next = problem.eval_grad(&x_next)?;

    let t_r_eta = transport_r(m, x, &scaled_step, eta)?;
    let (c, _) = capping_factor(m.norm(eta), m.norm(&t_r_eta));
    let t_eta = t_r_eta.scale(c);
    let t_g = transport_r(m, x, &scaled_step, &g)?.scale(c);

    let cross = m.inner(&t_g, &t_eta)?;
    if cross.abs() <= 1e-12 * m.norm(&t_g) * m.norm(&t_eta) {
        return Ok(NewBetaCheck::Skipped);
    }
    let y_check = g_next.lincomb(1.0, -g_dot_eta / cross, &t_g)?;
    let beta_new = m.inner(&g_next, &g_next)? / m.inner(&t_eta, &y_check)?;
    let reference = step.beta_next;
    let err = if reference == beta_new {
        0.0
    } else {
        (beta_new - reference).abs() / reference.abs().max(beta_new.abs())
    };
    Ok(NewBetaCheck::Checked(err))
}
