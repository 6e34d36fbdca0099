//! Conjugate-gradient coefficients and the direction update.

use crate::error::{Error, Result};
use crate::manifold::{Manifold, TangentVector};

/// Denominators at or below this are treated as a numerical breakdown.
pub const EPS_DEN: f64 = 1e-300;

/// Dai-Yuan-type coefficient
/// `‖g₊‖² / (⟨g₊, T⁽ᵏ⁾η⟩ − ⟨g, η⟩)`, where `t_eta` is the capped transport
/// of the previous direction and `g_dot_eta = ⟨g, η⟩` at the previous point.
pub fn beta_dy_riemannian<M: Manifold + ?Sized>(
    m: &M,
    g_next: &TangentVector,
    t_eta: &TangentVector,
    g_dot_eta: f64,
) -> Result<f64> {
    let num = m.inner(g_next, g_next)?;
    let den = m.inner(g_next, t_eta)? - g_dot_eta;
    if !(den > EPS_DEN) {
        return Err(Error::DegenerateDenominator {
            formula: "Dai-Yuan",
            value: den,
        });
    }
    Ok(num / den)
}

/// `−g₊ + β t_eta`.
pub fn direction_update(
    g_next: &TangentVector,
    beta: f64,
    t_eta: &TangentVector,
) -> Result<TangentVector> {
    g_next.lincomb(-1.0, beta, t_eta)
}

/// The same coefficient with the scaling factor folded in:
/// `c‖g₊‖² / (c⟨g₊, T^R η⟩ − ⟨g, η⟩)`, to be paired with the *unscaled*
/// transported direction `t_r_eta`.
pub fn beta_bar_variant<M: Manifold + ?Sized>(
    m: &M,
    g_next: &TangentVector,
    t_r_eta: &TangentVector,
    c: f64,
    g_dot_eta: f64,
) -> Result<f64> {
    let num = c * m.inner(g_next, g_next)?;
    let den = c * m.inner(g_next, t_r_eta)? - g_dot_eta;
    if !(den > EPS_DEN) {
        return Err(Error::DegenerateDenominator {
            formula: "scaled Dai-Yuan",
            value: den,
        });
    }
    Ok(num / den)
}

/// Fletcher-Reeves ratio `‖g₊‖² / ‖g‖²`.
pub fn beta_fr_scaled<M: Manifold + ?Sized>(
    m: &M,
    g_next: &TangentVector,
    g_norm_prev: f64,
) -> Result<f64> {
    if !(g_norm_prev > EPS_DEN) {
        return Err(Error::DegenerateDenominator {
            formula: "Fletcher-Reeves",
            value: g_norm_prev,
        });
    }
    let r = m.norm(g_next) / g_norm_prev;
    Ok(r * r)
}
