//! Vector transports built on the differentiated retraction.
//!
//! * `T^R_η(ξ) = D R_x(η)[ξ]`
//! * `T⁰_η(ξ) = ‖ξ‖ / ‖T^R_η(ξ)‖ · T^R_η(ξ)`, which preserves norms
//! * the capped transport used by the solver, `c · T^R_η(ξ)` with
//!   `c = min{1, ‖ξ‖ / ‖T^R_η(ξ)‖}`, which never expands.

use crate::error::{Error, Result};
use crate::manifold::{Manifold, ManifoldPoint, TangentVector};

/// Below this norm a transported nonzero vector counts as collapsed.
pub const DEGENERATE_NORM: f64 = 1e-300;

#[derive(Clone, Debug, PartialEq)]
pub struct TransportResult {
    pub vector: TangentVector,
    /// Scaling factor in `(0, 1]`.
    pub c: f64,
    pub used_scaling: bool,
}

/// Differentiated-retraction transport. The foot of the result is `R_x(η)`.
pub fn transport_r<M: Manifold + ?Sized>(
    m: &M,
    x: &ManifoldPoint,
    eta: &TangentVector,
    xi: &TangentVector,
) -> Result<TangentVector> {
    m.dretract(x, eta, xi)
}

/// Norm-preserving rescaling of [`transport_r`]. Zero maps to zero.
pub fn transport_scaled<M: Manifold + ?Sized>(
    m: &M,
    x: &ManifoldPoint,
    eta: &TangentVector,
    xi: &TangentVector,
) -> Result<TangentVector> {
    let t = transport_r(m, x, eta, xi)?;
    let xi_norm = m.norm(xi);
    if xi_norm == 0.0 {
        return Ok(TangentVector::zero(t.foot()));
    }
    let t_norm = m.norm(&t);
    if t_norm <= DEGENERATE_NORM {
        return Err(Error::DegenerateTransport { norm: t_norm });
    }
    Ok(t.scale(xi_norm / t_norm))
}

/// Scaling factor `min{1, ‖ξ‖/‖T^R ξ‖}` and whether the cap was active.
/// A tie takes the unscaled branch.
pub fn capping_factor(xi_norm: f64, transported_norm: f64) -> (f64, bool) {
    if transported_norm <= xi_norm {
        (1.0, false)
    } else {
        (xi_norm / transported_norm, true)
    }
}

/// The solver's transport: `T^R` when it does not expand `ξ`, `T⁰` otherwise.
pub fn transport_selected<M: Manifold + ?Sized>(
    m: &M,
    x: &ManifoldPoint,
    eta: &TangentVector,
    xi: &TangentVector,
) -> Result<TransportResult> {
    let t = transport_r(m, x, eta, xi)?;
    let (c, used_scaling) = capping_factor(m.norm(xi), m.norm(&t));
    let vector = if used_scaling { t.scale(c) } else { t };
    Ok(TransportResult {
        vector,
        c,
        used_scaling,
    })
}
