//! Finite-difference gradients along retraction curves.

use nalgebra::DMatrix;

use super::Problem;
use crate::error::{Error, Result};
use crate::manifold::{Manifold, ManifoldPoint, TangentVector};

pub const DEFAULT_FD_STEP: f64 = 1e-6;

/// Orthonormal basis of `T_xM`, built by projecting the ambient unit
/// matrices and running two passes of modified Gram-Schmidt.
pub fn tangent_basis<M: Manifold + ?Sized>(m: &M, x: &ManifoldPoint) -> Result<Vec<DMatrix<f64>>> {
    let (rows, cols) = m.ambient_shape();
    let expected = m.dimension();
    let mut basis: Vec<DMatrix<f64>> = Vec::with_capacity(expected);
    for idx in 0..rows * cols {
        let mut e = DMatrix::zeros(rows, cols);
        e[idx] = 1.0;
        let mut v = m.project_coords(x.coords(), &e);
        for _ in 0..2 {
            for b in &basis {
                let c = b.dot(&v);
                v -= b * c;
            }
        }
        let nrm = v.norm();
        if nrm > 1e-8 {
            basis.push(v / nrm);
        }
        if basis.len() == expected {
            break;
        }
    }
    if basis.len() != expected {
        return Err(Error::DegenerateBasis {
            found: basis.len(),
            expected,
        });
    }
    Ok(basis)
}

/// Central differences of `t ↦ f(R_x(t ξᵢ))` over an orthonormal tangent
/// basis, assembled into a tangent vector.
pub fn fd_gradient<M: Manifold>(
    problem: &Problem<M>,
    x: &ManifoldPoint,
    h: f64,
) -> Result<TangentVector> {
    if !(h > 0.0) {
        return Err(Error::InvalidOptions(format!(
            "finite-difference step must be positive, got {h}"
        )));
    }
    let m = &problem.manifold;
    let basis = tangent_basis(m, x)?;
    let mut grad = DMatrix::zeros(x.shape().0, x.shape().1);
    for b in &basis {
        let fwd = ManifoldPoint::from_coords_unchecked(m.retract_coords(x.coords(), &(b * h)));
        let bwd = ManifoldPoint::from_coords_unchecked(m.retract_coords(x.coords(), &(b * -h)));
        let d = (problem.eval_f(&fwd)? - problem.eval_f(&bwd)?) / (2.0 * h);
        grad += b * d;
    }
    Ok(TangentVector::from_coords_unchecked(x.clone(), grad))
}

/// `‖a − b‖ / max(‖a‖, ‖b‖)`, zero when both vanish.
pub fn gradient_relative_error(a: &DMatrix<f64>, b: &DMatrix<f64>) -> f64 {
    let scale = a.norm().max(b.norm());
    if scale == 0.0 {
        0.0
    } else {
        (a - b).norm() / scale
    }
}
