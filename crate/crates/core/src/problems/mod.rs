//! Benchmark objectives with analytic Riemannian gradients and known optima.

mod fd;
mod jacobi;

use std::fmt;
use std::sync::Arc;

use nalgebra::DMatrix;

pub use fd::{fd_gradient, gradient_relative_error, tangent_basis, DEFAULT_FD_STEP};
pub use jacobi::{eig_oracle, Eigen, MAX_SWEEPS};

use crate::error::{Error, Result};
use crate::linalg::{dot2, pair_difference, sym_matvec_accurate, CompensatedSum};
use crate::manifold::{Manifold, ManifoldKind, ManifoldPoint, TangentVector};

/// A smooth function on the ambient space together with its Euclidean
/// gradient. The Riemannian gradient is obtained by tangent projection.
pub trait Objective: fmt::Debug + Send + Sync {
    fn value(&self, x: &DMatrix<f64>) -> f64;
    fn ambient_gradient(&self, x: &DMatrix<f64>) -> DMatrix<f64>;

    /// `f(y) − f(x)`. Implementations resolve differences far below the
    /// rounding unit of `f` itself, which the sufficient-decrease test
    /// needs close to a minimizer.
    fn value_difference(&self, x: &DMatrix<f64>, y: &DMatrix<f64>) -> f64 {
        self.value(y) - self.value(x)
    }
}

/// Dense symmetric matrix.
#[derive(Clone, Debug, PartialEq)]
pub struct SymmetricMatrix(DMatrix<f64>);

impl SymmetricMatrix {
    pub fn new(a: DMatrix<f64>) -> Result<Self> {
        if !a.is_square() {
            return Err(Error::ShapeMismatch {
                expected: (a.nrows(), a.nrows()),
                got: a.shape(),
            });
        }
        let scale = a.norm();
        let asym = (&a - a.transpose()).norm();
        if asym > 1e-12 * scale {
            return Err(Error::AsymmetricInput(if scale > 0.0 {
                asym / scale
            } else {
                asym
            }));
        }
        Ok(Self(a))
    }

    pub fn from_diagonal(d: &[f64]) -> Self {
        Self(DMatrix::from_diagonal(
            &nalgebra::DVector::from_column_slice(d),
        ))
    }

    pub fn entries(&self) -> &DMatrix<f64> {
        &self.0
    }

    pub fn dim(&self) -> usize {
        self.0.nrows()
    }
}

/// An objective on a manifold.
#[derive(Clone, Debug)]
pub struct Problem<M = ManifoldKind> {
    pub manifold: M,
    pub name: String,
    objective: Arc<dyn Objective>,
    /// Known optimal objective value, when one is available.
    pub oracle_value: Option<f64>,
    /// Known minimizer in ambient coordinates, when unique.
    pub oracle_point: Option<DMatrix<f64>>,
}

impl<M: Manifold> Problem<M> {
    pub fn new(
        manifold: M,
        name: impl Into<String>,
        objective: Arc<dyn Objective>,
        oracle_value: Option<f64>,
    ) -> Self {
        Self {
            manifold,
            name: name.into(),
            objective,
            oracle_value,
            oracle_point: None,
        }
    }

    /// The same objective and oracle on another manifold with the same
    /// ambient shape.
    pub fn with_manifold<N: Manifold>(self, manifold: N) -> Result<Problem<N>> {
        let (expected, got) = (self.manifold.ambient_shape(), manifold.ambient_shape());
        if expected != got {
            return Err(Error::ShapeMismatch { expected, got });
        }
        Ok(Problem {
            manifold,
            name: self.name,
            objective: self.objective,
            oracle_value: self.oracle_value,
            oracle_point: self.oracle_point,
        })
    }

    pub fn objective(&self) -> &dyn Objective {
        self.objective.as_ref()
    }

    pub fn eval_f(&self, x: &ManifoldPoint) -> Result<f64> {
        let f = self.objective.value(x.coords());
        if f.is_finite() {
            Ok(f)
        } else {
            Err(Error::NonFiniteValue { what: "objective" })
        }
    }

    /// `f(y) − f(x)` to well below the rounding unit of `f`.
    pub fn eval_df(&self, x: &ManifoldPoint, y: &ManifoldPoint) -> Result<f64> {
        let d = self.objective.value_difference(x.coords(), y.coords());
        if d.is_finite() {
            Ok(d)
        } else {
            Err(Error::NonFiniteValue { what: "objective" })
        }
    }

    pub fn eval_grad(&self, x: &ManifoldPoint) -> Result<TangentVector> {
        let g = self.objective.ambient_gradient(x.coords());
        if g.iter().any(|v| !v.is_finite()) {
            return Err(Error::NonFiniteValue { what: "gradient" });
        }
        Ok(self.manifold.project_tangent(x, &g))
    }
}

/// `xᵀAx` on the unit sphere.
#[derive(Debug)]
pub struct Rayleigh {
    a: DMatrix<f64>,
}

impl Objective for Rayleigh {
    // Evaluated as the quotient xᵀAx / xᵀx, which is the same function on the
    // sphere but insensitive to the last-bit drift of ‖x‖ after retraction.
    fn value(&self, x: &DMatrix<f64>) -> f64 {
        let (hi, lo) = self.pair(x);
        hi + lo
    }

    fn ambient_gradient(&self, x: &DMatrix<f64>) -> DMatrix<f64> {
        let ax = sym_matvec_accurate(&self.a, x.as_slice());
        DMatrix::from_vec(x.nrows(), 1, ax) * 2.0
    }

    fn value_difference(&self, x: &DMatrix<f64>, y: &DMatrix<f64>) -> f64 {
        pair_difference(self.pair(y), self.pair(x))
    }
}

impl Rayleigh {
    fn pair(&self, x: &DMatrix<f64>) -> (f64, f64) {
        let v = x.as_slice();
        let mut q = CompensatedSum::new();
        q.add_sym_form(&self.a, v);
        let mut d = CompensatedSum::new();
        for &t in v {
            d.add_prod(t, t);
        }
        let (qh, ql) = q.parts();
        let (dh, dl) = d.parts();
        let hi = (qh + ql) / (dh + dl);
        let mut rem = CompensatedSum::new();
        rem.add(qh);
        rem.add(ql);
        rem.add_prod(-hi, dh);
        rem.add_prod(-hi, dl);
        (hi, rem.value() / dh)
    }
}

/// `trace(XᵀAX N)` with `N = diag(mu)`.
#[derive(Debug)]
pub struct Brockett {
    a: DMatrix<f64>,
    mu: Vec<f64>,
}

impl Objective for Brockett {
    fn value(&self, x: &DMatrix<f64>) -> f64 {
        let (hi, lo) = self.pair(x);
        hi + lo
    }

    fn value_difference(&self, x: &DMatrix<f64>, y: &DMatrix<f64>) -> f64 {
        pair_difference(self.pair(y), self.pair(x))
    }

    fn ambient_gradient(&self, x: &DMatrix<f64>) -> DMatrix<f64> {
        let mut g = &self.a * x;
        for (j, &w) in self.mu.iter().enumerate() {
            g.column_mut(j).scale_mut(2.0 * w);
        }
        g
    }
}

impl Brockett {
    // Evaluated at the orthonormal polar factor X S, S = (XᵀX)^{-1/2}, to
    // first order in E = XᵀX − I:
    //   f(X S) = Σ_j mu_j (M_jj − (E M)_jj),  M = XᵀAX.
    // This agrees with f on the manifold and does not see the rounding-level
    // loss of orthonormality left by the retraction.
    fn pair(&self, x: &DMatrix<f64>) -> (f64, f64) {
        let p = self.mu.len();
        let m = x.transpose() * (&self.a * x);
        let mut e = DMatrix::zeros(p, p);
        for j in 0..p {
            for k in j..p {
                let mut acc = CompensatedSum::new();
                for (a, b) in x.column(j).iter().zip(x.column(k).iter()) {
                    acc.add_prod(*a, *b);
                }
                if j == k {
                    acc.add(-1.0);
                }
                e[(j, k)] = acc.value();
                e[(k, j)] = e[(j, k)];
            }
        }
        let mut total = CompensatedSum::new();
        let mut corr = 0.0;
        for (j, &w) in self.mu.iter().enumerate() {
            let mut q = CompensatedSum::new();
            q.add_sym_form(&self.a, x.column(j).as_slice());
            total.add_scaled(w, q.parts());
            corr += w * e.row(j).dot(&m.column(j).transpose());
        }
        total.add(-corr);
        total.parts()
    }
}

/// `½ xᵀAx − bᵀx` on `R^n`.
#[derive(Debug)]
pub struct Quadratic {
    a: DMatrix<f64>,
    b: DMatrix<f64>,
}

impl Objective for Quadratic {
    fn value(&self, x: &DMatrix<f64>) -> f64 {
        let (hi, lo) = self.pair(x);
        hi + lo
    }

    fn value_difference(&self, x: &DMatrix<f64>, y: &DMatrix<f64>) -> f64 {
        pair_difference(self.pair(y), self.pair(x))
    }

    fn ambient_gradient(&self, x: &DMatrix<f64>) -> DMatrix<f64> {
        let ax = sym_matvec_accurate(&self.a, x.as_slice());
        DMatrix::from_vec(x.nrows(), 1, ax) - &self.b
    }
}

impl Quadratic {
    fn pair(&self, x: &DMatrix<f64>) -> (f64, f64) {
        let v = x.as_slice();
        let mut q = CompensatedSum::new();
        q.add_sym_form(&self.a, v);
        let mut acc = CompensatedSum::new();
        acc.add_scaled(0.5, q.parts());
        for (&bi, &xi) in self.b.iter().zip(v) {
            acc.add_prod(-bi, xi);
        }
        acc.parts()
    }
}

pub fn rayleigh_problem(a: &SymmetricMatrix) -> Result<Problem> {
    let manifold = ManifoldKind::sphere(a.dim())?;
    let eig = eig_oracle(a)?;
    let objective = Arc::new(Rayleigh {
        a: a.entries().clone(),
    });
    Ok(Problem::new(
        manifold,
        "rayleigh",
        objective,
        Some(eig.values[0]),
    ))
}

/// Minimum of `Σ_j mu_j λ_{σ(j)}` over injective assignments of eigenvalues
/// to weights: the largest weight takes the smallest eigenvalue.
pub fn brockett_optimum(eigenvalues_ascending: &[f64], mu: &[f64]) -> f64 {
    let terms: Vec<f64> = mu.iter().rev().copied().collect();
    dot2(&terms, &eigenvalues_ascending[..mu.len()])
}

pub fn brockett_problem(a: &SymmetricMatrix, mu: &[f64]) -> Result<Problem> {
    let ok = !mu.is_empty()
        && mu[0] > 0.0
        && mu.iter().all(|v| v.is_finite())
        && mu.windows(2).all(|w| w[0] < w[1]);
    if !ok {
        return Err(Error::BadWeights);
    }
    let manifold = ManifoldKind::stiefel(a.dim(), mu.len())?;
    let eig = eig_oracle(a)?;
    let oracle = brockett_optimum(&eig.values, mu);
    let objective = Arc::new(Brockett {
        a: a.entries().clone(),
        mu: mu.to_vec(),
    });
    Ok(Problem::new(manifold, "brockett", objective, Some(oracle)))
}

pub fn quadratic_problem(a: &SymmetricMatrix, b: &[f64]) -> Result<Problem> {
    let n = a.dim();
    if b.len() != n {
        return Err(Error::ShapeMismatch {
            expected: (n, 1),
            got: (b.len(), 1),
        });
    }
    let eig = eig_oracle(a)?;
    if eig.values[0] <= 0.0 {
        return Err(Error::NotPositiveDefinite(eig.values[0]));
    }
    // x* = V Λ⁻¹ Vᵀ b from the oracle decomposition.
    let bv = DMatrix::from_column_slice(n, 1, b);
    let mut coeffs = eig.vectors.transpose() * &bv;
    for (i, l) in eig.values.iter().enumerate() {
        coeffs[i] /= l;
    }
    let x_star = &eig.vectors * coeffs;
    let objective = Arc::new(Quadratic {
        a: a.entries().clone(),
        b: bv,
    });
    let value = objective.value(&x_star);
    let mut problem = Problem::new(
        ManifoldKind::euclidean(n)?,
        "quadratic",
        objective,
        Some(value),
    );
    problem.oracle_point = Some(x_star);
    Ok(problem)
}
