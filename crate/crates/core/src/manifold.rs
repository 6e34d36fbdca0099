//! Manifolds in ambient coordinates: the unit sphere, the Stiefel manifold
//! and Euclidean space.
//!
//! Points and tangent vectors are dense matrices (vectors are `n x 1`). The
//! metric on every manifold here is the restriction of the ambient Frobenius
//! inner product, so `inner` is the elementwise sum `Σ aᵢⱼ bᵢⱼ`.
//!
//! The [`Manifold`] trait only asks for the bare coordinate maps. Foot-point
//! bookkeeping, validation and the two retraction identities
//! `R_x(0) = x` and `DR_x(0) = id` are enforced by its provided methods.

use std::fmt;
use std::sync::Arc;

use nalgebra::{DMatrix, SymmetricEigen};

use crate::error::{Error, Result};
use crate::linalg::{gaussian_matrix, max_abs_diff, orthonormal_factor, rng_from_seed, sym};

/// Two feet are the same point when their coordinates agree this closely.
pub const FOOT_TOLERANCE: f64 = 1e-12;

/// A point on a manifold, in ambient coordinates. Cheap to clone.
#[derive(Clone, PartialEq)]
pub struct ManifoldPoint {
    coords: Arc<DMatrix<f64>>,
}

impl ManifoldPoint {
    /// Wraps coordinates without checking that they lie on any manifold.
    /// Use [`Manifold::point`] for a validated constructor.
    pub fn from_coords_unchecked(coords: DMatrix<f64>) -> Self {
        Self {
            coords: Arc::new(coords),
        }
    }

    pub fn coords(&self) -> &DMatrix<f64> {
        &self.coords
    }

    pub fn shape(&self) -> (usize, usize) {
        self.coords.shape()
    }

    /// Checks that `other` is the same point as `self` within [`FOOT_TOLERANCE`].
    pub fn same_as(&self, other: &ManifoldPoint) -> Result<()> {
        if Arc::ptr_eq(&self.coords, &other.coords) {
            return Ok(());
        }
        if self.shape() != other.shape() {
            return Err(Error::ShapeMismatch {
                expected: self.shape(),
                got: other.shape(),
            });
        }
        let gap = max_abs_diff(&self.coords, &other.coords);
        if gap <= FOOT_TOLERANCE {
            Ok(())
        } else {
            Err(Error::FootMismatch { gap })
        }
    }
}

impl fmt::Debug for ManifoldPoint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_tuple("ManifoldPoint")
            .field(&self.coords.as_slice())
            .finish()
    }
}

/// A tangent vector together with its foot point.
#[derive(Clone, Debug, PartialEq)]
pub struct TangentVector {
    foot: ManifoldPoint,
    coords: DMatrix<f64>,
}

impl TangentVector {
    /// Wraps coordinates without a tangency check.
    pub fn from_coords_unchecked(foot: ManifoldPoint, coords: DMatrix<f64>) -> Self {
        debug_assert_eq!(foot.shape(), coords.shape());
        Self { foot, coords }
    }

    pub fn zero(foot: &ManifoldPoint) -> Self {
        let (r, c) = foot.shape();
        Self {
            foot: foot.clone(),
            coords: DMatrix::zeros(r, c),
        }
    }

    pub fn foot(&self) -> &ManifoldPoint {
        &self.foot
    }

    pub fn coords(&self) -> &DMatrix<f64> {
        &self.coords
    }

    pub fn into_coords(self) -> DMatrix<f64> {
        self.coords
    }

    pub fn is_zero(&self) -> bool {
        self.coords.iter().all(|&v| v == 0.0)
    }

    pub fn scale(&self, a: f64) -> TangentVector {
        Self {
            foot: self.foot.clone(),
            coords: &self.coords * a,
        }
    }

    /// `a * self + b * other`, both at the same foot.
    pub fn lincomb(&self, a: f64, b: f64, other: &TangentVector) -> Result<TangentVector> {
        self.foot.same_as(&other.foot)?;
        Ok(Self {
            foot: self.foot.clone(),
            coords: &self.coords * a + &other.coords * b,
        })
    }

    /// Same coordinates attached to a different foot. Only meaningful when the
    /// caller knows the coordinates are tangent there.
    pub(crate) fn with_foot(self, foot: ManifoldPoint) -> TangentVector {
        Self {
            foot,
            coords: self.coords,
        }
    }
}

/// Concrete manifolds shipped with the crate.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum ManifoldKind {
    /// Unit sphere `S^{n-1}` in `R^n`.
    Sphere {
        n: usize,
    },
    /// `n x p` matrices with orthonormal columns.
    Stiefel {
        n: usize,
        p: usize,
    },
    Euclidean {
        n: usize,
    },
}

impl ManifoldKind {
    pub fn sphere(n: usize) -> Result<Self> {
        if n < 2 {
            return Err(Error::InvalidDimensions(format!(
                "sphere needs n >= 2, got n = {n}"
            )));
        }
        Ok(Self::Sphere { n })
    }

    pub fn stiefel(n: usize, p: usize) -> Result<Self> {
        if p == 0 || p > n {
            return Err(Error::InvalidDimensions(format!(
                "stiefel needs 1 <= p <= n, got n = {n}, p = {p}"
            )));
        }
        Ok(Self::Stiefel { n, p })
    }

    pub fn euclidean(n: usize) -> Result<Self> {
        if n == 0 {
            return Err(Error::InvalidDimensions("euclidean needs n >= 1".into()));
        }
        Ok(Self::Euclidean { n })
    }
}

impl fmt::Display for ManifoldKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match *self {
            Self::Sphere { n } => write!(f, "Sphere({n})"),
            Self::Stiefel { n, p } => write!(f, "Stiefel({n},{p})"),
            Self::Euclidean { n } => write!(f, "Euclidean({n})"),
        }
    }
}

/// A Riemannian manifold embedded in a space of `rows x cols` matrices.
///
/// Implementors supply raw coordinate maps; callers use the provided
/// methods, which check foot points and handle the zero-step identities
/// exactly.
pub trait Manifold: fmt::Debug + Send + Sync {
    /// Ambient shape `(rows, cols)`.
    fn ambient_shape(&self) -> (usize, usize);

    /// Intrinsic dimension.
    fn dimension(&self) -> usize;

    /// True when the retraction is `x + η` and the metric is the standard one.
    fn is_euclidean(&self) -> bool {
        false
    }

    /// Distance of `x` from the manifold, in the units of the point tolerance.
    fn point_residual(&self, x: &DMatrix<f64>) -> f64;

    fn point_tolerance(&self) -> f64;

    /// Tangency defect of `v` at `x`.
    fn tangent_residual(&self, x: &DMatrix<f64>, v: &DMatrix<f64>) -> f64;

    fn tangent_tolerance(&self) -> f64;

    fn project_coords(&self, x: &DMatrix<f64>, v: &DMatrix<f64>) -> DMatrix<f64>;

    fn retract_coords(&self, x: &DMatrix<f64>, eta: &DMatrix<f64>) -> DMatrix<f64>;

    /// `D R_x(η)[ξ]`.
    fn dretract_coords(
        &self,
        x: &DMatrix<f64>,
        eta: &DMatrix<f64>,
        xi: &DMatrix<f64>,
    ) -> DMatrix<f64>;

    fn random_point_coords(&self, seed: u64) -> DMatrix<f64>;

    fn metric(&self, _x: &DMatrix<f64>, a: &DMatrix<f64>, b: &DMatrix<f64>) -> f64 {
        a.dot(b)
    }

    // ---- provided -------------------------------------------------------

    fn check_shape(&self, coords: &DMatrix<f64>) -> Result<()> {
        let expected = self.ambient_shape();
        if coords.shape() != expected {
            return Err(Error::ShapeMismatch {
                expected,
                got: coords.shape(),
            });
        }
        Ok(())
    }

    /// Validated point constructor.
    fn point(&self, coords: DMatrix<f64>) -> Result<ManifoldPoint> {
        self.check_shape(&coords)?;
        if coords.iter().any(|v| !v.is_finite()) {
            return Err(Error::NonFiniteValue { what: "point" });
        }
        let residual = self.point_residual(&coords);
        if residual > self.point_tolerance() {
            return Err(Error::NotOnManifold { residual });
        }
        Ok(ManifoldPoint::from_coords_unchecked(coords))
    }

    fn is_tangent(&self, v: &TangentVector) -> bool {
        let scale = v.coords().norm().max(1.0);
        self.tangent_residual(v.foot().coords(), v.coords()) <= self.tangent_tolerance() * scale
    }

    /// Validated tangent vector constructor.
    fn tangent(&self, foot: &ManifoldPoint, coords: DMatrix<f64>) -> Result<TangentVector> {
        self.check_shape(&coords)?;
        let v = TangentVector::from_coords_unchecked(foot.clone(), coords);
        if !self.is_tangent(&v) {
            return Err(Error::NotOnManifold {
                residual: self.tangent_residual(foot.coords(), v.coords()),
            });
        }
        Ok(v)
    }

    fn inner(&self, a: &TangentVector, b: &TangentVector) -> Result<f64> {
        a.foot().same_as(b.foot())?;
        Ok(self.metric(a.foot().coords(), a.coords(), b.coords()))
    }

    fn norm(&self, a: &TangentVector) -> f64 {
        self.metric(a.foot().coords(), a.coords(), a.coords())
            .max(0.0)
            .sqrt()
    }

    fn project_tangent(&self, x: &ManifoldPoint, v: &DMatrix<f64>) -> TangentVector {
        TangentVector::from_coords_unchecked(x.clone(), self.project_coords(x.coords(), v))
    }

    fn retract(&self, x: &ManifoldPoint, eta: &TangentVector) -> Result<ManifoldPoint> {
        x.same_as(eta.foot())?;
        if eta.is_zero() {
            return Ok(x.clone());
        }
        Ok(ManifoldPoint::from_coords_unchecked(
            self.retract_coords(x.coords(), eta.coords()),
        ))
    }

    /// `D R_x(η)[ξ]` with its foot at `R_x(η)`.
    fn dretract(
        &self,
        x: &ManifoldPoint,
        eta: &TangentVector,
        xi: &TangentVector,
    ) -> Result<TangentVector> {
        x.same_as(eta.foot())?;
        x.same_as(xi.foot())?;
        if eta.is_zero() {
            return Ok(xi.clone().with_foot(x.clone()));
        }
        let foot = self.retract(x, eta)?;
        let coords = self.dretract_coords(x.coords(), eta.coords(), xi.coords());
        Ok(TangentVector::from_coords_unchecked(foot, coords))
    }

    fn random_point(&self, seed: u64) -> ManifoldPoint {
        ManifoldPoint::from_coords_unchecked(self.random_point_coords(seed))
    }

    fn random_tangent(&self, x: &ManifoldPoint, seed: u64) -> TangentVector {
        let (r, c) = self.ambient_shape();
        let mut rng = rng_from_seed(seed);
        let g = gaussian_matrix(&mut rng, r, c);
        self.project_tangent(x, &g)
    }
}

/// Solves `A X + X A = rhs` for `A = Q diag(s) Qᵀ` with all `s > 0`.
fn sylvester_spd(q: &DMatrix<f64>, s: &[f64], rhs: &DMatrix<f64>) -> DMatrix<f64> {
    let mut c = q.transpose() * rhs * q;
    for j in 0..s.len() {
        for i in 0..s.len() {
            c[(i, j)] /= s[i] + s[j];
        }
    }
    q * c * q.transpose()
}

impl Manifold for ManifoldKind {
    fn ambient_shape(&self) -> (usize, usize) {
        match *self {
            Self::Sphere { n } | Self::Euclidean { n } => (n, 1),
            Self::Stiefel { n, p } => (n, p),
        }
    }

    fn dimension(&self) -> usize {
        match *self {
            Self::Sphere { n } => n - 1,
            Self::Stiefel { n, p } => n * p - p * (p + 1) / 2,
            Self::Euclidean { n } => n,
        }
    }

    fn is_euclidean(&self) -> bool {
        matches!(self, Self::Euclidean { .. })
    }

    fn point_residual(&self, x: &DMatrix<f64>) -> f64 {
        match *self {
            Self::Sphere { .. } => (x.norm() - 1.0).abs(),
            Self::Stiefel { p, .. } => (x.transpose() * x - DMatrix::identity(p, p)).norm(),
            Self::Euclidean { .. } => 0.0,
        }
    }

    fn point_tolerance(&self) -> f64 {
        match self {
            Self::Sphere { .. } => 1e-12,
            Self::Stiefel { .. } => 1e-10,
            Self::Euclidean { .. } => f64::INFINITY,
        }
    }

    fn tangent_residual(&self, x: &DMatrix<f64>, v: &DMatrix<f64>) -> f64 {
        match self {
            Self::Sphere { .. } => x.dot(v).abs(),
            Self::Stiefel { .. } => {
                let xtv = x.transpose() * v;
                (&xtv + xtv.transpose()).norm()
            }
            Self::Euclidean { .. } => 0.0,
        }
    }

    fn tangent_tolerance(&self) -> f64 {
        match self {
            Self::Sphere { .. } => 1e-10,
            Self::Stiefel { .. } => 1e-9,
            Self::Euclidean { .. } => f64::INFINITY,
        }
    }

    fn project_coords(&self, x: &DMatrix<f64>, v: &DMatrix<f64>) -> DMatrix<f64> {
        match self {
            Self::Sphere { .. } => v - x * x.dot(v),
            Self::Stiefel { .. } => v - x * sym(&(x.transpose() * v)),
            Self::Euclidean { .. } => v.clone(),
        }
    }

    fn retract_coords(&self, x: &DMatrix<f64>, eta: &DMatrix<f64>) -> DMatrix<f64> {
        match self {
            Self::Sphere { .. } => {
                let w = x + eta;
                let r = w.norm();
                w / r
            }
            Self::Stiefel { .. } => {
                if eta.iter().all(|v| *v == 0.0) {
                    return x.clone();
                }
                // polar factor w (wᵀw)^{-1/2}, w = x + η. On the manifold
                // wᵀw = I + ηᵀη; forming it from w keeps rounding drift in
                // xᵀx from accumulating over many steps.
                let w = x + eta;
                let eig = SymmetricEigen::new(w.transpose() * &w);
                let inv_sqrt = eig.eigenvalues.map(|l| 1.0 / l.sqrt());
                let s = &eig.eigenvectors
                    * DMatrix::from_diagonal(&inv_sqrt)
                    * eig.eigenvectors.transpose();
                w * s
            }
            Self::Euclidean { .. } => x + eta,
        }
    }

    fn dretract_coords(
        &self,
        x: &DMatrix<f64>,
        eta: &DMatrix<f64>,
        xi: &DMatrix<f64>,
    ) -> DMatrix<f64> {
        match self {
            Self::Sphere { .. } => {
                let w = x + eta;
                let r2 = w.norm_squared();
                let r = r2.sqrt();
                (xi - &w * (w.dot(xi) / r2)) / r
            }
            Self::Stiefel { .. } => {
                let w = x + eta;
                let eig = SymmetricEigen::new(w.transpose() * &w);
                let q = eig.eigenvectors;
                let roots: Vec<f64> = eig.eigenvalues.iter().map(|l| l.sqrt()).collect();
                let inv_roots =
                    nalgebra::DVector::from_iterator(roots.len(), roots.iter().map(|s| 1.0 / s));
                let s_inv_half = &q * DMatrix::from_diagonal(&inv_roots) * q.transpose();
                // B^{1/2} dA + dA B^{1/2} = dB, then d(B^{-1/2}) = -B^{-1/2} dA B^{-1/2}.
                let xi_t_w = xi.transpose() * &w;
                let db = &xi_t_w + xi_t_w.transpose();
                let da = sylvester_spd(&q, &roots, &db);
                let ds = -(&s_inv_half * da * &s_inv_half);
                xi * &s_inv_half + w * ds
            }
            Self::Euclidean { .. } => xi.clone(),
        }
    }

    fn random_point_coords(&self, seed: u64) -> DMatrix<f64> {
        let (r, c) = self.ambient_shape();
        let mut rng = rng_from_seed(seed);
        let g = gaussian_matrix(&mut rng, r, c);
        match self {
            Self::Sphere { .. } => {
                let nrm = g.norm();
                g / nrm
            }
            Self::Stiefel { .. } => orthonormal_factor(&g),
            Self::Euclidean { .. } => g,
        }
    }
}
