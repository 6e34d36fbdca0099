//! Small dense helpers shared by the manifolds and objectives.

use nalgebra::DMatrix;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

#[inline]
fn two_sum(a: f64, b: f64) -> (f64, f64) {
    let s = a + b;
    let z = s - a;
    (s, (a - (s - z)) + (b - z))
}

#[inline]
fn two_prod(a: f64, b: f64) -> (f64, f64) {
    let p = a * b;
    (p, a.mul_add(b, -p))
}

/// Compensated dot product (Ogita, Rump and Oishi's `Dot2`).
///
/// The result is as accurate as if it had been computed in twice the working
/// precision and then rounded.
pub fn dot2(a: &[f64], b: &[f64]) -> f64 {
    debug_assert_eq!(a.len(), b.len());
    let mut s = 0.0;
    let mut c = 0.0;
    for (&x, &y) in a.iter().zip(b) {
        let (p, ep) = two_prod(x, y);
        let (t, es) = two_sum(s, p);
        s = t;
        c += es + ep;
    }
    s + c
}

/// Running sum kept as an unevaluated pair `hi + lo`.
///
/// Each addition is error-free up to the rounding of `lo` itself, so the
/// total is accurate to roughly `ε²` times the sum of the magnitudes of the
/// terms. Products enter through [`two_prod`] and lose nothing.
#[derive(Clone, Copy, Debug, Default)]
pub struct CompensatedSum {
    s: f64,
    c: f64,
}

impl CompensatedSum {
    pub fn new() -> Self {
        Self::default()
    }

    #[inline]
    pub fn add(&mut self, v: f64) {
        let (t, e) = two_sum(self.s, v);
        self.s = t;
        self.c += e;
    }

    #[inline]
    pub fn add_prod(&mut self, a: f64, b: f64) {
        let (p, e) = two_prod(a, b);
        self.add(p);
        self.c += e;
    }

    /// Adds `a b c`; only the `ε²` tail of the product is dropped.
    #[inline]
    pub fn add_prod3(&mut self, a: f64, b: f64, c: f64) {
        let (p, e) = two_prod(a, b);
        let (q, f) = two_prod(p, c);
        self.add(q);
        self.c += f + e * c;
    }

    /// Adds `w (hi + lo)` for a pair from [`CompensatedSum::parts`].
    pub fn add_scaled(&mut self, w: f64, (hi, lo): (f64, f64)) {
        self.add_prod(w, hi);
        self.add_prod(w, lo);
    }

    /// Adds `vᵀ A v` for symmetric `a`, reading the lower triangle.
    pub fn add_sym_form(&mut self, a: &DMatrix<f64>, v: &[f64]) {
        let n = v.len();
        debug_assert_eq!(a.shape(), (n, n));
        for j in 0..n {
            let col = a.column(j);
            let col = col.as_slice();
            self.add_prod3(col[j], v[j], v[j]);
            let vj2 = 2.0 * v[j];
            for i in j + 1..n {
                self.add_prod3(col[i], v[i], vj2);
            }
        }
    }

    /// Normalized pair with `|lo| ≤ ulp(hi)/2`.
    pub fn parts(&self) -> (f64, f64) {
        two_sum(self.s, self.c)
    }

    pub fn value(&self) -> f64 {
        self.s + self.c
    }
}

/// `(b.0 + b.1) − (a.0 + a.1)` for two pairs, rounded once.
pub fn pair_difference(b: (f64, f64), a: (f64, f64)) -> f64 {
    let mut acc = CompensatedSum::new();
    acc.add(b.0);
    acc.add(-a.0);
    acc.add(b.1);
    acc.add(-a.1);
    acc.value()
}

/// `A * v` for a column `v`, each entry accumulated with [`dot2`].
///
/// `a` must be symmetric: column `i` is used in place of row `i`.
pub fn sym_matvec_accurate(a: &DMatrix<f64>, v: &[f64]) -> Vec<f64> {
    (0..a.ncols())
        .map(|i| dot2(a.column(i).as_slice(), v))
        .collect()
}

/// Symmetric part `(A + Aᵀ)/2`.
pub fn sym(a: &DMatrix<f64>) -> DMatrix<f64> {
    (a + a.transpose()) * 0.5
}

pub fn max_abs_diff(a: &DMatrix<f64>, b: &DMatrix<f64>) -> f64 {
    a.iter()
        .zip(b.iter())
        .map(|(x, y)| (x - y).abs())
        .fold(0.0, f64::max)
}

pub fn rng_from_seed(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn gaussian_matrix(rng: &mut ChaCha8Rng, rows: usize, cols: usize) -> DMatrix<f64> {
    // Fill column-major so the draw order is fixed by the storage layout.
    let data: Vec<f64> = (0..rows * cols)
        .map(|_| StandardNormal.sample(rng))
        .collect();
    DMatrix::from_vec(rows, cols, data)
}

/// Orthonormal factor of a thin QR decomposition, with columns flipped so
/// that `R` has a nonnegative diagonal.
pub fn orthonormal_factor(g: &DMatrix<f64>) -> DMatrix<f64> {
    let qr = g.clone().qr();
    let mut q = qr.q();
    let r = qr.r();
    for j in 0..q.ncols() {
        if r[(j, j)] < 0.0 {
            q.column_mut(j).neg_mut();
        }
    }
    q
}

/// Seeded symmetric matrix `(G + Gᵀ)/2` with `G` standard Gaussian.
pub fn random_symmetric(n: usize, seed: u64) -> DMatrix<f64> {
    let mut rng = rng_from_seed(seed);
    sym(&gaussian_matrix(&mut rng, n, n))
}

/// Seeded positive definite matrix `GᵀG + I` and right-hand side `b`.
pub fn random_spd_system(n: usize, seed: u64) -> (DMatrix<f64>, DMatrix<f64>) {
    let mut rng = rng_from_seed(seed);
    let g = gaussian_matrix(&mut rng, n, n);
    let a = sym(&(g.transpose() * &g)) + DMatrix::identity(n, n);
    let b = gaussian_matrix(&mut rng, n, 1);
    (a, b)
}
