//! Dense complex kernel: weights to generator, generator to unitary, and the
//! reverse pass back to the weights.
//!
//! `A(W) = (W - W^T) + i (W + W^T)` is anti-Hermitian for any real `W`, so
//! `expm(A)` is unitary. Every unitary is reached this way.

use std::sync::atomic::{AtomicUsize, Ordering};

use faer::linalg::matmul::matmul;
use faer::{Accum, Mat, MatRef, Par};
use num_complex::Complex64;
use rand::Rng;
use rand_distr::{Distribution, StandardNormal};

use crate::{Error, Result};

mod expm;
pub mod real_block;

pub use expm::{expm, expm_forward, expm_vjp, ExpmConfig, ExpmTape};

pub type CMat = Mat<Complex64>;

pub const UNITARITY_TOLERANCE: f64 = 1e-10;
pub const ANTI_HERMITIAN_TOLERANCE: f64 = 1e-12;

static THREADS: AtomicUsize = AtomicUsize::new(1);

/// Cap the number of threads used by matrix products. `1` runs sequentially.
pub fn set_threads(n: usize) {
    THREADS.store(n.max(1), Ordering::Relaxed);
}

pub fn threads() -> usize {
    THREADS.load(Ordering::Relaxed)
}

pub(crate) fn par() -> Par {
    match threads() {
        1 => Par::Seq,
        n => Par::rayon(n),
    }
}

const ONE: Complex64 = Complex64::new(1.0, 0.0);

/// `a * b`
pub(crate) fn mul(a: MatRef<'_, Complex64>, b: MatRef<'_, Complex64>) -> CMat {
    let mut out = CMat::zeros(a.nrows(), b.ncols());
    matmul(out.as_mut(), Accum::Replace, a, b, ONE, par());
    out
}

/// `dst += a * b^H`
pub(crate) fn mul_adj_rhs_acc(dst: &mut CMat, a: MatRef<'_, Complex64>, b: MatRef<'_, Complex64>) {
    matmul(dst.as_mut(), Accum::Add, a, b.adjoint(), ONE, par());
}

/// `dst += a^H * b`
pub(crate) fn mul_adj_lhs_acc(dst: &mut CMat, a: MatRef<'_, Complex64>, b: MatRef<'_, Complex64>) {
    matmul(dst.as_mut(), Accum::Add, a.adjoint(), b, ONE, par());
}

/// `dst += alpha * src`
pub(crate) fn axpy(dst: &mut CMat, alpha: f64, src: &CMat) {
    for j in 0..dst.ncols() {
        let s = src.col_as_slice(j);
        for (d, v) in dst.col_as_slice_mut(j).iter_mut().zip(s) {
            *d += v * alpha;
        }
    }
}

pub(crate) fn scale(m: &mut CMat, alpha: f64) {
    for j in 0..m.ncols() {
        for v in m.col_as_slice_mut(j) {
            *v *= alpha;
        }
    }
}

/// `max |(m m^H - I)_jk|`
pub fn unitarity_defect(m: MatRef<'_, Complex64>) -> f64 {
    let n = m.nrows();
    let mut prod = CMat::zeros(n, n);
    matmul(prod.as_mut(), Accum::Replace, m, m.adjoint(), ONE, par());
    let mut worst = 0.0f64;
    for j in 0..n {
        for (i, v) in prod.col_as_slice(j).iter().enumerate() {
            let target = if i == j { ONE } else { Complex64::new(0.0, 0.0) };
            worst = worst.max((v - target).norm());
        }
    }
    worst
}

/// `max |(m + m^H)_jk|`
pub fn anti_hermitian_defect(m: MatRef<'_, Complex64>) -> f64 {
    let n = m.nrows();
    let mut worst = 0.0f64;
    for j in 0..n {
        for i in 0..=j {
            worst = worst.max((m[(i, j)] + m[(j, i)].conj()).norm());
        }
    }
    worst
}

pub fn max_abs_diff(a: MatRef<'_, Complex64>, b: MatRef<'_, Complex64>) -> f64 {
    assert_eq!((a.nrows(), a.ncols()), (b.nrows(), b.ncols()));
    let mut worst = 0.0f64;
    for j in 0..a.ncols() {
        for i in 0..a.nrows() {
            worst = worst.max((a[(i, j)] - b[(i, j)]).norm());
        }
    }
    worst
}

/// Real `M x M` trainable parameters.
#[derive(Debug, Clone, PartialEq)]
pub struct WeightMatrix {
    data: Mat<f64>,
}

impl WeightMatrix {
    pub fn new(data: Mat<f64>) -> Result<Self> {
        if data.nrows() != data.ncols() || data.nrows() == 0 {
            return Err(Error::Argument(format!(
                "weight matrix must be square and nonempty, got {}x{}",
                data.nrows(),
                data.ncols()
            )));
        }
        for j in 0..data.ncols() {
            if data.col_as_slice(j).iter().any(|v| !v.is_finite()) {
                return Err(Error::Argument("weight matrix has non-finite entries".into()));
            }
        }
        Ok(Self { data })
    }

    pub fn zeros(dim: usize) -> Self {
        Self {
            data: Mat::zeros(dim, dim),
        }
    }

    /// Entries drawn from `N(0, scale^2)`.
    pub fn random_normal(dim: usize, scale: f64, rng: &mut impl Rng) -> Self {
        let mut data = Mat::zeros(dim, dim);
        // row-major draw order, so the stream maps to the serialized layout
        for i in 0..dim {
            for j in 0..dim {
                let z: f64 = StandardNormal.sample(rng);
                data[(i, j)] = scale * z;
            }
        }
        Self { data }
    }

    pub fn from_row_major(dim: usize, values: &[f64]) -> Result<Self> {
        if values.len() != dim * dim {
            return Err(Error::Argument(format!(
                "{dim}x{dim} weights need {} values, got {}",
                dim * dim,
                values.len()
            )));
        }
        Self::new(Mat::from_fn(dim, dim, |i, j| values[i * dim + j]))
    }

    pub fn to_row_major(&self) -> Vec<f64> {
        let n = self.dim();
        (0..n * n).map(|k| self.data[(k / n, k % n)]).collect()
    }

    pub fn dim(&self) -> usize {
        self.data.nrows()
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.data[(i, j)]
    }

    pub fn as_mat(&self) -> &Mat<f64> {
        &self.data
    }

    pub fn is_finite(&self) -> bool {
        (0..self.dim()).all(|j| self.data.col_as_slice(j).iter().all(|v| v.is_finite()))
    }
}

/// A complex matrix with `||U U^H - I||_max <= 1e-10`.
#[derive(Debug, Clone, PartialEq)]
pub struct UnitaryTransform {
    mat: CMat,
}

impl UnitaryTransform {
    pub fn new(mat: CMat) -> Result<Self> {
        if mat.nrows() != mat.ncols() || mat.nrows() == 0 {
            return Err(Error::Argument(format!(
                "unitary must be square and nonempty, got {}x{}",
                mat.nrows(),
                mat.ncols()
            )));
        }
        let defect = unitarity_defect(mat.as_ref());
        if defect.is_nan() || defect > UNITARITY_TOLERANCE {
            return Err(Error::Argument(format!(
                "matrix is not unitary: defect {defect:.3e} exceeds {UNITARITY_TOLERANCE:e}"
            )));
        }
        Ok(Self { mat })
    }

    pub fn identity(dim: usize) -> Self {
        Self {
            mat: CMat::identity(dim, dim),
        }
    }

    /// Callers vouch for unitarity.
    pub(crate) fn from_mat_unchecked(mat: CMat) -> Self {
        Self { mat }
    }

    pub fn dim(&self) -> usize {
        self.mat.nrows()
    }

    pub fn matrix(&self) -> &CMat {
        &self.mat
    }

    pub fn into_matrix(self) -> CMat {
        self.mat
    }

    pub fn defect(&self) -> f64 {
        unitarity_defect(self.mat.as_ref())
    }

    /// `U v`
    pub fn apply(&self, v: &[Complex64]) -> Vec<Complex64> {
        assert_eq!(v.len(), self.dim());
        let mut out = vec![Complex64::new(0.0, 0.0); self.dim()];
        for (k, &vk) in v.iter().enumerate() {
            if vk == Complex64::new(0.0, 0.0) {
                continue;
            }
            for (o, u) in out.iter_mut().zip(self.mat.col_as_slice(k)) {
                *o += u * vk;
            }
        }
        out
    }

    /// `U^H v`
    pub fn apply_adjoint(&self, v: &[Complex64]) -> Vec<Complex64> {
        assert_eq!(v.len(), self.dim());
        (0..self.dim())
            .map(|k| {
                self.mat
                    .col_as_slice(k)
                    .iter()
                    .zip(v)
                    .map(|(u, x)| u.conj() * x)
                    .sum()
            })
            .collect()
    }

    /// `self * other`
    pub fn compose(&self, other: &UnitaryTransform) -> UnitaryTransform {
        UnitaryTransform::from_mat_unchecked(mul(self.mat.as_ref(), other.mat.as_ref()))
    }
}

/// `A = (W - W^T) + i (W + W^T)`.
pub fn build_generator(w: &WeightMatrix) -> Result<CMat> {
    if !w.is_finite() {
        return Err(Error::Argument("weight matrix has non-finite entries".into()));
    }
    let m = w.as_mat();
    Ok(CMat::from_fn(w.dim(), w.dim(), |j, k| {
        let (a, b) = (m[(j, k)], m[(k, j)]);
        Complex64::new(a - b, a + b)
    }))
}

/// Pull a cotangent on the generator back to the weights.
///
/// With `G = dL/dRe A + i dL/dIm A`, `dL/dW_jk = Re(G_jk - G_kj) + Im(G_jk + G_kj)`.
pub fn weight_gradient(upstream_on_generator: MatRef<'_, Complex64>) -> Mat<f64> {
    let g = upstream_on_generator;
    let n = g.nrows();
    assert_eq!(n, g.ncols());
    Mat::from_fn(n, n, |j, k| {
        let (a, b) = (g[(j, k)], g[(k, j)]);
        (a.re - b.re) + (a.im + b.im)
    })
}
