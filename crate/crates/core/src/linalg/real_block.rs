//! All-real rendition of the pipeline: each complex `C + iD` becomes the
//! block `[[C, -D], [D, C]]`. Twice the memory of the complex path, kept as
//! an independent cross-check.

use faer::linalg::matmul::matmul;
use faer::{Accum, Mat, Par};
use num_complex::Complex64;

use super::{CMat, ExpmConfig, WeightMatrix};
use crate::dataset::ClassStyleLayout;

pub fn embed(a: &CMat) -> Mat<f64> {
    let n = a.nrows();
    Mat::from_fn(2 * n, 2 * n, |r, c| {
        let z = a[(r / 2, c / 2)];
        match (r % 2, c % 2) {
            (0, 0) | (1, 1) => z.re,
            (0, 1) => -z.im,
            _ => z.im,
        }
    })
}

/// Read each complex entry back from the first column of its block.
pub fn extract(m: &Mat<f64>) -> CMat {
    let n = m.nrows() / 2;
    CMat::from_fn(n, m.ncols() / 2, |i, j| {
        Complex64::new(m[(2 * i, 2 * j)], m[(2 * i + 1, 2 * j)])
    })
}

/// Blocked generator straight from the weights:
/// `[[W_ij - W_ji, -(W_ij + W_ji)], [W_ij + W_ji, W_ij - W_ji]]`.
pub fn generator_from_weights(w: &WeightMatrix) -> Mat<f64> {
    let n = w.dim();
    Mat::from_fn(2 * n, 2 * n, |r, c| {
        let (i, j) = (r / 2, c / 2);
        let anti = w.get(i, j) - w.get(j, i);
        let sym = w.get(i, j) + w.get(j, i);
        match (r % 2, c % 2) {
            (0, 0) | (1, 1) => anti,
            (0, 1) => -sym,
            _ => sym,
        }
    })
}

fn mul(a: &Mat<f64>, b: &Mat<f64>) -> Mat<f64> {
    let mut out = Mat::zeros(a.nrows(), b.ncols());
    matmul(out.as_mut(), Accum::Replace, a.as_ref(), b.as_ref(), 1.0, Par::Seq);
    out
}

/// Real Taylor polynomial with halving and squaring.
pub fn expm_real(m: &Mat<f64>, cfg: &ExpmConfig) -> Mat<f64> {
    let n = m.nrows();
    let s = 0.5f64.powi(cfg.squarings as i32);
    let scaled = Mat::from_fn(n, n, |i, j| m[(i, j)] * s);
    let mut sum = Mat::<f64>::identity(n, n);
    let mut term = Mat::<f64>::identity(n, n);
    for k in 1..=cfg.taylor_order as usize {
        term = mul(&term, &scaled);
        let f = 1.0 / k as f64;
        term = Mat::from_fn(n, n, |i, j| term[(i, j)] * f);
        sum = Mat::from_fn(n, n, |i, j| sum[(i, j)] + term[(i, j)]);
    }
    for _ in 0..cfg.squarings {
        sum = mul(&sum, &sum);
    }
    sum
}

/// Real `2M x 2` representation of a real amplitude vector.
pub fn encode_state(amplitudes: &[f64]) -> Mat<f64> {
    Mat::from_fn(2 * amplitudes.len(), 2, |r, c| {
        if r % 2 == c {
            amplitudes[r / 2]
        } else {
            0.0
        }
    })
}

/// Class probabilities from the blocked unitary and blocked state:
/// `p(c) = sum_s A[2j, 0]^2 + A[2j + 1, 0]^2` with `j = c S + s`.
pub fn class_probabilities(unitary: &Mat<f64>, state: &Mat<f64>, layout: &ClassStyleLayout) -> Vec<f64> {
    let out = mul(unitary, state);
    (0..layout.classes())
        .map(|c| {
            layout
                .class_range(c)
                .map(|j| out[(2 * j, 0)].powi(2) + out[(2 * j + 1, 0)].powi(2))
                .sum()
        })
        .collect()
}
