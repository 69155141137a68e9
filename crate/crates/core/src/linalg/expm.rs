//! Truncated Taylor series with halving and squaring, and its exact reverse
//! pass.
//!
//! `expm(A) ~ (T_n(A / 2^s))^(2^s)` with `T_n(B) = sum_{k<=n} B^k / k!`.
//! The gradient is that of this finite composition, not of the ideal
//! exponential.

use faer::MatRef;
use num_complex::Complex64;

use super::{
    anti_hermitian_defect, axpy, mul, mul_adj_lhs_acc, mul_adj_rhs_acc, scale, unitarity_defect,
    CMat, UnitaryTransform, ANTI_HERMITIAN_TOLERANCE, UNITARITY_TOLERANCE,
};
use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
pub struct ExpmConfig {
    pub squarings: u32,
    pub taylor_order: u32,
}

impl Default for ExpmConfig {
    fn default() -> Self {
        Self {
            squarings: 8,
            taylor_order: 10,
        }
    }
}

impl ExpmConfig {
    pub fn new(squarings: u32, taylor_order: u32) -> Result<Self> {
        let cfg = Self {
            squarings,
            taylor_order,
        };
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<()> {
        if self.squarings > 32 {
            return Err(Error::Argument(format!(
                "squarings must be in [0, 32], got {}",
                self.squarings
            )));
        }
        if self.taylor_order < 2 {
            return Err(Error::Argument(format!(
                "taylor order must be at least 2, got {}",
                self.taylor_order
            )));
        }
        Ok(())
    }
}

/// Intermediates of one forward pass, consumed by [`expm_vjp`].
#[derive(Debug, Clone)]
pub struct ExpmTape {
    cfg: ExpmConfig,
    /// `B = A / 2^s`
    scaled: CMat,
    /// `B^1 .. B^(n-1)`
    powers: Vec<CMat>,
    /// inputs to each squaring: `X_0 = T_n(B)`, `X_{k+1} = X_k^2`
    squares: Vec<CMat>,
}

impl ExpmTape {
    pub fn config(&self) -> ExpmConfig {
        self.cfg
    }

    pub fn dim(&self) -> usize {
        self.scaled.nrows()
    }
}

/// Unitary exponential of an anti-Hermitian matrix.
pub fn expm(a: &CMat, cfg: &ExpmConfig) -> Result<UnitaryTransform> {
    expm_forward(a, cfg).map(|(u, _)| u)
}

/// [`expm`] that also returns the intermediates needed for the reverse pass.
pub fn expm_forward(a: &CMat, cfg: &ExpmConfig) -> Result<(UnitaryTransform, ExpmTape)> {
    cfg.validate()?;
    if a.nrows() != a.ncols() || a.nrows() == 0 {
        return Err(Error::Argument(format!(
            "expm needs a square nonempty matrix, got {}x{}",
            a.nrows(),
            a.ncols()
        )));
    }
    let defect = anti_hermitian_defect(a.as_ref());
    if defect.is_nan() || defect > ANTI_HERMITIAN_TOLERANCE {
        return Err(Error::Argument(format!(
            "generator is not anti-Hermitian (defect {defect:.3e})"
        )));
    }
    let n = a.nrows();
    let order = cfg.taylor_order as usize;

    let mut scaled = a.clone();
    scale(&mut scaled, 0.5f64.powi(cfg.squarings as i32));

    let mut taylor = CMat::identity(n, n);
    axpy(&mut taylor, 1.0, &scaled);
    let mut powers = Vec::with_capacity(order - 1);
    powers.push(scaled.clone());
    let mut factorial = 1.0;
    for k in 2..=order {
        factorial *= k as f64;
        let next = mul(powers.last().unwrap().as_ref(), scaled.as_ref());
        axpy(&mut taylor, 1.0 / factorial, &next);
        if k < order {
            powers.push(next);
        }
    }

    let mut squares = Vec::with_capacity(cfg.squarings as usize);
    let mut current = taylor;
    for _ in 0..cfg.squarings {
        let next = mul(current.as_ref(), current.as_ref());
        squares.push(current);
        current = next;
    }

    let defect = unitarity_defect(current.as_ref());
    if defect.is_nan() || defect > UNITARITY_TOLERANCE {
        return Err(Error::Numerical(format!(
            "expm result has unitarity defect {defect:.3e} with {} squarings and order {}; \
             increase the number of squarings",
            cfg.squarings, cfg.taylor_order
        )));
    }
    let tape = ExpmTape {
        cfg: *cfg,
        scaled,
        powers,
        squares,
    };
    Ok((UnitaryTransform::from_mat_unchecked(current), tape))
}

/// Given `dL/dU`, return `dL/dA` for the forward pass recorded in `tape`.
pub fn expm_vjp(tape: &ExpmTape, cfg: &ExpmConfig, upstream: MatRef<'_, Complex64>) -> Result<CMat> {
    if *cfg != tape.cfg {
        return Err(Error::Usage(format!(
            "reverse pass configured with {cfg:?} but the forward tape used {:?}",
            tape.cfg
        )));
    }
    let n = tape.dim();
    if upstream.nrows() != n || upstream.ncols() != n {
        return Err(Error::Argument(format!(
            "cotangent is {}x{}, expected {n}x{n}",
            upstream.nrows(),
            upstream.ncols()
        )));
    }

    // Y = X X  =>  G_X = G_Y X^H + X^H G_Y
    let mut grad = upstream.to_owned();
    for x in tape.squares.iter().rev() {
        let mut next = CMat::zeros(n, n);
        mul_adj_rhs_acc(&mut next, grad.as_ref(), x.as_ref());
        mul_adj_lhs_acc(&mut next, x.as_ref(), grad.as_ref());
        grad = next;
    }

    // T = I + sum_k P_k / k!, P_k = P_{k-1} B.
    // Walking down from the top power, q holds the total cotangent of P_k.
    let order = tape.cfg.taylor_order as usize;
    let g_taylor = grad;
    let inv_fact: Vec<f64> = {
        let mut f = vec![1.0; order + 1];
        for k in 1..=order {
            f[k] = f[k - 1] / k as f64;
        }
        f
    };
    let mut q = g_taylor.clone();
    scale(&mut q, inv_fact[order]);
    let mut g_scaled = CMat::zeros(n, n);
    for k in (2..=order).rev() {
        let prev = &tape.powers[k - 2];
        mul_adj_lhs_acc(&mut g_scaled, prev.as_ref(), q.as_ref());
        let mut q_prev = g_taylor.clone();
        scale(&mut q_prev, inv_fact[k - 1]);
        mul_adj_rhs_acc(&mut q_prev, q.as_ref(), tape.scaled.as_ref());
        q = q_prev;
    }
    axpy(&mut g_scaled, 1.0, &q);
    scale(&mut g_scaled, 0.5f64.powi(tape.cfg.squarings as i32));
    Ok(g_scaled)
}
