//! Triangular beam-splitter mesh.
//!
//! An element on modes `a < b` acts on the amplitude pair `(x_a, x_b)` as
//!
//! ```text
//! [ e^{i phi} cos theta   -sin theta ]
//! [ e^{i phi} sin theta    cos theta ]
//! ```
//!
//! and a blueprint realizes `U = D T_K ... T_2 T_1` where `T_1` is the first
//! element in the list (the first one the light meets) and
//! `D = diag(e^{i output_phases})`.
//!
//! Decomposition zeroes the below-diagonal part of `U` one row at a time from
//! the bottom, by mixing column `c` into column `r` with `T^H` on the right.

use std::f64::consts::{FRAC_PI_2, TAU};
use std::fs;
use std::path::Path;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::linalg::{CMat, UnitaryTransform, UNITARITY_TOLERANCE};
use crate::{Error, Result};

pub const CONVENTION: &str = "reck-triangular-v1";
pub const BLUEPRINT_VERSION: u32 = 1;
pub const ELEMENT_DEFINITION: &str =
    "T(a,b,theta,phi): x_a' = e^{i phi} cos(theta) x_a - sin(theta) x_b; \
     x_b' = e^{i phi} sin(theta) x_a + cos(theta) x_b; \
     U = diag(e^{i output_phases}) * T_K * ... * T_1, elements listed in propagation order";

/// Entries below this magnitude count as already zero.
const PRUNE_TOLERANCE: f64 = 1e-15;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct OpticalElement {
    #[serde(rename = "a")]
    pub mode_a: usize,
    #[serde(rename = "b")]
    pub mode_b: usize,
    pub theta: f64,
    pub phi: f64,
}

impl OpticalElement {
    /// 2x2 transfer matrix, row-major.
    pub fn matrix(&self) -> [[Complex64; 2]; 2] {
        let (s, c) = self.theta.sin_cos();
        let e = Complex64::from_polar(1.0, self.phi);
        [[e * c, Complex64::new(-s, 0.0)], [e * s, Complex64::new(c, 0.0)]]
    }

    fn validate(&self, dim: usize) -> Result<()> {
        if !(self.mode_a < self.mode_b && self.mode_b < dim) {
            return Err(Error::Argument(format!(
                "element modes ({}, {}) must satisfy a < b < {dim}",
                self.mode_a, self.mode_b
            )));
        }
        if !(0.0..=FRAC_PI_2).contains(&self.theta) {
            return Err(Error::Argument(format!("theta {} outside [0, pi/2]", self.theta)));
        }
        if !(0.0..TAU).contains(&self.phi) {
            return Err(Error::Argument(format!("phi {} outside [0, 2 pi)", self.phi)));
        }
        Ok(())
    }

    /// Apply to a state vector in place.
    pub fn apply(&self, v: &mut [Complex64]) {
        let t = self.matrix();
        let (x, y) = (v[self.mode_a], v[self.mode_b]);
        v[self.mode_a] = t[0][0] * x + t[0][1] * y;
        v[self.mode_b] = t[1][0] * x + t[1][1] * y;
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OpticalBlueprint {
    pub version: u32,
    pub dim: usize,
    pub convention: String,
    pub element_definition: String,
    pub elements: Vec<OpticalElement>,
    pub output_phases: Vec<f64>,
}

impl OpticalBlueprint {
    pub fn new(dim: usize, elements: Vec<OpticalElement>, output_phases: Vec<f64>) -> Result<Self> {
        let bp = Self {
            version: BLUEPRINT_VERSION,
            dim,
            convention: CONVENTION.to_string(),
            element_definition: ELEMENT_DEFINITION.to_string(),
            elements,
            output_phases,
        };
        bp.validate()?;
        Ok(bp)
    }

    pub fn validate(&self) -> Result<()> {
        if self.version != BLUEPRINT_VERSION {
            return Err(Error::Format(format!("unsupported blueprint version {}", self.version)));
        }
        if self.convention != CONVENTION {
            return Err(Error::Format(format!(
                "blueprint convention {:?}, expected {CONVENTION:?}",
                self.convention
            )));
        }
        if self.dim == 0 {
            return Err(Error::Argument("blueprint dimension must be positive".into()));
        }
        if self.output_phases.len() != self.dim {
            return Err(Error::Argument(format!(
                "{} output phases for dimension {}",
                self.output_phases.len(),
                self.dim
            )));
        }
        if let Some(p) = self.output_phases.iter().find(|p| !(0.0..TAU).contains(*p)) {
            return Err(Error::Argument(format!("output phase {p} outside [0, 2 pi)")));
        }
        self.elements.iter().try_for_each(|e| e.validate(self.dim))
    }

    /// Propagate a state through the mesh and the output phases.
    pub fn apply(&self, input: &[Complex64]) -> Result<Vec<Complex64>> {
        if input.len() != self.dim {
            return Err(Error::Argument(format!(
                "state of length {} for a {}-mode blueprint",
                input.len(),
                self.dim
            )));
        }
        let mut v = input.to_vec();
        for e in &self.elements {
            e.apply(&mut v);
        }
        for (x, &p) in v.iter_mut().zip(&self.output_phases) {
            *x *= Complex64::from_polar(1.0, p);
        }
        Ok(v)
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let bp: Self = serde_json::from_str(text)?;
        bp.validate()?;
        Ok(bp)
    }

    pub fn write(&self, path: impl AsRef<Path>) -> Result<()> {
        let path = path.as_ref();
        fs::write(path, self.to_json()?).map_err(|e| Error::io(path, e))
    }

    pub fn read(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Self::from_json(&text)
    }
}

fn wrap_phase(p: f64) -> f64 {
    let w = p.rem_euclid(TAU);
    if w >= TAU {
        0.0
    } else {
        w
    }
}

/// `m <- m T^H` on columns `a`, `b`.
fn mix_columns_adjoint(m: &mut CMat, e: &OpticalElement) {
    let t = e.matrix();
    // (T^H)_{ij} = conj(T_{ji})
    let h = [
        [t[0][0].conj(), t[1][0].conj()],
        [t[0][1].conj(), t[1][1].conj()],
    ];
    for i in 0..m.nrows() {
        let (x, y) = (m[(i, e.mode_a)], m[(i, e.mode_b)]);
        m[(i, e.mode_a)] = x * h[0][0] + y * h[1][0];
        m[(i, e.mode_b)] = x * h[0][1] + y * h[1][1];
    }
}

/// Decompose a unitary into a mesh of at most `M (M - 1) / 2` elements.
pub fn decompose(u: &UnitaryTransform) -> Result<OpticalBlueprint> {
    decompose_inspect(u, |_| {})
}

/// [`decompose`] that shows every partial product `U T_1^H ... T_k^H` to
/// `inspect` right after element `k` is applied.
pub fn decompose_inspect(u: &UnitaryTransform, mut inspect: impl FnMut(&CMat)) -> Result<OpticalBlueprint> {
    let defect = u.defect();
    if defect.is_nan() || defect > UNITARITY_TOLERANCE {
        return Err(Error::Argument(format!("cannot decompose: unitarity defect {defect:.3e}")));
    }
    let n = u.dim();
    let mut m = u.matrix().clone();
    let mut elements = Vec::new();
    for r in (1..n).rev() {
        for c in 0..r {
            let (x, y) = (m[(r, c)], m[(r, r)]);
            if x.norm() <= PRUNE_TOLERANCE {
                continue;
            }
            let (theta, phi) = if y.norm() == 0.0 {
                (FRAC_PI_2, 0.0)
            } else {
                (x.norm().atan2(y.norm()), wrap_phase(x.arg() - y.arg()))
            };
            let e = OpticalElement {
                mode_a: c,
                mode_b: r,
                theta,
                phi,
            };
            mix_columns_adjoint(&mut m, &e);
            m[(r, c)] = Complex64::new(0.0, 0.0);
            inspect(&m);
            elements.push(e);
        }
    }
    let phases = (0..n).map(|k| wrap_phase(m[(k, k)].arg())).collect();
    OpticalBlueprint::new(n, elements, phases)
}

/// Multiply the mesh back out.
pub fn reconstruct(bp: &OpticalBlueprint) -> Result<UnitaryTransform> {
    bp.validate()?;
    let n = bp.dim;
    let mut m = CMat::identity(n, n);
    for e in &bp.elements {
        let t = e.matrix();
        for j in 0..n {
            let (x, y) = (m[(e.mode_a, j)], m[(e.mode_b, j)]);
            m[(e.mode_a, j)] = t[0][0] * x + t[0][1] * y;
            m[(e.mode_b, j)] = t[1][0] * x + t[1][1] * y;
        }
    }
    for (k, &p) in bp.output_phases.iter().enumerate() {
        let d = Complex64::from_polar(1.0, p);
        for j in 0..n {
            m[(k, j)] *= d;
        }
    }
    UnitaryTransform::new(m)
}
