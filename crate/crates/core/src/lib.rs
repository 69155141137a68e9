//! Single-photon image classification.
//!
//! A photon that passed an image filter carries an amplitude vector whose
//! squared magnitudes are the relative pixel brightnesses. This crate
//!
//! - computes the best accuracy any classifier can reach from the index of
//!   the detector cell that saw the photon, when no interference is used
//!   ([`classical`]);
//! - trains a unitary `U = expm(A(W))` on the amplitude vector so that the
//!   photon lands in a detector block belonging to the right class
//!   ([`linalg`], [`model`]);
//! - evaluates trained transforms analytically ([`eval`]);
//! - turns a unitary into a triangular network of two-mode beam splitters
//!   and phase shifters ([`reck`]);
//! - reproduces the 2x4 two-shape example in closed form ([`toy`]).
//!
//! Complex cotangents follow the `dL/dRe + i dL/dIm` convention throughout:
//! for `Y = L * R` the adjoints are `G_L = G_Y R^H` and `G_R = L^H G_Y`.

pub mod classical;
pub mod dataset;
mod error;
pub mod eval;
pub mod formats;
pub mod info;
pub mod linalg;
pub mod model;
pub mod reck;
pub mod toy;

pub use error::{Error, Result};

pub use num_complex::Complex64;
